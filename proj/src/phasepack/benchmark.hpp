#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phasepack/options.hpp"
#include "phasepack/problems.hpp"

namespace phasepack {

struct BenchmarkParams {
    bool verbose = false;
    int num_trials = 1;
    Index n = 100;
    bool is_complex = true;
    std::string policy = "median";
    double success_constant = 1.0e-5;
    double max_time = 120.0;
    bool record_signals = false;
    std::string image_path;  // 2DImage; empty selects a built-in 16x16 checkerboard
    std::string bundle_path; // bundleFile
    double m_over_n = 5.0;   // 1DGaussian, when m/n is not swept
    int num_masks = 2;       // 2DImage, when masks is not swept
    std::optional<double> snr_db; // when snr is not swept; nullopt is noiseless
    int num_threads = 1;     // 0: one per hardware thread
    bool record_runtime = false; // false writes runtime_s = 0 so reruns are byte-identical
};

struct ParamInfo {
    std::string name;
    std::string default_value;
    std::string description;
};

const std::vector<ParamInfo>& benchmark_param_registry();

/// Throws UnknownKey / InvalidValue.
void set_benchmark_param(BenchmarkParams& params, const std::string& key, const std::string& value);

struct AlgorithmSpec {
    std::string label; // empty: the canonical algorithm name
    OptionOverlay overlay;
};

struct BenchmarkConfig {
    std::string xitem;
    std::vector<double> xvals;
    std::string yitem;
    std::vector<AlgorithmSpec> algorithms;
    std::string dataset;
    BenchmarkParams params;
};

/// Canonical spellings: xitems m/n, snr, masks, iterations, time, angle;
/// yitems reconError, measurementError, correlation; datasets 1DGaussian,
/// 2DImage, bundleFile. Matching is case-insensitive.
std::string canonical_xitem(const std::string& name);
std::string canonical_yitem(const std::string& name);
std::string canonical_dataset(const std::string& name);

/// Which xitems each dataset accepts, as printable text.
std::string support_table();

/// Canonicalizes names and checks every config invariant.
void validate(BenchmarkConfig& config);

struct TrialResult {
    std::string algorithm;
    double xvalue = 0.0;
    int trial = 0;
    double yvalue = 0.0;
    double runtime = 0.0;
    int iterations = 0;
    std::string termination;
    std::optional<ComplexVector> signal;
};

struct Curve {
    std::string algorithm;
    std::vector<double> xvals;
    std::vector<double> yvals;
};

struct BenchmarkResult {
    BenchmarkConfig config;
    std::vector<TrialResult> table; // ordered by (algorithm, xvalue, trial)
    std::vector<Curve> curves;
};

/// Problem instance for (xvalue, trial). Its seed depends on the master
/// seed, the x value and the trial only, so every algorithm sees the same data.
PhaseProblem benchmark_problem(const BenchmarkConfig& config, double xvalue, int trial, std::uint64_t seed);

BenchmarkResult run_benchmark(BenchmarkConfig config, std::uint64_t seed);

/// median, average, best or successrate. For higher-is-better metrics
/// best is the maximum and successrate is rejected.
double aggregate(std::vector<double> values, const std::string& policy, double success_constant,
                 bool higher_is_better = false);

/// Writes results.csv, plot.svg and (with recordSignals) signals.csv.
std::vector<std::filesystem::path> emit_results(const BenchmarkResult& result, const std::filesystem::path& out_dir);

std::string results_csv(const BenchmarkResult& result);
std::string plot_svg(const BenchmarkResult& result);

/// %.17g
std::string format_double(double v);

} // namespace phasepack
