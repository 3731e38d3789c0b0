#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phasepack/common.hpp"

namespace phasepack {

enum class SearchMethod { SteepestDescent, NonlinearCG, LBFGS };
enum class IndexChoice { Cyclic, Random };

/// Fully resolved solver configuration. Field defaults are the global
/// defaults; per-algorithm defaults are layered on by resolve_options().
struct SolverOptions {
    std::string algorithm = "gerchbergsaxton";
    std::string init_method = "orthogonal";
    int max_iters = 1000;
    double max_time = 120.0;
    double tol = 1.0e-6;
    std::optional<ComplexVector> xt;
    int verbose = 0;
    SearchMethod search_method = SearchMethod::SteepestDescent;
    bool record_measurement_errors = false;
    bool record_residuals = true;
    bool record_recon_errors = false;
    bool record_times = true;

    // projection methods
    double fienup_tuning = 0.5;
    int max_inner_iters = 100;
    double inner_tol = 1.0e-9;
    IndexChoice index_choice = IndexChoice::Cyclic;

    // convex surrogates
    int max_fasta_iters = 1000;
    int phase_lamp_outer_iters = 10;

    // reweighted / truncated flows
    int reweight_period = 20;
    double eta = 0.9;
    double gamma = 0.7;
    int truncation_period = 20;
    double twf_alpha_lb = 0.3;
    double twf_alpha_ub = 5.0;
    double twf_alpha_h = 5.0;
    double raf_beta = 10.0;

    // gradient engine
    int lbfgs_memory = 5;
    double line_search_shrink = 0.5;
    double line_search_sufficient_decrease = 1.0e-4;

    // initializers
    int power_iters = 100;
    double power_tol = 1.0e-5;
    double truncation_alpha = 3.0;
    double amplitude_fraction = 1.0 / 6.0;
    double orthogonal_fraction = 0.5;
    double weight_exponent = 1.0;
    double init_angle = 0.0;
};

/// User-supplied option values keyed by option name, layered over defaults.
/// Values are text and are parsed against the registry type on resolution.
struct OptionOverlay {
    std::map<std::string, std::string> values;
    std::optional<ComplexVector> xt;

    OptionOverlay& set(std::string key, std::string value);
};

enum class OptionKind { Real, Integer, Boolean, Name };

struct OptionInfo {
    std::string name;
    OptionKind kind;
    std::string default_value;
    std::string description;
};

/// Every settable option, in registry order, with its global default.
const std::vector<OptionInfo>& option_registry();

/// Throws UnknownKey / InvalidValue for keys or values that do not parse.
void set_option(SolverOptions& opts, const std::string& key, const std::string& value);
std::string get_option(const SolverOptions& opts, const std::string& key);

const std::vector<std::string>& algorithm_names();
const std::vector<std::string>& init_method_names();

/// Lowercases and maps aliases ("truncatedSpectral" -> "truncated");
/// throws UnknownName listing valid names.
std::string canonical_algorithm(std::string_view name);
std::string canonical_init_method(std::string_view name);

/// Per-algorithm defaults layered over the globals.
std::map<std::string, std::string> algorithm_defaults(const std::string& algorithm);

/// Globals, then per-algorithm defaults, then the user overlay; validated.
SolverOptions resolve_options(const OptionOverlay& overlay);

/// Checks invariants of an already populated option set.
void validate(const SolverOptions& opts);

std::string to_lower(std::string_view s);

// Text conversions shared by the option and parameter registries; parse
// failures throw InvalidValue naming `key`.
std::string format_real(double v); // shortest round-trip form
double parse_real(const std::string& key, const std::string& text);
int parse_integer(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::string to_string(SearchMethod method);
std::string to_string(IndexChoice choice);

} // namespace phasepack
