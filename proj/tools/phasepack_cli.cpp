// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phasepack/phasepack.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

enum Exit { kOk = 0, kUsage = 2, kDomain = 3, kIo = 4 };

struct CliError {
    int code;
    std::string message;
};

int exit_code_for(pp_status status) {
    switch (status) {
    case PP_OK: return kOk;
    case PP_ERR_PARSE:
    case PP_ERR_UNKNOWN_KEY:
    case PP_ERR_INVALID_VALUE: return kUsage;
    case PP_ERR_IO:
    case PP_ERR_INTEGRITY: return kIo;
    default: return kDomain;
    }
}

void check(pp_status status, const std::string& context = "") {
    if (status == PP_OK) return;
    throw CliError{exit_code_for(status), (context.empty() ? "" : context + ": ") + pp_last_error()};
}

// Bundle files are inputs: any failure reading one is an I/O-class error.
void check_io(pp_status status, const std::string& context) {
    if (status == PP_OK) return;
    throw CliError{kIo, context + ": " + pp_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Problem = Handle<pp_problem, pp_problem_free>;
using Options = Handle<pp_options, pp_options_free>;
using Solution = Handle<pp_solution, pp_solution_free>;
using Operator = Handle<pp_operator, pp_operator_free>;
using Benchmark = Handle<pp_benchmark, pp_benchmark_free>;
using BenchmarkResult = Handle<pp_benchmark_result, pp_benchmark_result_free>;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json read_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kIo, "cannot read config file " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        json j = json::parse(ss.str());
        if (!j.is_object()) throw CliError{kUsage, path + ": config must be a JSON object"};
        return j;
    } catch (const json::parse_error& e) {
        throw CliError{kUsage, path + ": " + e.what()};
    }
}

std::string scalar_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    throw CliError{kUsage, "config key '" + key + "' must be a string, number or boolean"};
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kIo, "cannot create output directory " + dir.string() + ": " + ec.message()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw CliError{kIo, "cannot write " + path.string()};
}

std::vector<double> solution_vector(const pp_solution* sol) {
    std::vector<double> x(2 * pp_solution_n(sol));
    check(pp_solution_x(sol, x.data()));
    return x;
}

std::vector<double> series(const pp_solution* sol, pp_series which) {
    std::vector<double> out(pp_solution_series(sol, which, nullptr));
    pp_solution_series(sol, which, out.data());
    return out;
}

std::string option_value(const pp_solution* sol, const char* key) {
    size_t needed = 0;
    check(pp_solution_option(sol, key, nullptr, 0, &needed));
    std::string s(needed, '\0');
    check(pp_solution_option(sol, key, s.data(), s.size(), nullptr));
    s.resize(needed - 1);
    return s;
}

// Writes solution.csv, convergence.csv and summary.txt; returns the summary text.
std::string write_solve_artifacts(const fs::path& out_dir, const pp_problem* problem, const pp_solution* sol,
                                  bool truth_known) {
    make_dir(out_dir);
    const auto x = solution_vector(sol);
    std::ostringstream s;
    s << "index,real,imag\n";
    for (size_t i = 0; i < x.size() / 2; ++i) s << i << ',' << fmt17(x[2 * i]) << ',' << fmt17(x[2 * i + 1]) << '\n';
    write_file(out_dir / "solution.csv", s.str());

    const auto residuals = series(sol, PP_SERIES_RESIDUALS);
    const auto meas = series(sol, PP_SERIES_MEASUREMENT_ERRORS);
    const auto recon = series(sol, PP_SERIES_RECON_ERRORS);
    const auto times = series(sol, PP_SERIES_TIMES);
    auto cell = [](const std::vector<double>& v, size_t i) { return i < v.size() ? fmt17(v[i]) : std::string(); };
    std::ostringstream c;
    c << "iteration,residual,measurementError,reconError,time\n";
    const size_t iterations = static_cast<size_t>(pp_solution_iterations(sol));
    for (size_t i = 0; i < iterations; ++i) {
        c << (i + 1) << ',' << cell(residuals, i) << ',' << cell(meas, i) << ',' << cell(recon, i) << ','
          << cell(times, i) << '\n';
    }
    write_file(out_dir / "convergence.csv", c.str());

    Operator op;
    check(pp_problem_operator(problem, op.out()));
    std::vector<double> b(pp_problem_m(problem));
    check(pp_problem_measurements(problem, b.data()));
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;

    std::ostringstream m;
    m << "algorithm: " << option_value(sol, "algorithm") << '\n';
    m << "initMethod: " << option_value(sol, "initMethod") << '\n';
    m << "terminationReason: " << pp_solution_termination(sol) << '\n';
    m << "iterations: " << iterations << '\n';
    m << "totalTime: " << fmt17(pp_solution_total_time(sol)) << '\n';
    if (bnorm > 0.0) {
        double me = 0.0;
        check(pp_measurement_error(op.get(), x.data(), b.data(), &me));
        m << "measurementError: " << fmt17(me) << '\n';
    }
    if (truth_known) {
        std::vector<double> xt(2 * pp_problem_n(problem));
        check(pp_problem_truth(problem, xt.data()));
        double re = 0.0;
        check(pp_recon_error(x.data(), xt.data(), pp_problem_n(problem), &re));
        m << "relative recon error: " << fmt17(re) << '\n';
    }
    for (size_t i = 0; i < pp_solution_warning_count(sol); ++i) m << "warning: " << pp_solution_warning(sol, i) << '\n';
    write_file(out_dir / "summary.txt", m.str());
    return m.str();
}

void apply_options(pp_options* opts, const json& j) {
    if (!j.is_object()) throw CliError{kUsage, "'opts' must be an object"};
    for (const auto& [key, value] : j.items()) {
        check(pp_options_set(opts, key.c_str(), scalar_text(value, "opts." + key).c_str()), "opts." + key);
    }
}

int cmd_solve(const std::string& config_path, const fs::path& out_dir, std::uint64_t seed, std::optional<int> verbose) {
    const json config = read_config(config_path);
    for (const auto& [key, value] : config.items()) {
        if (key != "problem" && key != "opts") throw CliError{kUsage, "unknown config key '" + key + "'"};
    }
    if (!config.contains("problem") || !config["problem"].is_object()) {
        throw CliError{kUsage, "config needs a 'problem' object"};
    }
    const json& pj = config["problem"];
    for (const auto& [key, value] : pj.items()) {
        static const std::vector<std::string> known{"n", "m", "isComplex", "provideTruth", "bundle", "snr"};
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw CliError{kUsage, "unknown config key 'problem." + key + "'"};
        }
    }

    Problem problem;
    bool truth_known = false;
    try {
        if (pj.contains("bundle")) {
            if (pj.contains("n") || pj.contains("m")) {
                throw CliError{kUsage, "problem.bundle cannot be combined with problem.n / problem.m"};
            }
            const auto path = pj["bundle"].get<std::string>();
            check_io(pp_problem_load_bundle(path.c_str(), problem.out()), path);
        } else {
            if (!pj.contains("n") || !pj.contains("m")) throw CliError{kUsage, "problem needs n and m (or bundle)"};
            const auto n = pj["n"].get<long long>();
            const auto m = pj["m"].get<long long>();
            if (n < 1 || m < 1) throw CliError{kUsage, "problem.n and problem.m must be >= 1"};
            const bool is_complex = pj.value("isComplex", true);
            check(pp_problem_gaussian(static_cast<size_t>(n), static_cast<size_t>(m), is_complex, seed, problem.out()));
            truth_known = true;
        }
        if (pj.contains("snr")) {
            check(pp_problem_add_noise(problem.get(), pj["snr"].get<double>(), seed ^ 0x9e3779b97f4a7c15ULL));
        }
    } catch (const json::type_error& e) {
        throw CliError{kUsage, std::string("problem: ") + e.what()};
    }

    Options opts;
    check(pp_options_create(opts.out()));
    if (config.contains("opts")) apply_options(opts.get(), config["opts"]);
    if (verbose) check(pp_options_set(opts.get(), "verbose", std::to_string(*verbose).c_str()));
    const bool provide_truth = pj.value("provideTruth", truth_known);
    if (provide_truth) {
        if (!truth_known) throw CliError{kDomain, "problem.provideTruth: this problem has no ground truth"};
        std::vector<double> xt(2 * pp_problem_n(problem.get()));
        check(pp_problem_truth(problem.get(), xt.data()));
        check(pp_options_set_truth(opts.get(), xt.data(), pp_problem_n(problem.get())));
    }

    Solution sol;
    check(pp_solve(problem.get(), opts.get(), seed, sol.out()));
    std::cout << write_solve_artifacts(out_dir, problem.get(), sol.get(), truth_known);
    return kOk;
}

int cmd_benchmark(const std::string& config_path, const fs::path& out_dir, std::uint64_t seed) {
    const json config = read_config(config_path);
    static const std::vector<std::string> known{"xitem", "xvals", "yitem", "algorithms", "dataset", "params"};
    for (const auto& [key, value] : config.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw CliError{kUsage, "unknown config key '" + key + "'"};
        }
    }
    for (const char* key : {"xitem", "xvals", "yitem", "algorithms", "dataset"}) {
        if (!config.contains(key)) throw CliError{kUsage, std::string("config needs '") + key + "'"};
    }
    if (!config["xvals"].is_array()) throw CliError{kUsage, "'xvals' must be an array of numbers"};
    if (!config["algorithms"].is_array()) throw CliError{kUsage, "'algorithms' must be an array"};

    Benchmark bench;
    check(pp_benchmark_create(scalar_text(config["xitem"], "xitem").c_str(),
                              scalar_text(config["yitem"], "yitem").c_str(),
                              scalar_text(config["dataset"], "dataset").c_str(), bench.out()));
    std::vector<double> xvals;
    for (const auto& v : config["xvals"]) {
        if (!v.is_number()) throw CliError{kUsage, "'xvals' must be an array of numbers"};
        xvals.push_back(v.get<double>());
    }
    check(pp_benchmark_set_xvals(bench.get(), xvals.data(), xvals.size()));
    if (config.contains("params")) {
        if (!config["params"].is_object()) throw CliError{kUsage, "'params' must be an object"};
        for (const auto& [key, value] : config["params"].items()) {
            check(pp_benchmark_set_param(bench.get(), key.c_str(), scalar_text(value, "params." + key).c_str()),
                  "params." + key);
        }
    }
    for (const auto& entry : config["algorithms"]) {
        if (!entry.is_object()) throw CliError{kUsage, "each algorithms entry must be an object"};
        std::optional<std::string> label;
        if (entry.contains("label")) label = scalar_text(entry["label"], "label");
        size_t index = 0;
        check(pp_benchmark_add_algorithm(bench.get(), label ? label->c_str() : nullptr, &index));
        for (const auto& [key, value] : entry.items()) {
            if (key == "label") continue;
            check(pp_benchmark_algorithm_set(bench.get(), index, key.c_str(), scalar_text(value, key).c_str()),
                  "algorithms." + key);
        }
    }
    check(pp_benchmark_validate(bench.get()));

    BenchmarkResult result;
    check(pp_benchmark_run(bench.get(), seed, result.out()));
    make_dir(out_dir);
    check(pp_benchmark_result_write(result.get(), out_dir.string().c_str()), out_dir.string());
    std::cout << "wrote " << pp_benchmark_result_rows(result.get()) << " rows to " << (out_dir / "results.csv").string()
              << '\n';
    return kOk;
}

int demo_signal(const std::optional<fs::path>& out_dir, std::uint64_t seed) {
    Problem problem;
    check(pp_problem_gaussian(100, 500, 1, seed, problem.out()));
    Options opts;
    check(pp_options_create(opts.out()));
    check(pp_options_set(opts.get(), "algorithm", "Fienup"));
    check(pp_options_set(opts.get(), "initMethod", "truncatedSpectral"));
    check(pp_options_set(opts.get(), "tol", "1e-10"));
    check(pp_options_set(opts.get(), "maxIters", "500"));
    std::vector<double> xt(200);
    check(pp_problem_truth(problem.get(), xt.data()));
    check(pp_options_set_truth(opts.get(), xt.data(), 100));

    Solution sol;
    check(pp_solve(problem.get(), opts.get(), seed, sol.out()));
    if (out_dir) write_solve_artifacts(*out_dir, problem.get(), sol.get(), true);
    const auto x = solution_vector(sol.get());
    double err = 0.0;
    check(pp_recon_error(x.data(), xt.data(), 100, &err));
    std::printf("signal demo: n = 100, m = 500, fienup with truncated spectral init\n");
    std::printf("%d iterations, %s\n", pp_solution_iterations(sol.get()), pp_solution_termination(sol.get()));
    std::printf("relative recon error = %.6e\n", err);
    return kOk;
}

void write_pgm(const fs::path& path, const std::vector<double>& pixels, size_t height, size_t width) {
    std::string data = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (double v : pixels) {
        const double c = std::min(1.0, std::max(0.0, v));
        data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    write_file(path, data);
}

int demo_image(const fs::path& out_dir, std::uint64_t seed) {
    constexpr size_t side = 16;
    constexpr size_t n = side * side;
    Problem problem;
    check(pp_problem_image(nullptr, side, side, 4, seed, problem.out()));
    Options opts;
    check(pp_options_create(opts.out()));
    check(pp_options_set(opts.get(), "algorithm", "gerchbergsaxton"));
    check(pp_options_set(opts.get(), "initMethod", "spectral"));
    check(pp_options_set(opts.get(), "maxIters", "1000"));
    std::vector<double> xt(2 * n);
    check(pp_problem_truth(problem.get(), xt.data()));
    check(pp_options_set_truth(opts.get(), xt.data(), n));
    Solution sol;
    check(pp_solve(problem.get(), opts.get(), seed, sol.out()));
    const auto x = solution_vector(sol.get());

    // Undo the global phase before showing the real part.
    double ar = 0.0, ai = 0.0, xx = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double xr = x[2 * i], xi = x[2 * i + 1], tr = xt[2 * i], ti = xt[2 * i + 1];
        ar += xr * tr + xi * ti;
        ai += xr * ti - xi * tr;
        xx += xr * xr + xi * xi;
    }
    std::vector<double> truth(n), recovered(n);
    for (size_t i = 0; i < n; ++i) {
        truth[i] = xt[2 * i];
        recovered[i] = xx > 0.0 ? (ar * x[2 * i] - ai * x[2 * i + 1]) / xx : 0.0;
    }
    double err = 0.0;
    check(pp_recon_error(x.data(), xt.data(), n, &err));
    make_dir(out_dir);
    write_pgm(out_dir / "original.pgm", truth, side, side);
    write_pgm(out_dir / "recovered.pgm", recovered, side, side);
    std::printf("image demo: 16x16 checkerboard, 4 octanary masks, gerchbergsaxton\n");
    std::printf("%d iterations, %s\n", pp_solution_iterations(sol.get()), pp_solution_termination(sol.get()));
    std::printf("relative recon error = %.6e\n", err);
    std::printf("wrote %s\n", (out_dir / "recovered.pgm").string().c_str());
    return kOk;
}

std::string options_help() {
    std::string s = "Solve config: {\"problem\": {...}, \"opts\": {...}}\n\nproblem keys:\n"
                    "  n, m            synthetic complex Gaussian problem size\n"
                    "  isComplex       default true\n"
                    "  provideTruth    pass xt to the solver (default true for synthetic problems)\n"
                    "  bundle          path of a measurement bundle (instead of n, m)\n"
                    "  snr             add noise at this SNR in dB\n\nopts keys (default):\n";
    for (size_t i = 0; i < pp_option_count(); ++i) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-30s %-16s %s\n", pp_option_name(i), pp_option_default(i),
                      pp_option_description(i));
        s += line;
    }
    s += "\nalgorithms:";
    for (size_t i = 0; i < pp_algorithm_count(); ++i) s += std::string(" ") + pp_algorithm_name(i);
    s += "\ninitializers:";
    for (size_t i = 0; i < pp_init_method_count(); ++i) s += std::string(" ") + pp_init_method_name(i);
    return s + "\n";
}

std::string benchmark_help() {
    std::string s = "Benchmark config: {\"xitem\", \"xvals\", \"yitem\", \"algorithms\": [{\"algorithm\": ..., "
                    "\"label\": ..., <opts keys>}], \"dataset\", \"params\": {...}}\n\n"
                    "xitems: m/n snr masks iterations time angle\n"
                    "yitems: reconError measurementError correlation\n"
                    "datasets: 1DGaussian 2DImage bundleFile\n";
    s += pp_benchmark_support_table();
    s += "\nparams keys (default):\n";
    for (size_t i = 0; i < pp_benchmark_param_count(); ++i) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-30s %-16s %s\n", pp_benchmark_param_name(i),
                      pp_benchmark_param_default(i), pp_benchmark_param_description(i));
        s += line;
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PhasePack: phase retrieval solvers and benchmarks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = kDefaultSeed;
    std::optional<int> verbose;

    auto* solve = app.add_subcommand("solve", "solve one phase retrieval problem");
    solve->add_option("--config", config_path, "JSON config file")->required();
    solve->add_option("--out", out_dir, "output directory")->required();
    solve->add_option("--seed", seed, "random seed")->capture_default_str();
    solve->add_option("--verbose", verbose, "0 silent, 1 summary line, 2 per iteration")->check(CLI::Range(0, 2));
    solve->footer(options_help());

    auto* bench = app.add_subcommand("benchmark", "sweep a condition and compare algorithms");
    bench->add_option("--config", config_path, "JSON config file")->required();
    bench->add_option("--out", out_dir, "output directory")->required();
    bench->add_option("--seed", seed, "random seed")->capture_default_str();
    bench->footer(benchmark_help());

    std::string demo_name;
    auto* demo = app.add_subcommand("demo", "run a built-in demo (signal or image)");
    demo->add_option("name", demo_name, "signal or image")->required();
    demo->add_option("--out", out_dir, "output directory");
    demo->add_option("--seed", seed, "random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) return cmd_solve(config_path, out_dir, seed, verbose);
        if (*bench) return cmd_benchmark(config_path, out_dir, seed);
        if (demo_name == "signal") {
            return demo_signal(out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir), seed);
        }
        if (demo_name == "image") return demo_image(out_dir.empty() ? fs::path(".") : fs::path(out_dir), seed);
        throw CliError{kUsage, "unknown demo '" + demo_name + "' (expected signal or image)"};
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    }
}
