#include "phasepack/options.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>

namespace phasepack {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string to_string(SearchMethod method) {
    switch (method) {
    case SearchMethod::SteepestDescent: return "steepestDescent";
    case SearchMethod::NonlinearCG: return "NCG";
    case SearchMethod::LBFGS: return "LBFGS";
    }
    return "steepestDescent";
}

std::string to_string(IndexChoice choice) { return choice == IndexChoice::Cyclic ? "cyclic" : "random"; }

OptionOverlay& OptionOverlay::set(std::string key, std::string value) {
    values[std::move(key)] = std::move(value);
    return *this;
}

std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        fail(ErrorCode::InvalidValue, "option '" + key + "': expected a real number, got '" + text + "'");
    }
    return v;
}

int parse_integer(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v != std::floor(v) || std::abs(v) > 2.0e9) {
        fail(ErrorCode::InvalidValue, "option '" + key + "': expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto t = to_lower(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    fail(ErrorCode::InvalidValue, "option '" + key + "': expected true or false, got '" + text + "'");
}

namespace {

SearchMethod parse_search(const std::string& text) {
    const auto t = to_lower(text);
    if (t == "steepestdescent") return SearchMethod::SteepestDescent;
    if (t == "ncg") return SearchMethod::NonlinearCG;
    if (t == "lbfgs") return SearchMethod::LBFGS;
    fail(ErrorCode::InvalidValue, "option 'searchMethod': expected steepestDescent, NCG or LBFGS, got '" + text + "'");
}

IndexChoice parse_index_choice(const std::string& text) {
    const auto t = to_lower(text);
    if (t == "cyclic") return IndexChoice::Cyclic;
    if (t == "random") return IndexChoice::Random;
    fail(ErrorCode::InvalidValue, "option 'indexChoice': expected cyclic or random, got '" + text + "'");
}

struct Entry {
    OptionInfo info;
    std::function<void(SolverOptions&, const std::string&)> set;
    std::function<std::string(const SolverOptions&)> get;
};

Entry real_entry(const char* name, double SolverOptions::*field, const char* description) {
    return {{name, OptionKind::Real, "", description},
            [name, field](SolverOptions& o, const std::string& v) { o.*field = parse_real(name, v); },
            [field](const SolverOptions& o) { return format_real(o.*field); }};
}

Entry int_entry(const char* name, int SolverOptions::*field, const char* description) {
    return {{name, OptionKind::Integer, "", description},
            [name, field](SolverOptions& o, const std::string& v) { o.*field = parse_integer(name, v); },
            [field](const SolverOptions& o) { return std::to_string(o.*field); }};
}

Entry bool_entry(const char* name, bool SolverOptions::*field, const char* description) {
    return {{name, OptionKind::Boolean, "", description},
            [name, field](SolverOptions& o, const std::string& v) { o.*field = parse_bool(name, v); },
            [field](const SolverOptions& o) { return std::string(o.*field ? "true" : "false"); }};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back({{"algorithm", OptionKind::Name, "", "solver name (case-insensitive)"},
                     [](SolverOptions& o, const std::string& v) { o.algorithm = canonical_algorithm(v); },
                     [](const SolverOptions& o) { return o.algorithm; }});
        t.push_back({{"initMethod", OptionKind::Name, "", "initializer name (case-insensitive)"},
                     [](SolverOptions& o, const std::string& v) { o.init_method = canonical_init_method(v); },
                     [](const SolverOptions& o) { return o.init_method; }});
        t.push_back(int_entry("maxIters", &SolverOptions::max_iters, "maximum number of iterations"));
        t.push_back(real_entry("maxTime", &SolverOptions::max_time, "maximum run time in seconds"));
        t.push_back(real_entry("tol", &SolverOptions::tol,
                               "stopping tolerance on recon error (xt given) or residual"));
        t.push_back(int_entry("verbose", &SolverOptions::verbose, "0 silent, 1 summary, 2 every iteration"));
        t.push_back({{"searchMethod", OptionKind::Name, "", "steepestDescent, NCG or LBFGS"},
                     [](SolverOptions& o, const std::string& v) { o.search_method = parse_search(v); },
                     [](const SolverOptions& o) { return to_string(o.search_method); }});
        t.push_back(bool_entry("recordMeasurementErrors", &SolverOptions::record_measurement_errors,
                               "record ||(|Ax| - b)|| / ||b|| every iteration"));
        t.push_back(bool_entry("recordResiduals", &SolverOptions::record_residuals,
                               "record the solver residual every iteration (skipped when xt is given)"));
        t.push_back(bool_entry("recordReconErrors", &SolverOptions::record_recon_errors,
                               "record the reconstruction error every iteration (requires xt)"));
        t.push_back(bool_entry("recordTimes", &SolverOptions::record_times, "record cumulative time every iteration"));
        t.push_back(real_entry("FienupTuning", &SolverOptions::fienup_tuning, "Fienup relaxation of the data update"));
        t.push_back(int_entry("maxInnerIters", &SolverOptions::max_inner_iters,
                              "inner least-squares iterations (Gerchberg-Saxton, Fienup)"));
        t.push_back(real_entry("innerTol", &SolverOptions::inner_tol, "inner least-squares relative tolerance"));
        t.push_back({{"indexChoice", OptionKind::Name, "", "Kaczmarz row order: cyclic or random"},
                     [](SolverOptions& o, const std::string& v) { o.index_choice = parse_index_choice(v); },
                     [](const SolverOptions& o) { return to_string(o.index_choice); }});
        t.push_back(int_entry("maxFastaIters", &SolverOptions::max_fasta_iters,
                              "PhaseMax inner iterations per continuation stage"));
        t.push_back(int_entry("phaseLampOuterIters", &SolverOptions::phase_lamp_outer_iters,
                              "PhaseLamp outer re-anchoring rounds"));
        t.push_back(int_entry("reweightPeriod", &SolverOptions::reweight_period, "RWF/RAF weight refresh period"));
        t.push_back(real_entry("eta", &SolverOptions::eta, "RWF weight parameter"));
        t.push_back(real_entry("gamma", &SolverOptions::gamma, "TAF truncation parameter"));
        t.push_back(int_entry("truncationPeriod", &SolverOptions::truncation_period, "TAF mask refresh period"));
        t.push_back(real_entry("twfAlphaLb", &SolverOptions::twf_alpha_lb, "TWF lower magnitude bound"));
        t.push_back(real_entry("twfAlphaUb", &SolverOptions::twf_alpha_ub, "TWF upper magnitude bound"));
        t.push_back(real_entry("twfAlphaH", &SolverOptions::twf_alpha_h, "TWF residual bound"));
        t.push_back(real_entry("rafBeta", &SolverOptions::raf_beta, "RAF weight parameter"));
        t.push_back(int_entry("lbfgsMemory", &SolverOptions::lbfgs_memory, "L-BFGS history length"));
        t.push_back(real_entry("lineSearchShrink", &SolverOptions::line_search_shrink, "backtracking shrink factor"));
        t.push_back(real_entry("lineSearchSufficientDecrease", &SolverOptions::line_search_sufficient_decrease,
                               "Armijo sufficient-decrease constant"));
        t.push_back(int_entry("powerIters", &SolverOptions::power_iters, "power-method iterations for initializers"));
        t.push_back(real_entry("powerTol", &SolverOptions::power_tol, "power-method stopping tolerance"));
        t.push_back(real_entry("truncationAlpha", &SolverOptions::truncation_alpha, "truncated initializer threshold"));
        t.push_back(real_entry("amplitudeFraction", &SolverOptions::amplitude_fraction,
                               "fraction of largest measurements used by the amplitude initializer"));
        t.push_back(real_entry("orthogonalFraction", &SolverOptions::orthogonal_fraction,
                               "fraction of smallest measurements used by the orthogonal initializer"));
        t.push_back(real_entry("weightExponent", &SolverOptions::weight_exponent, "weighted initializer exponent"));
        t.push_back(real_entry("initAngle", &SolverOptions::init_angle, "angle initializer distance in radians"));

        const SolverOptions defaults;
        for (auto& e : t) e.info.default_value = e.get(defaults);
        return t;
    }();
    return table;
}

const Entry& find_entry(const std::string& key) {
    for (const auto& e : entries()) {
        if (e.info.name == key) return e;
    }
    fail(ErrorCode::UnknownKey, "unknown option '" + key + "'");
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

} // namespace

const std::vector<OptionInfo>& option_registry() {
    static const std::vector<OptionInfo> infos = [] {
        std::vector<OptionInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

void set_option(SolverOptions& opts, const std::string& key, const std::string& value) {
    find_entry(key).set(opts, value);
}

std::string get_option(const SolverOptions& opts, const std::string& key) { return find_entry(key).get(opts); }

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = {
        "amplitudeflow", "coordinatedescent", "fienup",   "gerchbergsaxton", "kaczmarz", "phaselamp",
        "phasemax",      "raf",               "rwf",      "taf",             "twf",      "wirtflow"};
    return names;
}

const std::vector<std::string>& init_method_names() {
    static const std::vector<std::string> names = {"amplitude", "angle",    "orthogonal",
                                                   "spectral",  "truncated", "weighted"};
    return names;
}

std::string canonical_algorithm(std::string_view name) {
    const auto lowered = to_lower(name);
    const auto& names = algorithm_names();
    if (std::find(names.begin(), names.end(), lowered) == names.end()) {
        fail(ErrorCode::UnknownName,
             "unknown algorithm '" + std::string(name) + "'; valid algorithms: " + join(names));
    }
    return lowered;
}

std::string canonical_init_method(std::string_view name) {
    auto lowered = to_lower(name);
    if (lowered == "truncatedspectral") lowered = "truncated";
    if (lowered == "amplitudespectral") lowered = "amplitude";
    if (lowered == "null") lowered = "orthogonal";
    const auto& names = init_method_names();
    if (std::find(names.begin(), names.end(), lowered) == names.end()) {
        fail(ErrorCode::UnknownName,
             "unknown initializer '" + std::string(name) + "'; valid initializers: " + join(names));
    }
    return lowered;
}

std::map<std::string, std::string> algorithm_defaults(const std::string& algorithm) {
    const auto name = canonical_algorithm(algorithm);
    if (name == "wirtflow") return {{"initMethod", "spectral"}};
    if (name == "twf") return {{"initMethod", "truncated"}};
    if (name == "raf") return {{"initMethod", "weighted"}};
    return {};
}

void validate(const SolverOptions& opts) {
    auto bad = [](const std::string& what) { fail(ErrorCode::InvalidValue, what); };
    canonical_algorithm(opts.algorithm);
    canonical_init_method(opts.init_method);
    if (!(opts.tol > 0.0)) bad("option 'tol' must be positive");
    if (opts.max_iters < 1) bad("option 'maxIters' must be >= 1");
    if (!(opts.max_time > 0.0)) bad("option 'maxTime' must be positive");
    if (opts.verbose < 0 || opts.verbose > 2) bad("option 'verbose' must be 0, 1 or 2");
    if (opts.max_inner_iters < 1) bad("option 'maxInnerIters' must be >= 1");
    if (!(opts.inner_tol > 0.0)) bad("option 'innerTol' must be positive");
    if (opts.max_fasta_iters < 1) bad("option 'maxFastaIters' must be >= 1");
    if (opts.phase_lamp_outer_iters < 1) bad("option 'phaseLampOuterIters' must be >= 1");
    if (opts.reweight_period < 1) bad("option 'reweightPeriod' must be >= 1");
    if (opts.truncation_period < 1) bad("option 'truncationPeriod' must be >= 1");
    if (opts.lbfgs_memory < 1) bad("option 'lbfgsMemory' must be >= 1");
    if (!(opts.line_search_shrink > 0.0 && opts.line_search_shrink < 1.0)) bad("option 'lineSearchShrink' must lie in (0, 1)");
    if (!(opts.line_search_sufficient_decrease > 0.0 && opts.line_search_sufficient_decrease < 1.0)) {
        bad("option 'lineSearchSufficientDecrease' must lie in (0, 1)");
    }
    if (opts.power_iters < 1) bad("option 'powerIters' must be >= 1");
    if (!(opts.power_tol > 0.0)) bad("option 'powerTol' must be positive");
    if (!(opts.amplitude_fraction > 0.0 && opts.amplitude_fraction < 1.0)) bad("option 'amplitudeFraction' must lie in (0, 1)");
    if (!(opts.orthogonal_fraction > 0.0 && opts.orthogonal_fraction < 1.0)) bad("option 'orthogonalFraction' must lie in (0, 1)");
    if (!(opts.truncation_alpha > 0.0)) bad("option 'truncationAlpha' must be positive");
    if (!(opts.init_angle >= 0.0 && opts.init_angle <= std::numbers::pi / 2.0)) bad("option 'initAngle' must lie in [0, pi/2]");
    if (!(opts.eta > 0.0)) bad("option 'eta' must be positive");
    if (!(opts.gamma > 0.0)) bad("option 'gamma' must be positive");
    if (!(opts.raf_beta > 0.0)) bad("option 'rafBeta' must be positive");
    if (opts.xt) require_finite(*opts.xt, "option 'xt'");
}

SolverOptions resolve_options(const OptionOverlay& overlay) {
    for (const auto& [key, value] : overlay.values) find_entry(key);

    SolverOptions opts;
    if (auto it = overlay.values.find("algorithm"); it != overlay.values.end()) {
        opts.algorithm = canonical_algorithm(it->second);
    }
    for (const auto& [key, value] : algorithm_defaults(opts.algorithm)) set_option(opts, key, value);
    for (const auto& [key, value] : overlay.values) set_option(opts, key, value);
    opts.xt = overlay.xt;
    validate(opts);
    return opts;
}

} // namespace phasepack
