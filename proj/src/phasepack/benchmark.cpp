#include "phasepack/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "phasepack/metrics.hpp"
#include "phasepack/solve.hpp"

namespace phasepack {

namespace {

struct ParamEntry {
    ParamInfo info;
    std::function<void(BenchmarkParams&, const std::string&)> set;
};

const std::vector<ParamEntry>& param_entries() {
    static const std::vector<ParamEntry> table = [] {
        const BenchmarkParams d;
        auto b = [](bool v) { return std::string(v ? "true" : "false"); };
        std::vector<ParamEntry> t;
        t.push_back({{"verbose", b(d.verbose), "print one line per trial"},
                     [](BenchmarkParams& p, const std::string& v) { p.verbose = parse_bool("verbose", v); }});
        t.push_back({{"numTrials", std::to_string(d.num_trials), "trials per x value"},
                     [](BenchmarkParams& p, const std::string& v) { p.num_trials = parse_integer("numTrials", v); }});
        t.push_back({{"n", std::to_string(d.n), "signal length (1DGaussian)"},
                     [](BenchmarkParams& p, const std::string& v) { p.n = parse_integer("n", v); }});
        t.push_back({{"isComplex", b(d.is_complex), "complex signal and measurements (1DGaussian)"},
                     [](BenchmarkParams& p, const std::string& v) { p.is_complex = parse_bool("isComplex", v); }});
        t.push_back({{"policy", d.policy, "median, average, best or successrate"},
                     [](BenchmarkParams& p, const std::string& v) { p.policy = to_lower(v); }});
        t.push_back({{"successConstant", format_real(d.success_constant), "success threshold for successrate"},
                     [](BenchmarkParams& p, const std::string& v) {
                         p.success_constant = parse_real("successConstant", v);
                     }});
        t.push_back({{"maxTime", format_real(d.max_time), "per-solve time budget in seconds"},
                     [](BenchmarkParams& p, const std::string& v) { p.max_time = parse_real("maxTime", v); }});
        t.push_back({{"recordSignals", b(d.record_signals), "write recovered signals to signals.csv"},
                     [](BenchmarkParams& p, const std::string& v) {
                         p.record_signals = parse_bool("recordSignals", v);
                     }});
        t.push_back({{"imagePath", "", "PGM image for 2DImage (default: 16x16 checkerboard)"},
                     [](BenchmarkParams& p, const std::string& v) { p.image_path = v; }});
        t.push_back({{"bundlePath", "", "measurement bundle for bundleFile"},
                     [](BenchmarkParams& p, const std::string& v) { p.bundle_path = v; }});
        t.push_back({{"mOverN", format_real(d.m_over_n), "sampling ratio when m/n is not swept"},
                     [](BenchmarkParams& p, const std::string& v) { p.m_over_n = parse_real("mOverN", v); }});
        t.push_back({{"numMasks", std::to_string(d.num_masks), "mask count when masks is not swept"},
                     [](BenchmarkParams& p, const std::string& v) { p.num_masks = parse_integer("numMasks", v); }});
        t.push_back({{"snr", "noiseless", "SNR in dB when snr is not swept, or noiseless"},
                     [](BenchmarkParams& p, const std::string& v) {
                         if (to_lower(v) == "noiseless" || to_lower(v) == "inf") {
                             p.snr_db.reset();
                         } else {
                             p.snr_db = parse_real("snr", v);
                         }
                     }});
        t.push_back({{"numThreads", std::to_string(d.num_threads), "worker threads (0: all cores)"},
                     [](BenchmarkParams& p, const std::string& v) {
                         p.num_threads = parse_integer("numThreads", v);
                     }});
        t.push_back({{"recordRuntime", b(d.record_runtime), "write measured runtimes (breaks byte-identical reruns)"},
                     [](BenchmarkParams& p, const std::string& v) {
                         p.record_runtime = parse_bool("recordRuntime", v);
                     }});
        return t;
    }();
    return table;
}

std::string lookup(const std::string& name, const std::vector<std::string>& names, const char* what) {
    const auto lowered = to_lower(name);
    for (const auto& candidate : names) {
        if (to_lower(candidate) == lowered) return candidate;
    }
    std::string list;
    for (const auto& candidate : names) list += (list.empty() ? "" : ", ") + candidate;
    fail(ErrorCode::InvalidValue, std::string("unknown ") + what + " '" + name + "'; expected one of " + list);
}

const std::vector<std::string>& dataset_xitems(const std::string& dataset) {
    static const std::vector<std::string> gaussian{"m/n", "snr", "iterations", "time", "angle"};
    static const std::vector<std::string> image{"masks", "snr", "iterations", "time", "angle"};
    static const std::vector<std::string> bundle{"snr", "iterations", "time"};
    if (dataset == "1DGaussian") return gaussian;
    if (dataset == "2DImage") return image;
    return bundle;
}

bool higher_is_better(const std::string& yitem) { return yitem == "correlation"; }

Index rounded_positive(double v) { return std::max<Index>(1, static_cast<Index>(std::llround(v))); }

} // namespace

const std::vector<ParamInfo>& benchmark_param_registry() {
    static const std::vector<ParamInfo> infos = [] {
        std::vector<ParamInfo> out;
        for (const auto& e : param_entries()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

void set_benchmark_param(BenchmarkParams& params, const std::string& key, const std::string& value) {
    for (const auto& e : param_entries()) {
        if (e.info.name == key) {
            e.set(params, value);
            return;
        }
    }
    fail(ErrorCode::UnknownKey, "unknown benchmark parameter 'params." + key + "'");
}

std::string canonical_xitem(const std::string& name) {
    return lookup(name, {"m/n", "snr", "masks", "iterations", "time", "angle"}, "xitem");
}

std::string canonical_yitem(const std::string& name) {
    return lookup(name, {"reconError", "measurementError", "correlation"}, "yitem");
}

std::string canonical_dataset(const std::string& name) {
    return lookup(name, {"1DGaussian", "2DImage", "bundleFile"}, "dataset");
}

std::string support_table() {
    std::string out = "supported xitems per dataset:\n";
    for (const char* dataset : {"1DGaussian", "2DImage", "bundleFile"}) {
        out += std::string("  ") + dataset + ":";
        for (const auto& x : dataset_xitems(dataset)) out += " " + x;
        out += "\n";
    }
    out += "  (masks is only used for the 2DImage dataset; bundleFile has no ground truth, so only "
           "measurementError)\n";
    return out;
}

void validate(BenchmarkConfig& config) {
    config.xitem = canonical_xitem(config.xitem);
    config.yitem = canonical_yitem(config.yitem);
    config.dataset = canonical_dataset(config.dataset);
    auto& p = config.params;
    p.policy = lookup(p.policy, {"median", "average", "best", "successrate"}, "policy");

    if (config.algorithms.empty()) fail(ErrorCode::InvalidValue, "benchmark: the algorithms list is empty");
    if (config.xvals.empty()) fail(ErrorCode::InvalidValue, "benchmark: xvals is empty");
    for (std::size_t i = 0; i < config.xvals.size(); ++i) {
        if (!std::isfinite(config.xvals[i])) fail(ErrorCode::InvalidValue, "benchmark: xvals must be finite");
        if (i > 0 && !(config.xvals[i] > config.xvals[i - 1])) {
            fail(ErrorCode::InvalidValue, "benchmark: xvals must be strictly increasing");
        }
    }
    if (p.num_trials < 1) fail(ErrorCode::InvalidValue, "params.numTrials must be >= 1");
    if (p.n < 1) fail(ErrorCode::InvalidValue, "params.n must be >= 1");
    if (!(p.max_time > 0.0)) fail(ErrorCode::InvalidValue, "params.maxTime must be positive");
    if (!(p.m_over_n > 0.0)) fail(ErrorCode::InvalidValue, "params.mOverN must be positive");
    if (p.num_masks < 1) fail(ErrorCode::InvalidValue, "params.numMasks must be >= 1");
    if (p.num_threads < 0) fail(ErrorCode::InvalidValue, "params.numThreads must be >= 0");

    const auto& supported = dataset_xitems(config.dataset);
    if (std::find(supported.begin(), supported.end(), config.xitem) == supported.end()) {
        fail(ErrorCode::Configuration,
             "xitem '" + config.xitem + "' is not supported by dataset '" + config.dataset + "'\n" + support_table());
    }
    if (config.dataset == "bundleFile") {
        if (config.yitem != "measurementError") {
            fail(ErrorCode::Configuration, "dataset 'bundleFile' has no ground truth; use yitem measurementError\n" +
                                               support_table());
        }
        if (p.bundle_path.empty()) fail(ErrorCode::Configuration, "dataset 'bundleFile' needs params.bundlePath");
    }
    if (p.policy == "successrate" && higher_is_better(config.yitem)) {
        fail(ErrorCode::Configuration, "policy 'successrate' is undefined for yitem 'correlation'");
    }
    if (config.xitem == "m/n") {
        for (double v : config.xvals) {
            if (!(v > 0.0)) fail(ErrorCode::InvalidValue, "benchmark: m/n values must be positive");
        }
    }
    if (config.xitem == "masks" || config.xitem == "iterations" || config.xitem == "time") {
        for (double v : config.xvals) {
            if (!(v > 0.0)) fail(ErrorCode::InvalidValue, "benchmark: " + config.xitem + " values must be positive");
        }
    }

    std::set<std::string> labels;
    for (auto& spec : config.algorithms) {
        auto it = spec.overlay.values.find("algorithm");
        if (it == spec.overlay.values.end()) fail(ErrorCode::InvalidValue, "benchmark: algorithm entry without 'algorithm'");
        it->second = canonical_algorithm(it->second);
        resolve_options(spec.overlay); // surfaces unknown keys and bad values before any trial runs
        if (spec.label.empty()) spec.label = it->second;
        if (!labels.insert(spec.label).second) {
            fail(ErrorCode::InvalidValue, "benchmark: duplicate algorithm label '" + spec.label + "'");
        }
    }
}

PhaseProblem benchmark_problem(const BenchmarkConfig& config, double xvalue, int trial, std::uint64_t seed) {
    const auto& p = config.params;
    const std::uint64_t problem_seed =
        mix_seed(mix_seed(seed, hash_double(xvalue)), static_cast<std::uint64_t>(trial));
    RandomSource rng(problem_seed);
    PhaseProblem problem;
    if (config.dataset == "1DGaussian") {
        const double ratio = config.xitem == "m/n" ? xvalue : p.m_over_n;
        problem = build_gaussian_problem(p.n, rounded_positive(ratio * static_cast<double>(p.n)), p.is_complex, rng);
    } else if (config.dataset == "2DImage") {
        const RealMatrix image = p.image_path.empty() ? checkerboard_image(16, 16, 4) : load_pgm(p.image_path);
        const Index masks = config.xitem == "masks" ? rounded_positive(xvalue) : p.num_masks;
        problem = build_image_problem(image, masks, rng);
    } else {
        problem = load_measurement_bundle(p.bundle_path);
    }
    const std::optional<double> snr = config.xitem == "snr" ? std::optional<double>(xvalue) : p.snr_db;
    problem.b0 = add_noise(problem.b0, NoiseSpec{snr}, rng);
    return problem;
}

double aggregate(std::vector<double> values, const std::string& policy, double success_constant,
                 bool higher_is_better) {
    if (values.empty()) fail(ErrorCode::InvalidArgument, "aggregate: no values");
    const auto name = to_lower(policy);
    if (name == "median") {
        std::sort(values.begin(), values.end());
        const std::size_t k = values.size() / 2;
        return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
    }
    if (name == "average") return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (name == "best") {
        return higher_is_better ? *std::max_element(values.begin(), values.end())
                                : *std::min_element(values.begin(), values.end());
    }
    if (name == "successrate") {
        if (higher_is_better) fail(ErrorCode::Configuration, "policy 'successrate' is undefined for correlation");
        const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v < success_constant; });
        return static_cast<double>(hits) / static_cast<double>(values.size());
    }
    fail(ErrorCode::InvalidValue, "unknown policy '" + policy + "'");
}

BenchmarkResult run_benchmark(BenchmarkConfig config, std::uint64_t seed) {
    validate(config);
    const auto& p = config.params;
    const std::size_t num_x = config.xvals.size();
    const std::size_t trials = static_cast<std::size_t>(p.num_trials);
    const std::size_t num_alg = config.algorithms.size();

    // Problems are shared by all algorithms, which is what makes the comparison paired.
    std::vector<PhaseProblem> problems(num_x * trials);
    for (std::size_t v = 0; v < num_x; ++v) {
        for (std::size_t t = 0; t < trials; ++t) {
            problems[v * trials + t] = benchmark_problem(config, config.xvals[v], static_cast<int>(t), seed);
        }
    }

    BenchmarkResult result;
    result.table.resize(num_alg * num_x * trials);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::mutex print_mutex;
    std::exception_ptr first_error;

    auto run_job = [&](std::size_t job) {
        const std::size_t a = job / (num_x * trials);
        const std::size_t v = (job / trials) % num_x;
        const std::size_t t = job % trials;
        const double xvalue = config.xvals[v];
        const PhaseProblem& problem = problems[v * trials + t];
        const auto& spec = config.algorithms[a];

        OptionOverlay overlay = spec.overlay;
        overlay.set("maxTime", format_real(p.max_time));
        if (config.xitem == "iterations") overlay.set("maxIters", std::to_string(rounded_positive(xvalue)));
        if (config.xitem == "time") overlay.set("maxTime", format_real(xvalue));
        if (config.xitem == "angle") {
            overlay.set("initMethod", "angle");
            overlay.set("initAngle", format_real(xvalue));
        }
        overlay.xt = problem.xt;
        const SolverOptions opts = resolve_options(overlay);

        const std::uint64_t solver_seed = mix_seed(
            mix_seed(mix_seed(seed, hash_double(xvalue)), static_cast<std::uint64_t>(t)), 0x736f6c7665ULL);
        RandomSource rng(solver_seed);
        const auto start = std::chrono::steady_clock::now();
        const auto solved = solve_resolved(problem.op, problem.b0, opts, rng);
        const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        TrialResult row;
        row.algorithm = spec.label;
        row.xvalue = xvalue;
        row.trial = static_cast<int>(t);
        if (config.yitem == "reconError") {
            row.yvalue = recon_error(solved.x, *problem.xt);
        } else if (config.yitem == "correlation") {
            row.yvalue = correlation(solved.x, *problem.xt);
        } else {
            row.yvalue = problem.b0.norm() > 0.0 ? measurement_error(*problem.op, solved.x, problem.b0) : 0.0;
        }
        row.runtime = p.record_runtime ? runtime : 0.0;
        row.iterations = solved.outs.iteration_count;
        row.termination = to_string(solved.outs.termination);
        if (p.record_signals) row.signal = solved.x;
        if (p.verbose) {
            std::lock_guard lock(print_mutex);
            std::printf("%s %s=%s trial %zu: %s=%.6e (%d iterations, %s)\n", row.algorithm.c_str(),
                        config.xitem.c_str(), format_real(xvalue).c_str(), t, config.yitem.c_str(), row.yvalue,
                        row.iterations, row.termination.c_str());
        }
        result.table[job] = std::move(row);
    };

    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= result.table.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                run_job(job);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::size_t threads = p.num_threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                             : static_cast<std::size_t>(p.num_threads);
    threads = std::min(threads, result.table.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t a = 0; a < num_alg; ++a) {
        Curve curve;
        curve.algorithm = config.algorithms[a].label;
        for (std::size_t v = 0; v < num_x; ++v) {
            std::vector<double> values;
            for (std::size_t t = 0; t < trials; ++t) values.push_back(result.table[(a * num_x + v) * trials + t].yvalue);
            curve.xvals.push_back(config.xvals[v]);
            curve.yvals.push_back(aggregate(values, p.policy, p.success_constant, higher_is_better(config.yitem)));
        }
        result.curves.push_back(std::move(curve));
    }
    result.config = std::move(config);
    return result;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string results_csv(const BenchmarkResult& result) {
    std::ostringstream out;
    out << "algorithm,xitem,xvalue,yitem,trial,yvalue,runtime_s,iterations,termination\n";
    for (const auto& row : result.table) {
        out << row.algorithm << ',' << result.config.xitem << ',' << format_double(row.xvalue) << ','
            << result.config.yitem << ',' << row.trial << ',' << format_double(row.yvalue) << ','
            << format_double(row.runtime) << ',' << row.iterations << ',' << row.termination << '\n';
    }
    return out.str();
}

namespace {

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string plot_svg(const BenchmarkResult& result) {
    constexpr double width = 640, height = 420, left = 70, right = 170, top = 30, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const bool log_y = !higher_is_better(result.config.yitem) && result.config.params.policy != "successrate";

    double x_min = result.config.xvals.front();
    double x_max = result.config.xvals.back();
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    double y_min = 0.0, y_max = 1.0;
    if (log_y) {
        double lo = 1e300, hi = 0.0;
        for (const auto& c : result.curves) {
            for (double y : c.yvals) {
                if (y > 0.0) {
                    lo = std::min(lo, y);
                    hi = std::max(hi, y);
                }
            }
        }
        if (hi == 0.0) {
            lo = 1e-16;
            hi = 1.0;
        }
        y_min = std::floor(std::log10(lo));
        y_max = std::ceil(std::log10(hi));
        if (y_max <= y_min) y_max = y_min + 1.0;
    } else {
        for (const auto& c : result.curves) {
            for (double y : c.yvals) y_max = std::max(y_max, y);
        }
    }
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
        double t;
        if (log_y) {
            const double ly = y > 0.0 ? std::log10(y) : y_min;
            t = (std::clamp(ly, y_min, y_max) - y_min) / (y_max - y_min);
        } else {
            t = (y - y_min) / (y_max - y_min);
        }
        return top + (1.0 - t) * plot_h;
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double x : result.config.xvals) {
        s << "<text x=\"" << svg_number(px(x)) << "\" y=\"" << svg_number(top + plot_h + 18)
          << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    }
    if (log_y) {
        for (double e = y_min; e <= y_max; e += 1.0) {
            s << "<text x=\"" << left - 6 << "\" y=\"" << svg_number(py(std::pow(10.0, e)) + 4)
              << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
        }
    } else {
        for (int k = 0; k <= 4; ++k) {
            const double y = y_min + (y_max - y_min) * k / 4.0;
            s << "<text x=\"" << left - 6 << "\" y=\"" << svg_number(py(y) + 4) << "\" text-anchor=\"end\">"
              << tick_label(y) << "</text>\n";
        }
    }
    s << "<text x=\"" << svg_number(left + plot_w / 2) << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(result.config.xitem) << "</text>\n";
    s << "<text x=\"18\" y=\"" << svg_number(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << svg_number(top + plot_h / 2) << ")\">" << xml_escape(result.config.yitem)
      << (log_y ? " (log)" : "") << "</text>\n";
    for (std::size_t k = 0; k < result.curves.size(); ++k) {
        const auto& c = result.curves[k];
        const char* color = palette[k % std::size(palette)];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < c.xvals.size(); ++i) {
            s << (i ? " " : "") << svg_number(px(c.xvals[i])) << ',' << svg_number(py(c.yvals[i]));
        }
        s << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        s << "<line x1=\"" << width - right + 12 << "\" y1=\"" << svg_number(ly - 4) << "\" x2=\""
          << width - right + 36 << "\" y2=\"" << svg_number(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << width - right + 42 << "\" y=\"" << svg_number(ly) << "\">" << xml_escape(c.algorithm)
          << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::vector<std::filesystem::path> emit_results(const BenchmarkResult& result, const std::filesystem::path& out_dir) {
    if (result.curves.empty()) fail(ErrorCode::Configuration, "emit_results: no curves to write");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string& name, const std::string& content) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        out.close();
        if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
        written.push_back(path);
    };
    write("results.csv", results_csv(result));
    write("plot.svg", plot_svg(result));
    if (result.config.params.record_signals) {
        std::ostringstream s;
        s << "algorithm,xvalue,trial,index,real,imag\n";
        for (const auto& row : result.table) {
            if (!row.signal) continue;
            for (Index i = 0; i < row.signal->size(); ++i) {
                s << row.algorithm << ',' << format_double(row.xvalue) << ',' << row.trial << ',' << i << ','
                  << format_double((*row.signal)[i].real()) << ',' << format_double((*row.signal)[i].imag()) << '\n';
            }
        }
        write("signals.csv", s.str());
    }
    return written;
}

} // namespace phasepack
