#include "phasepack/phasepack.h"

#include <cstring>
#include <new>
#include <string>

#include "phasepack/benchmark.hpp"
#include "phasepack/metrics.hpp"
#include "phasepack/operators.hpp"
#include "phasepack/options.hpp"
#include "phasepack/problems.hpp"
#include "phasepack/random.hpp"
#include "phasepack/solve.hpp"

using namespace phasepack;

struct pp_operator {
    OperatorPtr op;
};

struct pp_problem {
    PhaseProblem problem;
};

struct pp_options {
    OptionOverlay overlay;
};

struct pp_solution {
    SolveResult result;
    std::string termination;
};

struct pp_benchmark {
    BenchmarkConfig config;
};

struct pp_benchmark_result {
    BenchmarkResult result;
};

namespace {

thread_local std::string last_error;

pp_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return PP_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return PP_ERR_DIMENSION;
    case ErrorCode::UnknownKey: return PP_ERR_UNKNOWN_KEY;
    case ErrorCode::InvalidValue: return PP_ERR_INVALID_VALUE;
    case ErrorCode::UnknownName: return PP_ERR_UNKNOWN_NAME;
    case ErrorCode::Configuration: return PP_ERR_CONFIGURATION;
    case ErrorCode::Capability: return PP_ERR_CAPABILITY;
    case ErrorCode::Parse: return PP_ERR_PARSE;
    case ErrorCode::Integrity: return PP_ERR_INTEGRITY;
    case ErrorCode::Io: return PP_ERR_IO;
    case ErrorCode::DegenerateInput: return PP_ERR_DEGENERATE;
    case ErrorCode::MissingGroundTruth: return PP_ERR_MISSING_TRUTH;
    case ErrorCode::ZeroOperator: return PP_ERR_ZERO_OPERATOR;
    }
    return PP_ERR_INTERNAL;
}

template <class F>
pp_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return PP_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return PP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return PP_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return PP_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

ComplexVector complex_in(const double* data, std::size_t n) {
    ComplexVector v(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Index>(i)] = Complex(data[2 * i], data[2 * i + 1]);
    return v;
}

void complex_out(const ComplexVector& v, double* out) {
    for (Index i = 0; i < v.size(); ++i) {
        out[2 * i] = v[i].real();
        out[2 * i + 1] = v[i].imag();
    }
}

void text_out(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
        const std::size_t k = std::min(cap - 1, s.size());
        std::memcpy(buf, s.data(), k);
        buf[k] = '\0';
    }
}

template <class T>
T* create(T value) {
    return new T(std::move(value));
}

} // namespace

extern "C" {

const char* pp_version(void) { return "0.1.0"; }

const char* pp_status_name(pp_status status) {
    switch (status) {
    case PP_OK: return "ok";
    case PP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PP_ERR_DIMENSION: return "dimension mismatch";
    case PP_ERR_UNKNOWN_KEY: return "unknown key";
    case PP_ERR_INVALID_VALUE: return "invalid value";
    case PP_ERR_UNKNOWN_NAME: return "unknown name";
    case PP_ERR_CONFIGURATION: return "configuration error";
    case PP_ERR_CAPABILITY: return "capability error";
    case PP_ERR_PARSE: return "parse error";
    case PP_ERR_INTEGRITY: return "integrity error";
    case PP_ERR_IO: return "i/o error";
    case PP_ERR_DEGENERATE: return "degenerate input";
    case PP_ERR_MISSING_TRUTH: return "missing ground truth";
    case PP_ERR_ZERO_OPERATOR: return "zero operator";
    case PP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* pp_last_error(void) { return last_error.c_str(); }

// ---- operators

pp_status pp_operator_dense(const double* entries, size_t m, size_t n, pp_operator** out) {
    return guarded([&] {
        need(entries, "entries");
        need(out, "out");
        if (m == 0 || n == 0) fail(ErrorCode::InvalidArgument, "dense operator: m and n must be >= 1");
        ComplexMatrix a(static_cast<Index>(m), static_cast<Index>(n));
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < n; ++j) {
                const size_t k = 2 * (i * n + j);
                a(static_cast<Index>(i), static_cast<Index>(j)) = Complex(entries[k], entries[k + 1]);
            }
        }
        *out = create(pp_operator{std::make_shared<DenseOperator>(std::move(a))});
    });
}

pp_status pp_operator_masked_fourier(size_t height, size_t width, size_t num_masks, const double* masks,
                                     pp_operator** out) {
    return guarded([&] {
        need(masks, "masks");
        need(out, "out");
        const size_t size = height * width;
        std::vector<ComplexVector> list;
        for (size_t l = 0; l < num_masks; ++l) list.push_back(complex_in(masks + 2 * l * size, size));
        *out = create(pp_operator{std::make_shared<MaskedFourierOperator>(
            static_cast<Index>(height), static_cast<Index>(width), std::move(list))});
    });
}

pp_status pp_operator_callbacks(size_t m, size_t n, pp_apply_fn forward, pp_apply_fn adjoint, void* user,
                                pp_operator** out) {
    return guarded([&] {
        need(reinterpret_cast<void*>(forward), "forward");
        need(out, "out");
        const Index rows = static_cast<Index>(m);
        FunctionOperator::Map fwd = [forward, user, rows](const ComplexVector& x) {
            ComplexVector y(rows);
            if (forward(user, reinterpret_cast<const double*>(x.data()), reinterpret_cast<double*>(y.data())) != 0) {
                fail(ErrorCode::InvalidArgument, "forward callback reported failure");
            }
            return y;
        };
        FunctionOperator::AdjointMap adj;
        if (adjoint) {
            adj = [adjoint, user](const ComplexVector& y, Index cols) {
                ComplexVector x(cols);
                if (adjoint(user, reinterpret_cast<const double*>(y.data()), reinterpret_cast<double*>(x.data())) != 0) {
                    fail(ErrorCode::InvalidArgument, "adjoint callback reported failure");
                }
                return x;
            };
        }
        std::optional<Index> length;
        if (n > 0) length = static_cast<Index>(n);
        *out = create(pp_operator{std::make_shared<FunctionOperator>(rows, length, std::move(fwd), std::move(adj))});
    });
}

void pp_operator_free(pp_operator* op) { delete op; }

size_t pp_operator_rows(const pp_operator* op) { return op ? static_cast<size_t>(op->op->rows()) : 0; }
size_t pp_operator_cols(const pp_operator* op) { return op ? static_cast<size_t>(op->op->cols()) : 0; }

pp_status pp_operator_forward(const pp_operator* op, const double* x, double* y) {
    return guarded([&] {
        need(op, "op");
        need(x, "x");
        need(y, "y");
        complex_out(op->op->forward(complex_in(x, static_cast<size_t>(op->op->cols()))), y);
    });
}

pp_status pp_operator_adjoint(const pp_operator* op, const double* y, double* x) {
    return guarded([&] {
        need(op, "op");
        need(y, "y");
        need(x, "x");
        complex_out(op->op->adjoint(complex_in(y, static_cast<size_t>(op->op->rows()))), x);
    });
}

pp_status pp_operator_adjoint_test(const pp_operator* op, int trials, uint64_t seed, double* worst) {
    return guarded([&] {
        need(op, "op");
        need(worst, "worst");
        RandomSource rng(seed);
        *worst = adjoint_dot_test(*op->op, trials, rng);
    });
}

// ---- problems

pp_status pp_problem_gaussian(size_t n, size_t m, int is_complex, uint64_t seed, pp_problem** out) {
    return guarded([&] {
        need(out, "out");
        RandomSource rng(seed);
        *out = create(pp_problem{
            build_gaussian_problem(static_cast<Index>(n), static_cast<Index>(m), is_complex != 0, rng)});
    });
}

pp_status pp_problem_image(const double* pixels, size_t height, size_t width, size_t num_masks, uint64_t seed,
                           pp_problem** out) {
    return guarded([&] {
        need(out, "out");
        RealMatrix image;
        if (pixels) {
            image.resize(static_cast<Index>(height), static_cast<Index>(width));
            for (size_t i = 0; i < height; ++i) {
                for (size_t j = 0; j < width; ++j) {
                    image(static_cast<Index>(i), static_cast<Index>(j)) = pixels[i * width + j];
                }
            }
        } else {
            image = checkerboard_image(16, 16, 4);
        }
        RandomSource rng(seed);
        *out = create(pp_problem{build_image_problem(image, static_cast<Index>(num_masks), rng)});
    });
}

pp_status pp_problem_image_file(const char* pgm_path, size_t num_masks, uint64_t seed, pp_problem** out) {
    return guarded([&] {
        need(pgm_path, "pgm_path");
        need(out, "out");
        RandomSource rng(seed);
        *out = create(pp_problem{build_image_problem(load_pgm(pgm_path), static_cast<Index>(num_masks), rng)});
    });
}

pp_status pp_problem_create(const pp_operator* op, const double* b0, const double* xt, pp_problem** out) {
    return guarded([&] {
        need(op, "op");
        need(b0, "b0");
        need(out, "out");
        PhaseProblem problem;
        problem.op = op->op;
        problem.b0 = Eigen::Map<const RealVector>(b0, op->op->rows());
        if (xt) problem.xt = complex_in(xt, static_cast<size_t>(op->op->cols()));
        validate(problem);
        *out = create(pp_problem{std::move(problem)});
    });
}

pp_status pp_problem_load_bundle(const char* path, pp_problem** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = create(pp_problem{load_measurement_bundle(path)});
    });
}

pp_status pp_problem_save_bundle(const pp_problem* problem, const char* path) {
    return guarded([&] {
        need(problem, "problem");
        need(path, "path");
        save_measurement_bundle(problem->problem, path);
    });
}

void pp_problem_free(pp_problem* problem) { delete problem; }

pp_status pp_problem_add_noise(pp_problem* problem, double snr_db, uint64_t seed) {
    return guarded([&] {
        need(problem, "problem");
        RandomSource rng(seed);
        problem->problem.b0 = add_noise(problem->problem.b0, NoiseSpec::decibels(snr_db), rng);
    });
}

size_t pp_problem_m(const pp_problem* problem) { return problem ? static_cast<size_t>(problem->problem.m()) : 0; }
size_t pp_problem_n(const pp_problem* problem) { return problem ? static_cast<size_t>(problem->problem.n()) : 0; }
int pp_problem_has_truth(const pp_problem* problem) { return problem && problem->problem.xt ? 1 : 0; }

pp_status pp_problem_measurements(const pp_problem* problem, double* b0) {
    return guarded([&] {
        need(problem, "problem");
        need(b0, "b0");
        const auto& b = problem->problem.b0;
        std::copy(b.data(), b.data() + b.size(), b0);
    });
}

pp_status pp_problem_truth(const pp_problem* problem, double* xt) {
    return guarded([&] {
        need(problem, "problem");
        need(xt, "xt");
        if (!problem->problem.xt) fail(ErrorCode::MissingGroundTruth, "problem has no ground truth");
        complex_out(*problem->problem.xt, xt);
    });
}

pp_status pp_problem_operator(const pp_problem* problem, pp_operator** out) {
    return guarded([&] {
        need(problem, "problem");
        need(out, "out");
        *out = create(pp_operator{problem->problem.op});
    });
}

// ---- options

pp_status pp_options_create(pp_options** out) {
    return guarded([&] {
        need(out, "out");
        *out = create(pp_options{});
    });
}

void pp_options_free(pp_options* opts) { delete opts; }

pp_status pp_options_set(pp_options* opts, const char* key, const char* value) {
    return guarded([&] {
        need(opts, "opts");
        need(key, "key");
        need(value, "value");
        SolverOptions probe;
        set_option(probe, key, value); // rejects unknown keys and malformed values now
        opts->overlay.set(key, value);
    });
}

pp_status pp_options_set_truth(pp_options* opts, const double* xt, size_t n) {
    return guarded([&] {
        need(opts, "opts");
        if (!xt) {
            opts->overlay.xt.reset();
            return;
        }
        ComplexVector v = complex_in(xt, n);
        require_finite(v, "xt");
        opts->overlay.xt = std::move(v);
    });
}

pp_status pp_options_get(const pp_options* opts, const char* key, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(opts, "opts");
        need(key, "key");
        text_out(get_option(resolve_options(opts->overlay), key), buf, cap, needed);
    });
}

size_t pp_option_count(void) { return option_registry().size(); }
const char* pp_option_name(size_t i) { return i < pp_option_count() ? option_registry()[i].name.c_str() : nullptr; }
const char* pp_option_default(size_t i) {
    return i < pp_option_count() ? option_registry()[i].default_value.c_str() : nullptr;
}
const char* pp_option_description(size_t i) {
    return i < pp_option_count() ? option_registry()[i].description.c_str() : nullptr;
}
size_t pp_algorithm_count(void) { return algorithm_names().size(); }
const char* pp_algorithm_name(size_t i) { return i < pp_algorithm_count() ? algorithm_names()[i].c_str() : nullptr; }
size_t pp_init_method_count(void) { return init_method_names().size(); }
const char* pp_init_method_name(size_t i) {
    return i < pp_init_method_count() ? init_method_names()[i].c_str() : nullptr;
}

// ---- solving

namespace {

pp_solution* wrap(SolveResult result) {
    auto* sol = new pp_solution{std::move(result), {}};
    sol->termination = to_string(sol->result.outs.termination);
    return sol;
}

} // namespace

pp_status pp_solve(const pp_problem* problem, const pp_options* opts, uint64_t seed, pp_solution** out) {
    return guarded([&] {
        need(problem, "problem");
        need(out, "out");
        const OptionOverlay overlay = opts ? opts->overlay : OptionOverlay{};
        RandomSource rng(seed);
        *out = wrap(solve_phase_retrieval(problem->problem.op, problem->problem.b0, std::nullopt, overlay, rng));
    });
}

pp_status pp_solve_operator(const pp_operator* op, const double* b0, size_t m, size_t n, const pp_options* opts,
                            uint64_t seed, pp_solution** out) {
    return guarded([&] {
        need(op, "op");
        need(b0, "b0");
        need(out, "out");
        const RealVector b = Eigen::Map<const RealVector>(b0, static_cast<Index>(m));
        const OptionOverlay overlay = opts ? opts->overlay : OptionOverlay{};
        std::optional<Index> length;
        if (n > 0) length = static_cast<Index>(n);
        RandomSource rng(seed);
        *out = wrap(solve_phase_retrieval(op->op, b, length, overlay, rng));
    });
}

void pp_solution_free(pp_solution* sol) { delete sol; }

size_t pp_solution_n(const pp_solution* sol) { return sol ? static_cast<size_t>(sol->result.x.size()) : 0; }

pp_status pp_solution_x(const pp_solution* sol, double* x) {
    return guarded([&] {
        need(sol, "sol");
        need(x, "x");
        complex_out(sol->result.x, x);
    });
}

int pp_solution_iterations(const pp_solution* sol) { return sol ? sol->result.outs.iteration_count : 0; }
double pp_solution_total_time(const pp_solution* sol) { return sol ? sol->result.outs.total_time : 0.0; }
const char* pp_solution_termination(const pp_solution* sol) { return sol ? sol->termination.c_str() : ""; }

size_t pp_solution_series(const pp_solution* sol, pp_series which, double* out) {
    if (!sol) return 0;
    const auto& o = sol->result.outs;
    const std::vector<double>* series = nullptr;
    switch (which) {
    case PP_SERIES_RESIDUALS: series = &o.residuals; break;
    case PP_SERIES_MEASUREMENT_ERRORS: series = &o.measurement_errors; break;
    case PP_SERIES_RECON_ERRORS: series = &o.recon_errors; break;
    case PP_SERIES_TIMES: series = &o.times; break;
    }
    if (!series) return 0;
    if (out) std::copy(series->begin(), series->end(), out);
    return series->size();
}

size_t pp_solution_warning_count(const pp_solution* sol) { return sol ? sol->result.outs.warnings.size() : 0; }

const char* pp_solution_warning(const pp_solution* sol, size_t index) {
    if (!sol || index >= sol->result.outs.warnings.size()) return nullptr;
    return sol->result.outs.warnings[index].c_str();
}

pp_status pp_solution_option(const pp_solution* sol, const char* key, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(sol, "sol");
        need(key, "key");
        text_out(get_option(sol->result.resolved, key), buf, cap, needed);
    });
}

// ---- metrics

pp_status pp_recon_error(const double* x, const double* xt, size_t n, double* out) {
    return guarded([&] {
        need(x, "x");
        need(xt, "xt");
        need(out, "out");
        *out = recon_error(complex_in(x, n), complex_in(xt, n));
    });
}

pp_status pp_correlation(const double* x, const double* xt, size_t n, double* out) {
    return guarded([&] {
        need(x, "x");
        need(xt, "xt");
        need(out, "out");
        *out = correlation(complex_in(x, n), complex_in(xt, n));
    });
}

pp_status pp_measurement_error(const pp_operator* op, const double* x, const double* b, double* out) {
    return guarded([&] {
        need(op, "op");
        need(x, "x");
        need(b, "b");
        need(out, "out");
        const RealVector bv = Eigen::Map<const RealVector>(b, op->op->rows());
        *out = measurement_error(*op->op, complex_in(x, static_cast<size_t>(op->op->cols())), bv);
    });
}

pp_status pp_aggregate(const double* values, size_t count, const char* policy, double success_constant,
                       int higher_is_better, double* out) {
    return guarded([&] {
        need(values, "values");
        need(policy, "policy");
        need(out, "out");
        *out = aggregate(std::vector<double>(values, values + count), policy, success_constant, higher_is_better != 0);
    });
}

// ---- benchmark

pp_status pp_benchmark_create(const char* xitem, const char* yitem, const char* dataset, pp_benchmark** out) {
    return guarded([&] {
        need(xitem, "xitem");
        need(yitem, "yitem");
        need(dataset, "dataset");
        need(out, "out");
        BenchmarkConfig config;
        config.xitem = xitem;
        config.yitem = yitem;
        config.dataset = dataset;
        *out = create(pp_benchmark{std::move(config)});
    });
}

void pp_benchmark_free(pp_benchmark* bench) { delete bench; }

pp_status pp_benchmark_set_xvals(pp_benchmark* bench, const double* xvals, size_t count) {
    return guarded([&] {
        need(bench, "bench");
        if (count > 0) need(xvals, "xvals");
        bench->config.xvals.assign(xvals, xvals + count);
    });
}

pp_status pp_benchmark_set_param(pp_benchmark* bench, const char* key, const char* value) {
    return guarded([&] {
        need(bench, "bench");
        need(key, "key");
        need(value, "value");
        set_benchmark_param(bench->config.params, key, value);
    });
}

pp_status pp_benchmark_add_algorithm(pp_benchmark* bench, const char* label, size_t* index) {
    return guarded([&] {
        need(bench, "bench");
        AlgorithmSpec spec;
        if (label) spec.label = label;
        bench->config.algorithms.push_back(std::move(spec));
        if (index) *index = bench->config.algorithms.size() - 1;
    });
}

pp_status pp_benchmark_algorithm_set(pp_benchmark* bench, size_t index, const char* key, const char* value) {
    return guarded([&] {
        need(bench, "bench");
        need(key, "key");
        need(value, "value");
        if (index >= bench->config.algorithms.size()) fail(ErrorCode::InvalidArgument, "algorithm index out of range");
        SolverOptions probe;
        set_option(probe, key, value);
        bench->config.algorithms[index].overlay.set(key, value);
    });
}

pp_status pp_benchmark_validate(const pp_benchmark* bench) {
    return guarded([&] {
        need(bench, "bench");
        BenchmarkConfig copy = bench->config;
        validate(copy);
    });
}

pp_status pp_benchmark_run(const pp_benchmark* bench, uint64_t seed, pp_benchmark_result** out) {
    return guarded([&] {
        need(bench, "bench");
        need(out, "out");
        *out = create(pp_benchmark_result{run_benchmark(bench->config, seed)});
    });
}

size_t pp_benchmark_param_count(void) { return benchmark_param_registry().size(); }
const char* pp_benchmark_param_name(size_t i) {
    return i < pp_benchmark_param_count() ? benchmark_param_registry()[i].name.c_str() : nullptr;
}
const char* pp_benchmark_param_default(size_t i) {
    return i < pp_benchmark_param_count() ? benchmark_param_registry()[i].default_value.c_str() : nullptr;
}
const char* pp_benchmark_param_description(size_t i) {
    return i < pp_benchmark_param_count() ? benchmark_param_registry()[i].description.c_str() : nullptr;
}

const char* pp_benchmark_support_table(void) {
    static const std::string table = support_table();
    return table.c_str();
}

void pp_benchmark_result_free(pp_benchmark_result* result) { delete result; }

size_t pp_benchmark_result_rows(const pp_benchmark_result* result) { return result ? result->result.table.size() : 0; }

size_t pp_benchmark_result_curve_count(const pp_benchmark_result* result) {
    return result ? result->result.curves.size() : 0;
}

const char* pp_benchmark_result_curve_label(const pp_benchmark_result* result, size_t index) {
    if (!result || index >= result->result.curves.size()) return nullptr;
    return result->result.curves[index].algorithm.c_str();
}

pp_status pp_benchmark_result_curve(const pp_benchmark_result* result, size_t index, double* yvals) {
    return guarded([&] {
        need(result, "result");
        need(yvals, "yvals");
        if (index >= result->result.curves.size()) fail(ErrorCode::InvalidArgument, "curve index out of range");
        const auto& y = result->result.curves[index].yvals;
        std::copy(y.begin(), y.end(), yvals);
    });
}

pp_status pp_benchmark_result_csv(const pp_benchmark_result* result, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(result, "result");
        text_out(results_csv(result->result), buf, cap, needed);
    });
}

pp_status pp_benchmark_result_write(const pp_benchmark_result* result, const char* out_dir) {
    return guarded([&] {
        need(result, "result");
        need(out_dir, "out_dir");
        emit_results(result->result, out_dir);
    });
}

} // extern "C"
