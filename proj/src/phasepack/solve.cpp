#include "phasepack/solve.hpp"

#include <cstdio>

#include "phasepack/initializers.hpp"
#include "phasepack/metrics.hpp"
#include "phasepack/solvers.hpp"

namespace phasepack {

const std::map<std::string, SolverRoutine>& algorithm_registry() {
    static const std::map<std::string, SolverRoutine> registry{
        {"amplitudeflow", solve_amplitudeflow},
        {"coordinatedescent", solve_coordinate_descent},
        {"fienup", solve_fienup},
        {"gerchbergsaxton", solve_gerchberg_saxton},
        {"kaczmarz", solve_kaczmarz},
        {"phaselamp", solve_phaselamp},
        {"phasemax", solve_phasemax},
        {"raf", solve_raf},
        {"rwf", solve_rwf},
        {"taf", solve_taf},
        {"twf", solve_twf},
        {"wirtflow", solve_wirtflow},
    };
    return registry;
}

namespace {

OperatorPtr prepare_operator(const OperatorPtr& op, std::optional<Index> n) {
    if (!op) fail(ErrorCode::InvalidArgument, "solve: operator is null");
    auto fn = std::dynamic_pointer_cast<const FunctionOperator>(op);
    if (!fn) {
        if (n && *n != op->cols()) {
            fail(ErrorCode::DimensionMismatch, "solve: n = " + std::to_string(*n) +
                                                   " but the operator has " + std::to_string(op->cols()) +
                                                   " columns");
        }
        return op;
    }
    if (!fn->has_adjoint()) {
        fail(ErrorCode::Configuration, "solve: a function-handle operator requires its adjoint (At)");
    }
    if (!n && !fn->has_signal_length()) {
        fail(ErrorCode::Configuration, "solve: a function-handle operator requires the signal length n");
    }
    if (n && fn->has_signal_length() && *n != fn->cols()) {
        fail(ErrorCode::DimensionMismatch, "solve: n disagrees with the operator's signal length");
    }
    if (n && !fn->has_signal_length()) return fn->with_signal_length(*n);
    return op;
}

} // namespace

SolveResult solve_resolved(const OperatorPtr& op, const RealVector& b0, const SolverOptions& opts,
                           RandomSource& rng) {
    validate(opts);
    if (b0.size() != op->rows()) {
        fail(ErrorCode::DimensionMismatch, "solve: b0 has length " + std::to_string(b0.size()) + ", expected m = " +
                                               std::to_string(op->rows()));
    }
    if (op->cols() < 1) fail(ErrorCode::InvalidArgument, "solve: signal length must be >= 1");
    PhaseProblem problem{op, b0, opts.xt};
    validate(problem);

    const auto& registry = algorithm_registry();
    const auto routine = registry.find(canonical_algorithm(opts.algorithm));

    auto init = initialize(problem, init_options(opts), rng);
    SolveResult result;
    result.resolved = opts;
    result.outs = routine->second(problem, init.x0, opts, rng);
    if (init.warning) result.outs.warnings.insert(result.outs.warnings.begin(), *init.warning);
    result.x = result.outs.x;

    if (opts.verbose >= 1) {
        std::printf("%s: %d iterations, %s, %.3fs", opts.algorithm.c_str(), result.outs.iteration_count,
                    to_string(result.outs.termination).c_str(), result.outs.total_time);
        if (opts.xt) std::printf(", reconError %.6e", recon_error(result.x, *opts.xt));
        std::printf("\n");
    }
    return result;
}

SolveResult solve_phase_retrieval(const OperatorPtr& op, const RealVector& b0, std::optional<Index> n,
                                  const OptionOverlay& overlay, RandomSource& rng) {
    const OperatorPtr prepared = prepare_operator(op, n);
    const SolverOptions opts = resolve_options(overlay);
    return solve_resolved(prepared, b0, opts, rng);
}

} // namespace phasepack
