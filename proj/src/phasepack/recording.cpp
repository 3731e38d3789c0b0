#include "phasepack/recording.hpp"

#include <cstdio>

#include "phasepack/metrics.hpp"

namespace phasepack {

std::string to_string(Termination reason) {
    switch (reason) {
    case Termination::ToleranceReached: return "tolReached";
    case Termination::MaxIterations: return "maxIters";
    case Termination::MaxTime: return "maxTime";
    case Termination::Stagnation: return "stagnation";
    }
    return "unknown";
}

std::optional<Termination> check_convergence(const ConvergenceState& state, const SolverOptions& opts) {
    const double error = state.recon_error ? *state.recon_error : state.residual;
    if (error < opts.tol) return Termination::ToleranceReached;
    if (state.iteration >= opts.max_iters) return Termination::MaxIterations;
    if (state.elapsed > opts.max_time) return Termination::MaxTime;
    return std::nullopt;
}

Recorder::Recorder(const MeasurementOperator& op, const RealVector& b, const SolverOptions& opts)
    : op_(op), b_(b), opts_(opts), start_(std::chrono::steady_clock::now()) {
    if (opts.record_recon_errors && !opts.xt) {
        fail(ErrorCode::Configuration, "recordReconErrors is set: opts.xt must be provided");
    }
    if (opts.xt) require_length(*opts.xt, op.cols(), "opts.xt");
}

double Recorder::elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void Recorder::warn(std::string message) { outs_.warnings.push_back(std::move(message)); }

std::optional<Termination> Recorder::record(const ComplexVector& x, double residual) {
    ConvergenceState state;
    state.iteration = ++outs_.iteration_count;
    if (opts_.xt) state.recon_error = recon_error(x, *opts_.xt);
    state.residual = residual;

    if (opts_.record_residuals && !opts_.xt) outs_.residuals.push_back(residual);
    if (opts_.record_measurement_errors) {
        outs_.measurement_errors.push_back(b_.norm() > 0.0 ? measurement_error(op_, x, b_) : 0.0);
    }
    if (state.recon_error) outs_.recon_errors.push_back(*state.recon_error);
    state.elapsed = elapsed();
    if (opts_.record_times) outs_.times.push_back(state.elapsed);

    if (opts_.verbose >= 2) {
        std::printf("iter %6d  residual %.6e  %s%.3fs\n", state.iteration, residual,
                    state.recon_error ? ("reconError " + std::to_string(*state.recon_error) + "  ").c_str() : "",
                    state.elapsed);
    }
    return check_convergence(state, opts_);
}

SolveOutputs Recorder::finish(ComplexVector x, Termination reason) {
    outs_.x = std::move(x);
    outs_.termination = reason;
    outs_.total_time = elapsed();
    return std::move(outs_);
}

} // namespace phasepack
