#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "phasepack/common.hpp"
#include "phasepack/operators.hpp"
#include "phasepack/options.hpp"

namespace phasepack {

enum class Termination { ToleranceReached, MaxIterations, MaxTime, Stagnation };

std::string to_string(Termination reason);

struct SolveOutputs {
    ComplexVector x;
    int iteration_count = 0;
    std::vector<double> residuals;
    std::vector<double> measurement_errors;
    std::vector<double> recon_errors;
    std::vector<double> times;
    double total_time = 0.0;
    Termination termination = Termination::MaxIterations;
    std::vector<std::string> warnings;
};

struct ConvergenceState {
    int iteration = 0;
    double elapsed = 0.0;
    std::optional<double> recon_error; // present iff xt is known
    double residual = 0.0;
};

/// tolReached when (xt known and recon error < tol) or (xt unknown and
/// residual < tol); otherwise maxIters, then maxTime.
std::optional<Termination> check_convergence(const ConvergenceState& state, const SolverOptions& opts);

/// Per-call iteration bookkeeping shared by every solver: appends the
/// flagged series, prints verbose lines and applies the stopping rules.
class Recorder {
public:
    Recorder(const MeasurementOperator& op, const RealVector& b, const SolverOptions& opts);

    /// Records iteration iteration()+1 at iterate x and reports whether to stop.
    std::optional<Termination> record(const ComplexVector& x, double residual);

    int iteration() const noexcept { return outs_.iteration_count; }
    double elapsed() const;
    void warn(std::string message);

    SolveOutputs finish(ComplexVector x, Termination reason);

private:
    const MeasurementOperator& op_;
    const RealVector& b_;
    const SolverOptions& opts_;
    std::chrono::steady_clock::time_point start_;
    SolveOutputs outs_;
};

} // namespace phasepack
