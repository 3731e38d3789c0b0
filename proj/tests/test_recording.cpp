#include <doctest.h>

#include "phasepack/recording.hpp"

using namespace phasepack;

namespace {

ConvergenceState state(int iteration, double elapsed, std::optional<double> recon, double residual) {
    ConvergenceState s;
    s.iteration = iteration;
    s.elapsed = elapsed;
    s.recon_error = recon;
    s.residual = residual;
    return s;
}

} // namespace

TEST_CASE("check_convergence budgets") {
    SolverOptions opts; // tol 1e-6, maxIters 1000, maxTime 120
    CHECK(check_convergence(state(1, 0.0, 0.0, 1.0), opts) == Termination::ToleranceReached);
    CHECK(check_convergence(state(5, 121.0, 0.5, 1.0), opts) == Termination::MaxTime);
    CHECK(check_convergence(state(5, 120.0, 0.5, 1.0), opts) == std::nullopt);
    CHECK(check_convergence(state(1000, 0.0, 0.5, 1.0), opts) == Termination::MaxIterations);
    CHECK(check_convergence(state(999, 0.0, 0.5, 1.0), opts) == std::nullopt);

    // With xt the residual is ignored; without it the residual decides.
    CHECK(check_convergence(state(3, 0.0, 0.5, 1e-9), opts) == std::nullopt);
    CHECK(check_convergence(state(3, 0.0, std::nullopt, 1e-9), opts) == Termination::ToleranceReached);
    CHECK(check_convergence(state(3, 0.0, std::nullopt, 1e-6), opts) == std::nullopt);

    // Tolerance wins over an exhausted budget at the same step.
    CHECK(check_convergence(state(1000, 500.0, 0.0, 1.0), opts) == Termination::ToleranceReached);
}

TEST_CASE("recorder series follow the flags") {
    const auto op = DenseOperator::identity(2);
    RealVector b(2);
    b << 1, 2;
    ComplexVector exact(2);
    exact << 1, Complex(0, 2);

    SolverOptions opts;
    opts.record_measurement_errors = true;
    {
        Recorder rec(*op, b, opts);
        CHECK_FALSE(rec.record(exact, 0.5).has_value());
        const SolveOutputs out = rec.finish(exact, Termination::MaxIterations);
        CHECK(out.measurement_errors == std::vector<double>{0.0});
        CHECK(out.residuals == std::vector<double>{0.5});
        CHECK(out.times.size() == 1);
        CHECK(out.recon_errors.empty());
        CHECK(out.iteration_count == 1);
    }

    opts.xt = exact;
    {
        Recorder rec(*op, b, opts);
        CHECK(rec.record(exact, 0.5) == Termination::ToleranceReached);
        const SolveOutputs out = rec.finish(exact, Termination::ToleranceReached);
        CHECK(out.residuals.empty());
        CHECK(out.recon_errors.size() == 1);
        CHECK(out.recon_errors[0] < 1e-15);
    }

    SolverOptions quiet;
    quiet.record_residuals = false;
    quiet.record_times = false;
    {
        Recorder rec(*op, b, quiet);
        rec.record(exact, 0.5);
        const SolveOutputs out = rec.finish(exact, Termination::MaxIterations);
        CHECK(out.residuals.empty());
        CHECK(out.measurement_errors.empty());
        CHECK(out.recon_errors.empty());
        CHECK(out.times.empty());
        CHECK(out.total_time >= 0.0);
    }
}

TEST_CASE("recordReconErrors needs xt") {
    const auto op = DenseOperator::identity(2);
    const RealVector b = RealVector::Ones(2);
    SolverOptions opts;
    opts.record_recon_errors = true;
    try {
        Recorder rec(*op, b, opts);
        FAIL("expected configuration error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Configuration);
    }
}

TEST_CASE("termination names") {
    CHECK(to_string(Termination::ToleranceReached) == "tolReached");
    CHECK(to_string(Termination::MaxIterations) == "maxIters");
    CHECK(to_string(Termination::MaxTime) == "maxTime");
    CHECK(to_string(Termination::Stagnation) == "stagnation");
}
