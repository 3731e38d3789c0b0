#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasepack/common.hpp"
#include "phasepack/losses.hpp"
#include "phasepack/options.hpp"
#include "phasepack/recording.hpp"

namespace phasepack {

/// Objective and Wirtinger gradient for the first-order engine.
struct GradientSpec {
    std::string name;
    std::function<double(const ComplexVector&)> objective; // optional; falls back to evaluate()
    std::function<LossValue(const ComplexVector&)> evaluate;
    /// Called before iteration k (k = completed iterations, k >= 1). Returns
    /// true when the objective changed (weights or truncation refreshed);
    /// the engine then re-evaluates and drops its search-direction memory.
    std::function<bool(const ComplexVector& x, int k)> refresh;
    /// Optional post-step correction of the iterate; returns true if x changed.
    std::function<bool(ComplexVector& x)> project;
};

struct EngineSettings {
    SearchMethod method = SearchMethod::SteepestDescent;
    int max_iters = 1000;
    int lbfgs_memory = 5;
    double shrink = 0.5;
    double sufficient_decrease = 1.0e-4;
    int max_backtracks = 50;
};

EngineSettings engine_settings(const SolverOptions& opts);

/// Called after every accepted step with the iterate, the relative gradient
/// norm ||g|| / ||g_0|| and the 1-based iteration; a value stops the run.
using EngineMonitor = std::function<std::optional<Termination>(const ComplexVector& x, double residual, int iteration)>;

struct EngineResult {
    ComplexVector x;
    int iterations = 0;
    Termination reason = Termination::MaxIterations;
    std::vector<double> objective_trace; // objective after each accepted step, starting with f(x0)
    std::vector<char> refreshed;         // per accepted step: objective was refreshed before it
};

/// Steepest descent, Polak-Ribiere+ nonlinear CG or L-BFGS with a
/// backtracking Armijo line search on 2 Re<g, d>. Initial trial steps come
/// from Barzilai-Borwein (steepest descent), the previous step scaled by the
/// slope ratio (NCG) or 1 (L-BFGS). Fifty failed halvings end the run with
/// Termination::Stagnation.
EngineResult run_gradient_engine(const GradientSpec& spec, ComplexVector x0, const EngineSettings& settings,
                                 const EngineMonitor& monitor);

/// Engine driven by the shared Recorder (residual = relative gradient norm).
SolveOutputs gradient_descent_engine(const GradientSpec& spec, ComplexVector x0, const SolverOptions& opts,
                                     Recorder& recorder);

} // namespace phasepack
