#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "phasepack/options.hpp"
#include "phasepack/problems.hpp"
#include "phasepack/random.hpp"
#include "phasepack/recording.hpp"

namespace phasepack {

using SolverRoutine =
    std::function<SolveOutputs(const PhaseProblem&, const ComplexVector& x0, const SolverOptions&, RandomSource&)>;

/// Lowercased algorithm name -> solver routine.
const std::map<std::string, SolverRoutine>& algorithm_registry();

struct SolveResult {
    ComplexVector x;
    SolveOutputs outs;
    SolverOptions resolved;
};

/// Resolves options, validates shapes, runs the initializer and the solver.
/// For matrix-free operators the adjoint and the signal length n are
/// required; for explicit matrices n may be omitted.
SolveResult solve_phase_retrieval(const OperatorPtr& op, const RealVector& b0, std::optional<Index> n,
                                  const OptionOverlay& overlay, RandomSource& rng);

/// Same, with options already resolved.
SolveResult solve_resolved(const OperatorPtr& op, const RealVector& b0, const SolverOptions& opts,
                           RandomSource& rng);

} // namespace phasepack
