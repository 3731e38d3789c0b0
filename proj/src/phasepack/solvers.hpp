#pragma once

#include "phasepack/common.hpp"
#include "phasepack/engine.hpp"
#include "phasepack/options.hpp"
#include "phasepack/problems.hpp"
#include "phasepack/random.hpp"
#include "phasepack/recording.hpp"

namespace phasepack {

// Every solver takes the problem, the initial iterate and resolved options
// and returns the recorded outputs. The problem's xt is ignored; stopping on
// reconstruction error uses opts.xt.

SolveOutputs solve_wirtflow(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource& rng);
SolveOutputs solve_twf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource& rng);
SolveOutputs solve_rwf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource& rng);
SolveOutputs solve_amplitudeflow(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                                 RandomSource& rng);
SolveOutputs solve_taf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource& rng);
SolveOutputs solve_raf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource& rng);

/// y = b .* phase(Ax), then x = argmin ||Ax - y|| (warm-started inner CG).
SolveOutputs solve_gerchberg_saxton(const PhaseProblem& problem, const ComplexVector& x0,
                                    const SolverOptions& opts, RandomSource& rng);

/// Gerchberg-Saxton with the data estimate relaxed in measurement space:
/// y = (1 - beta) y + beta b .* phase(Ax), y starting at A x0.
SolveOutputs solve_fienup(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                          RandomSource& rng);

/// Row-action projections; one recorded iteration is a sweep of m updates.
SolveOutputs solve_kaczmarz(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource& rng);

/// Exact minimization of the intensity loss along e_j and i e_j, cyclic in j.
/// One recorded iteration is a pass over all n coordinates.
SolveOutputs solve_coordinate_descent(const PhaseProblem& problem, const ComplexVector& x0,
                                      const SolverOptions& opts, RandomSource& rng);

/// Penalized continuation for max Re<x0, x> s.t. |Ax| <= b.
SolveOutputs solve_phasemax(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource& rng);

/// Repeated PhaseMax, each output (rescaled to estimate_signal_norm(b))
/// becoming the next anchor.
SolveOutputs solve_phaselamp(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                             RandomSource& rng);

/// Real roots of c3 t^3 + c2 t^2 + c1 t + c0 (c3 != 0), Newton-polished.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0);

} // namespace phasepack
