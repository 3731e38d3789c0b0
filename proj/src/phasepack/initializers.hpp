#pragma once

#include <functional>
#include <optional>
#include <string>

#include "phasepack/common.hpp"
#include "phasepack/options.hpp"
#include "phasepack/problems.hpp"
#include "phasepack/random.hpp"

namespace phasepack {

enum class InitMethod { Spectral, Truncated, Amplitude, Weighted, Orthogonal, Angle };

InitMethod parse_init_method(std::string_view name);

struct InitOptions {
    InitMethod method = InitMethod::Orthogonal;
    int power_iters = 100;
    double power_tol = 1.0e-5;
    double truncation_alpha = 3.0;
    double amplitude_fraction = 1.0 / 6.0;
    double orthogonal_fraction = 0.5;
    double weight_exponent = 1.0;
    double angle = 0.0; // radians, angle initializer only
};

InitOptions init_options(const SolverOptions& opts);

struct EigenPair {
    ComplexVector vector; // unit norm, largest-magnitude entry real and >= 0
    double value;
};

using LinearMap = std::function<ComplexVector(const ComplexVector&)>;

/// Leading eigenpair of a Hermitian positive semidefinite map by power
/// iteration from a random start. Stops when the phase-aligned change
/// between successive iterates drops below tol, or after iters steps.
/// A real start keeps the iterates real for real operators.
EigenPair power_method(const LinearMap& apply, Index n, int iters, double tol, RandomSource& rng,
                       bool real_start = false);

struct Initialization {
    ComplexVector x0;
    std::optional<std::string> warning;
};

Initialization init_spectral(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);
Initialization init_truncated(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);
Initialization init_amplitude(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);
Initialization init_weighted(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);
Initialization init_orthogonal(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);
Initialization init_angle(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);

Initialization initialize(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng);

/// Indices of the ceil(fraction * m) largest (or smallest) entries of b,
/// ties broken by index.
std::vector<Index> select_by_magnitude(const RealVector& b, double fraction, bool largest);

} // namespace phasepack
