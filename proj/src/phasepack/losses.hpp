#pragma once

#include <vector>

#include "phasepack/common.hpp"
#include "phasepack/operators.hpp"

namespace phasepack {

// All gradients are Wirtinger gradients with respect to conj(x): the
// directional derivative of f at x along d is 2 Re<g, d>.

struct LossValue {
    double value = 0.0;
    ComplexVector gradient;
};

/// (1/2m) sum (|<a_i,x>|^2 - b_i^2)^2
LossValue grad_intensity(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x);

/// (1/2m) sum (|<a_i,x>| - b_i)^2
LossValue grad_amplitude(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x);

/// (1/2m) sum w_i (|<a_i,x>| - b_i)^2; a 0/1 weight vector restricts the sum.
LossValue grad_weighted_amplitude(const MeasurementOperator& op, const RealVector& b, const RealVector& weights,
                                  const ComplexVector& x);

struct TwfBounds {
    double alpha_lb = 0.3;
    double alpha_ub = 5.0;
    double alpha_h = 5.0;
};

/// Measurements kept by the truncated Wirtinger flow tests at x:
///   alpha_lb <= sqrt(n) |z_i| / (||a_i|| ||x||) <= alpha_ub
///   |y_i - |z_i|^2| <= alpha_h * mean_j |y_j - |z_j|^2| * sqrt(n) |z_i| / (||a_i|| ||x||)
/// with z = Ax and y = b^2. Terms with z_i = 0 are always dropped.
std::vector<char> twf_truncation_set(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                                     const TwfBounds& bounds);

/// Poisson loss (1/m) sum_{i in keep} (|z_i|^2 - y_i log |z_i|^2) with the set frozen.
LossValue poisson_loss(const MeasurementOperator& op, const RealVector& b, const std::vector<char>& keep,
                       const ComplexVector& x);

/// Poisson loss with the truncation set computed at x.
LossValue grad_twf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                   const TwfBounds& bounds);

/// w_i = 1 / (1 + eta / max(|z_i| / b_i, eps)); w_i = 1 where b_i = 0.
RealVector weights_rwf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x, double eta);

struct TruncationMask {
    RealVector mask; // 0/1
    bool fell_back = false;
};

/// mask_i = 1 iff |z_i| >= b_i / (1 + gamma); an empty mask falls back to all ones.
TruncationMask truncation_taf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                              double gamma);

/// w_i = r_i / (r_i + beta), r_i = |z_i| / max(b_i, eps).
RealVector weights_raf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x, double beta);

} // namespace phasepack
