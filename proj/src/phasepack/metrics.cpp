#include "phasepack/metrics.hpp"

#include <cmath>

namespace phasepack {

PhaseAlignment align_phase(const ComplexVector& x, const ComplexVector& xt) {
    require_length(x, xt.size(), "align_phase: x");
    const double xx = x.squaredNorm();
    if (xx == 0.0) return {Complex{0.0, 0.0}, ComplexVector::Zero(x.size())};
    const Complex alpha = inner(x, xt) / xx;
    return {alpha, alpha * x};
}

double recon_error(const ComplexVector& x, const ComplexVector& xt) {
    const double norm_t = xt.norm();
    if (norm_t == 0.0) fail(ErrorCode::DegenerateInput, "recon_error: ||xt|| = 0");
    return (xt - align_phase(x, xt).aligned).norm() / norm_t;
}

double measurement_error(const ComplexVector& ax, const RealVector& b) {
    if (ax.size() != b.size()) fail(ErrorCode::DimensionMismatch, "measurement_error: |Ax| and b differ in length");
    const double norm_b = b.norm();
    if (norm_b == 0.0) fail(ErrorCode::DegenerateInput, "measurement_error: ||b|| = 0");
    return (ax.cwiseAbs() - b).norm() / norm_b;
}

double measurement_error(const MeasurementOperator& op, const ComplexVector& x, const RealVector& b) {
    return measurement_error(op.forward(x), b);
}

double correlation(const ComplexVector& x, const ComplexVector& xt, bool* degenerate) {
    require_length(x, xt.size(), "correlation: x");
    const double denom = x.norm() * xt.norm();
    if (degenerate) *degenerate = denom == 0.0;
    if (denom == 0.0) return 0.0;
    return std::min(1.0, std::abs(inner(x, xt)) / denom);
}

} // namespace phasepack
