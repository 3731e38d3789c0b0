#include "phasepack/losses.hpp"

#include <cmath>
#include <limits>

namespace phasepack {

namespace {

constexpr double kTiny = 1e-12;

void check(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x) {
    require_length(x, op.cols(), "loss: x");
    if (b.size() != op.rows()) fail(ErrorCode::DimensionMismatch, "loss: b length differs from m");
}

} // namespace

LossValue grad_intensity(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x) {
    check(op, b, x);
    const ComplexVector z = op.forward(x);
    const RealVector r = z.cwiseAbs2() - b.cwiseAbs2();
    const double m = static_cast<double>(b.size());
    return {r.squaredNorm() / (2.0 * m), op.adjoint(r.cast<Complex>().cwiseProduct(z)) / m};
}

LossValue grad_amplitude(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x) {
    return grad_weighted_amplitude(op, b, RealVector::Ones(b.size()), x);
}

LossValue grad_weighted_amplitude(const MeasurementOperator& op, const RealVector& b, const RealVector& weights,
                                  const ComplexVector& x) {
    check(op, b, x);
    if (weights.size() != b.size()) fail(ErrorCode::DimensionMismatch, "loss: weights length differs from m");
    const ComplexVector z = op.forward(x);
    const double m = static_cast<double>(b.size());
    ComplexVector residual(z.size());
    double value = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
        const double gap = std::abs(z[i]) - b[i];
        value += weights[i] * gap * gap;
        residual[i] = weights[i] * (z[i] - b[i] * phase(z[i]));
    }
    return {value / (2.0 * m), op.adjoint(residual) / (2.0 * m)};
}

std::vector<char> twf_truncation_set(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                                     const TwfBounds& bounds) {
    check(op, b, x);
    const Index m = b.size();
    std::vector<char> keep(static_cast<std::size_t>(m), 0);
    const double xnorm = x.norm();
    if (xnorm == 0.0) return keep;
    const ComplexVector z = op.forward(x);
    const RealVector& row_norms = op.row_norms_squared();
    const RealVector intensity = z.cwiseAbs2();
    const RealVector y = b.cwiseAbs2();
    const double mean_residual = (y - intensity).cwiseAbs().mean();
    const double root_n = std::sqrt(static_cast<double>(op.cols()));
    for (Index i = 0; i < m; ++i) {
        const double mag = std::abs(z[i]);
        if (mag == 0.0 || row_norms[i] == 0.0) continue;
        const double ratio = root_n * mag / (std::sqrt(row_norms[i]) * xnorm);
        const bool magnitude_ok = ratio >= bounds.alpha_lb && ratio <= bounds.alpha_ub;
        const bool residual_ok = std::abs(y[i] - intensity[i]) <= bounds.alpha_h * mean_residual * ratio;
        keep[static_cast<std::size_t>(i)] = magnitude_ok && residual_ok;
    }
    return keep;
}

LossValue poisson_loss(const MeasurementOperator& op, const RealVector& b, const std::vector<char>& keep,
                       const ComplexVector& x) {
    check(op, b, x);
    if (keep.size() != static_cast<std::size_t>(b.size())) {
        fail(ErrorCode::DimensionMismatch, "poisson loss: truncation set length differs from m");
    }
    const ComplexVector z = op.forward(x);
    const double m = static_cast<double>(b.size());
    ComplexVector weighted = ComplexVector::Zero(z.size());
    double value = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
        if (!keep[static_cast<std::size_t>(i)]) continue;
        const double intensity = std::norm(z[i]);
        const double y = b[i] * b[i];
        if (intensity == 0.0) {
            // -y log 0 diverges; a kept term landing on zero makes the point infeasible
            if (y > 0.0) value = std::numeric_limits<double>::infinity();
            continue;
        }
        value += intensity - y * std::log(intensity);
        weighted[i] = ((intensity - y) / intensity) * z[i];
    }
    return {value / m, op.adjoint(weighted) / m};
}

LossValue grad_twf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                   const TwfBounds& bounds) {
    return poisson_loss(op, b, twf_truncation_set(op, b, x, bounds), x);
}

RealVector weights_rwf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x, double eta) {
    check(op, b, x);
    const ComplexVector z = op.forward(x);
    RealVector w(b.size());
    for (Index i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) {
            w[i] = 1.0;
            continue;
        }
        const double ratio = std::max(std::abs(z[i]) / b[i], kTiny);
        w[i] = 1.0 / (1.0 + eta / ratio);
    }
    return w;
}

TruncationMask truncation_taf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x,
                              double gamma) {
    check(op, b, x);
    const ComplexVector z = op.forward(x);
    TruncationMask out{RealVector::Zero(b.size()), false};
    for (Index i = 0; i < b.size(); ++i) {
        if (std::abs(z[i]) >= b[i] / (1.0 + gamma)) out.mask[i] = 1.0;
    }
    if (out.mask.sum() == 0.0) {
        out.mask.setOnes();
        out.fell_back = true;
    }
    return out;
}

RealVector weights_raf(const MeasurementOperator& op, const RealVector& b, const ComplexVector& x, double beta) {
    check(op, b, x);
    const ComplexVector z = op.forward(x);
    RealVector w(b.size());
    for (Index i = 0; i < b.size(); ++i) {
        const double r = std::abs(z[i]) / std::max(b[i], kTiny);
        w[i] = r / (r + beta);
    }
    return w;
}

} // namespace phasepack
