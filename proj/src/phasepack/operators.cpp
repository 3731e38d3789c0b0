#include "phasepack/operators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace phasepack {

ComplexVector MeasurementOperator::forward(const ComplexVector& x) const {
    require_length(x, cols(), "forward: input");
    ComplexVector y = apply_forward(x);
    require_length(y, rows(), "forward: operator output");
    return y;
}

ComplexVector MeasurementOperator::adjoint(const ComplexVector& y) const {
    require_length(y, rows(), "adjoint: input");
    ComplexVector x = apply_adjoint(y);
    require_length(x, cols(), "adjoint: operator output");
    return x;
}

ComplexVector MeasurementOperator::row(Index) const {
    fail(ErrorCode::Capability,
         "operator does not provide row access; construct a dense operator instead");
}

const RealVector& MeasurementOperator::row_norms_squared() const {
    std::call_once(norms_once_, [this] {
        RealVector norms = RealVector::Zero(rows());
        ComplexVector probe = ComplexVector::Zero(cols());
        for (Index j = 0; j < cols(); ++j) {
            probe[j] = 1.0;
            norms += forward(probe).cwiseAbs2();
            probe[j] = 0.0;
        }
        norms_ = std::move(norms);
    });
    return norms_;
}

// ---------------------------------------------------------------------------

DenseOperator::DenseOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() < 1 || matrix_.cols() < 1) {
        fail(ErrorCode::InvalidArgument, "dense operator: empty matrix");
    }
    for (Index i = 0; i < matrix_.rows(); ++i) {
        for (Index j = 0; j < matrix_.cols(); ++j) {
            const Complex v = matrix_(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                fail(ErrorCode::InvalidArgument, "dense operator: non-finite entry");
            }
        }
    }
    row_norms_ = matrix_.rowwise().squaredNorm();
    real_ = matrix_.imag().isZero(0.0);
}

std::shared_ptr<DenseOperator> DenseOperator::identity(Index n) {
    return std::make_shared<DenseOperator>(ComplexMatrix::Identity(n, n));
}

ComplexVector DenseOperator::row(Index i) const {
    if (i < 0 || i >= rows()) fail(ErrorCode::InvalidArgument, "row index out of range");
    return matrix_.row(i).conjugate().transpose();
}

ComplexVector DenseOperator::apply_forward(const ComplexVector& x) const { return matrix_ * x; }

ComplexVector DenseOperator::apply_adjoint(const ComplexVector& y) const {
    return matrix_.adjoint() * y;
}

// ---------------------------------------------------------------------------

MaskedFourierOperator::MaskedFourierOperator(Index height, Index width,
                                             std::vector<ComplexVector> masks)
    : height_(height), width_(width), masks_(std::move(masks)) {
    if (height_ < 1 || width_ < 1) fail(ErrorCode::InvalidArgument, "masked Fourier: empty grid");
    if (masks_.empty()) fail(ErrorCode::InvalidArgument, "masked Fourier: need at least one mask");
    for (const auto& d : masks_) {
        require_length(d, size(), "masked Fourier: mask");
        require_finite(d, "masked Fourier: mask");
    }
    row_norms_.resize(rows());
    const double scale = 1.0 / static_cast<double>(size());
    for (std::size_t l = 0; l < masks_.size(); ++l) {
        row_norms_.segment(static_cast<Index>(l) * size(), size())
            .setConstant(masks_[l].squaredNorm() * scale);
    }
}

void MaskedFourierOperator::unitary_dft2(Complex* data, bool inverse) const {
    // The inverse unitary DFT is conj(F conj(y)) with F the unitary forward map.
    Eigen::FFT<double> fft;
    const Index n = size();
    if (inverse) {
        for (Index i = 0; i < n; ++i) data[i] = std::conj(data[i]);
    }
    std::vector<Complex> in(static_cast<std::size_t>(std::max(height_, width_)));
    std::vector<Complex> out;
    for (Index r = 0; r < height_; ++r) {
        in.assign(data + r * width_, data + (r + 1) * width_);
        fft.fwd(out, in);
        std::copy(out.begin(), out.end(), data + r * width_);
    }
    in.resize(static_cast<std::size_t>(height_));
    for (Index c = 0; c < width_; ++c) {
        for (Index r = 0; r < height_; ++r) in[static_cast<std::size_t>(r)] = data[r * width_ + c];
        fft.fwd(out, in);
        for (Index r = 0; r < height_; ++r) data[r * width_ + c] = out[static_cast<std::size_t>(r)];
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index i = 0; i < n; ++i) {
        data[i] *= scale;
        if (inverse) data[i] = std::conj(data[i]);
    }
}

ComplexVector MaskedFourierOperator::apply_forward(const ComplexVector& x) const {
    ComplexVector y(rows());
    for (std::size_t l = 0; l < masks_.size(); ++l) {
        auto block = y.segment(static_cast<Index>(l) * size(), size());
        block = masks_[l].cwiseProduct(x);
        unitary_dft2(block.data(), false);
    }
    return y;
}

ComplexVector MaskedFourierOperator::apply_adjoint(const ComplexVector& y) const {
    ComplexVector x = ComplexVector::Zero(size());
    ComplexVector work(size());
    for (std::size_t l = 0; l < masks_.size(); ++l) {
        work = y.segment(static_cast<Index>(l) * size(), size());
        unitary_dft2(work.data(), true);
        x += masks_[l].conjugate().cwiseProduct(work);
    }
    return x;
}

ComplexVector MaskedFourierOperator::row(Index i) const {
    if (i < 0 || i >= rows()) fail(ErrorCode::InvalidArgument, "row index out of range");
    const Index l = i / size();
    const Index k = i % size();
    const Index kr = k / width_;
    const Index kc = k % width_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(size()));
    const double two_pi = 2.0 * std::numbers::pi;
    ComplexVector a(size());
    for (Index jr = 0; jr < height_; ++jr) {
        for (Index jc = 0; jc < width_; ++jc) {
            const double angle = -two_pi * (static_cast<double>((kr * jr) % height_) / height_ +
                                            static_cast<double>((kc * jc) % width_) / width_);
            const Index j = jr * width_ + jc;
            a[j] = std::conj(masks_[static_cast<std::size_t>(l)][j] * std::polar(scale, angle));
        }
    }
    return a;
}

// ---------------------------------------------------------------------------

FunctionOperator::FunctionOperator(Index m, std::optional<Index> n, Map forward, AdjointMap adjoint)
    : m_(m), n_(n), forward_(std::move(forward)), adjoint_(std::move(adjoint)) {
    if (m_ < 1) fail(ErrorCode::InvalidArgument, "function operator: m must be positive");
    if (n_ && *n_ < 1) fail(ErrorCode::InvalidArgument, "function operator: n must be positive");
    if (!forward_) fail(ErrorCode::InvalidArgument, "function operator: forward map is required");
}

std::shared_ptr<FunctionOperator> FunctionOperator::with_signal_length(Index n) const {
    return std::make_shared<FunctionOperator>(m_, n, forward_, adjoint_);
}

ComplexVector FunctionOperator::apply_forward(const ComplexVector& x) const {
    if (!n_) fail(ErrorCode::Configuration, "function operator: signal length n was not provided");
    return forward_(x);
}

ComplexVector FunctionOperator::apply_adjoint(const ComplexVector& y) const {
    if (!adjoint_) fail(ErrorCode::Configuration, "function operator: adjoint map was not provided");
    if (!n_) fail(ErrorCode::Configuration, "function operator: signal length n was not provided");
    return adjoint_(y, *n_);
}

// ---------------------------------------------------------------------------

double adjoint_dot_test(const MeasurementOperator& op, int trials, RandomSource& rng) {
    if (trials < 1) fail(ErrorCode::InvalidArgument, "adjoint_dot_test: trials must be >= 1");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        ComplexVector x = rng.complex_normal_vector(op.cols()).normalized();
        ComplexVector y = rng.complex_normal_vector(op.rows()).normalized();
        const ComplexVector ax = op.forward(x);
        const ComplexVector aty = op.adjoint(y);
        const double gap = std::abs(inner(ax, y) - inner(x, aty));
        const double denom = ax.norm() * y.norm() + std::numeric_limits<double>::min();
        worst = std::max(worst, gap / denom);
    }
    return worst;
}

ComplexVector least_squares_solve(const MeasurementOperator& op, const ComplexVector& y,
                                  int max_inner_iters, double inner_tol,
                                  const ComplexVector* start) {
    if (max_inner_iters < 1) fail(ErrorCode::InvalidArgument, "least squares: maxInnerIters must be >= 1");
    if (!(inner_tol > 0.0)) fail(ErrorCode::InvalidArgument, "least squares: innerTol must be positive");

    const double reference = op.adjoint(y).norm();
    if (reference == 0.0) return ComplexVector::Zero(op.cols());

    ComplexVector x = start ? *start : ComplexVector::Zero(op.cols());
    require_length(x, op.cols(), "least squares: start");
    ComplexVector r = y - op.forward(x);
    ComplexVector s = op.adjoint(r);
    ComplexVector p = s;
    double gamma = s.squaredNorm();

    for (int k = 0; k < max_inner_iters; ++k) {
        if (std::sqrt(gamma) < inner_tol * reference) break;
        const ComplexVector q = op.forward(p);
        const double qq = q.squaredNorm();
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        x += alpha * p;
        r -= alpha * q;
        s = op.adjoint(r);
        const double next = s.squaredNorm();
        p = s + (next / gamma) * p;
        gamma = next;
    }
    return x;
}

ComplexMatrix materialize(const MeasurementOperator& op) {
    ComplexMatrix a(op.rows(), op.cols());
    ComplexVector probe = ComplexVector::Zero(op.cols());
    for (Index j = 0; j < op.cols(); ++j) {
        probe[j] = 1.0;
        a.col(j) = op.forward(probe);
        probe[j] = 0.0;
    }
    return a;
}

} // namespace phasepack
