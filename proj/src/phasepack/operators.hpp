#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "phasepack/common.hpp"
#include "phasepack/random.hpp"

namespace phasepack {

/// A linear map A: C^n -> C^m together with its conjugate transpose.
///
/// Rows are exposed as vectors a_i such that (A x)_i = <a_i, x> = a_i^H x,
/// i.e. a_i is the conjugate of the i-th matrix row. Implementations are
/// immutable after construction; forward() and adjoint() are reentrant.
class MeasurementOperator {
public:
    virtual ~MeasurementOperator() = default;
    MeasurementOperator() = default;
    MeasurementOperator(const MeasurementOperator&) = delete;
    MeasurementOperator& operator=(const MeasurementOperator&) = delete;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;

    ComplexVector forward(const ComplexVector& x) const;
    ComplexVector adjoint(const ComplexVector& y) const;

    virtual bool has_rows() const { return false; }
    /// Row a_i; throws ErrorCode::Capability when has_rows() is false.
    virtual ComplexVector row(Index i) const;

    /// ||a_i||^2 for every row. The default probes A with the n canonical
    /// basis vectors once and caches the result.
    virtual const RealVector& row_norms_squared() const;

    /// True when every matrix entry is real.
    virtual bool is_real() const { return false; }

    /// True for function-handle style operators with no explicit matrix.
    virtual bool matrix_free() const { return false; }

protected:
    virtual ComplexVector apply_forward(const ComplexVector& x) const = 0;
    virtual ComplexVector apply_adjoint(const ComplexVector& y) const = 0;

private:
    mutable std::once_flag norms_once_;
    mutable RealVector norms_;
};

using OperatorPtr = std::shared_ptr<const MeasurementOperator>;

class DenseOperator final : public MeasurementOperator {
public:
    explicit DenseOperator(ComplexMatrix matrix);
    static std::shared_ptr<DenseOperator> identity(Index n);

    Index rows() const override { return matrix_.rows(); }
    Index cols() const override { return matrix_.cols(); }
    bool has_rows() const override { return true; }
    ComplexVector row(Index i) const override;
    const RealVector& row_norms_squared() const override { return row_norms_; }
    bool is_real() const override { return real_; }

    const ComplexMatrix& matrix() const noexcept { return matrix_; }

protected:
    ComplexVector apply_forward(const ComplexVector& x) const override;
    ComplexVector apply_adjoint(const ComplexVector& y) const override;

private:
    ComplexMatrix matrix_;
    RealVector row_norms_;
    bool real_ = false;
};

/// Stacked coded-diffraction operator: block l is the unitary 2-D DFT of
/// (d_l .* x), with x viewed as a row-major height x width array.
class MaskedFourierOperator final : public MeasurementOperator {
public:
    MaskedFourierOperator(Index height, Index width, std::vector<ComplexVector> masks);

    Index rows() const override { return static_cast<Index>(masks_.size()) * size(); }
    Index cols() const override { return size(); }
    bool has_rows() const override { return true; }
    ComplexVector row(Index i) const override;
    const RealVector& row_norms_squared() const override { return row_norms_; }

    Index height() const noexcept { return height_; }
    Index width() const noexcept { return width_; }
    Index mask_count() const noexcept { return static_cast<Index>(masks_.size()); }
    const std::vector<ComplexVector>& masks() const noexcept { return masks_; }

protected:
    ComplexVector apply_forward(const ComplexVector& x) const override;
    ComplexVector apply_adjoint(const ComplexVector& y) const override;

private:
    Index size() const { return height_ * width_; }
    void unitary_dft2(Complex* data, bool inverse) const;

    Index height_;
    Index width_;
    std::vector<ComplexVector> masks_;
    RealVector row_norms_;
};

/// Matrix-free operator built from a pair of callables. The signal length
/// and the adjoint may be left unspecified at construction; the unified
/// solve entry point rejects such an operator unless both are supplied.
class FunctionOperator final : public MeasurementOperator {
public:
    using Map = std::function<ComplexVector(const ComplexVector&)>;
    /// Receives y and the signal length n the result must have.
    using AdjointMap = std::function<ComplexVector(const ComplexVector& y, Index n)>;

    FunctionOperator(Index m, std::optional<Index> n, Map forward, AdjointMap adjoint);

    Index rows() const override { return m_; }
    Index cols() const override { return n_.value_or(0); }
    bool matrix_free() const override { return true; }

    bool has_signal_length() const noexcept { return n_.has_value(); }
    bool has_adjoint() const noexcept { return static_cast<bool>(adjoint_); }

    /// Copy with the signal length fixed to n.
    std::shared_ptr<FunctionOperator> with_signal_length(Index n) const;

protected:
    ComplexVector apply_forward(const ComplexVector& x) const override;
    ComplexVector apply_adjoint(const ComplexVector& y) const override;

private:
    Index m_;
    std::optional<Index> n_;
    Map forward_;
    AdjointMap adjoint_;
};

/// max over trials of |<Ax, y> - <x, A*y>| / (||Ax|| ||y|| + eps) for random unit x, y.
double adjoint_dot_test(const MeasurementOperator& op, int trials, RandomSource& rng);

/// Approximate argmin ||A x - y|| by conjugate gradients on the normal
/// equations, stopping when ||A*(Ax - y)|| / ||A* y|| < inner_tol.
/// An optional starting point warm-starts the iteration.
ComplexVector least_squares_solve(const MeasurementOperator& op, const ComplexVector& y,
                                  int max_inner_iters, double inner_tol,
                                  const ComplexVector* start = nullptr);

/// Explicit m x n matrix of any operator, assembled from forward probes.
ComplexMatrix materialize(const MeasurementOperator& op);

} // namespace phasepack
