#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phasepack {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    UnknownKey,
    InvalidValue,
    UnknownName,
    Configuration,
    Capability,
    Parse,
    Integrity,
    Io,
    DegenerateInput,
    MissingGroundTruth,
    ZeroOperator,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

void require_length(const ComplexVector& v, Index expected, const char* what);
void require_finite(const ComplexVector& v, const char* what);

// Phase of z, with the convention phase(0) = 1.
inline Complex phase(Complex z) {
    const double r = std::abs(z);
    return r > 0.0 ? z / r : Complex{1.0, 0.0};
}

ComplexVector phase(const ComplexVector& z);

// <u, v> = sum conj(u_i) v_i
inline Complex inner(const ComplexVector& u, const ComplexVector& v) { return u.dot(v); }

} // namespace phasepack
