#include "phasepack/common.hpp"

#include <cmath>

namespace phasepack {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::UnknownKey: return "unknown key";
    case ErrorCode::InvalidValue: return "invalid value";
    case ErrorCode::UnknownName: return "unknown name";
    case ErrorCode::Configuration: return "configuration error";
    case ErrorCode::Capability: return "missing capability";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Integrity: return "integrity error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::DegenerateInput: return "degenerate input";
    case ErrorCode::MissingGroundTruth: return "missing ground truth";
    case ErrorCode::ZeroOperator: return "zero operator";
    }
    return "error";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

void require_length(const ComplexVector& v, Index expected, const char* what) {
    if (v.size() != expected) {
        fail(ErrorCode::DimensionMismatch, std::string(what) + ": expected length " +
                                               std::to_string(expected) + ", got " +
                                               std::to_string(v.size()));
    }
}

void require_finite(const ComplexVector& v, const char* what) {
    for (Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
            fail(ErrorCode::InvalidArgument,
                 std::string(what) + ": non-finite entry at index " + std::to_string(i));
        }
    }
}

ComplexVector phase(const ComplexVector& z) {
    ComplexVector out(z.size());
    for (Index i = 0; i < z.size(); ++i) out[i] = phase(z[i]);
    return out;
}

} // namespace phasepack
