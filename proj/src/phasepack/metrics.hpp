#pragma once

#include "phasepack/common.hpp"
#include "phasepack/operators.hpp"

namespace phasepack {

struct PhaseAlignment {
    Complex alpha;
    ComplexVector aligned;
};

/// alpha = <x, xt> / <x, x>, the least-squares optimal scalar mapping x onto xt.
/// For x = 0 both alpha and the aligned vector are zero.
PhaseAlignment align_phase(const ComplexVector& x, const ComplexVector& xt);

/// ||xt - alpha x|| / ||xt|| after optimal alignment.
double recon_error(const ComplexVector& x, const ComplexVector& xt);

/// || |Ax| - b || / ||b||.
double measurement_error(const MeasurementOperator& op, const ComplexVector& x, const RealVector& b);
double measurement_error(const ComplexVector& ax, const RealVector& b);

/// |<x, xt>| / (||x|| ||xt||); 0 when either vector is zero (*degenerate set).
double correlation(const ComplexVector& x, const ComplexVector& xt, bool* degenerate = nullptr);

} // namespace phasepack
