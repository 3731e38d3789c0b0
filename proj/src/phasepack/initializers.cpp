#include "phasepack/initializers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace phasepack {

InitMethod parse_init_method(std::string_view name) {
    const auto canonical = canonical_init_method(name);
    if (canonical == "spectral") return InitMethod::Spectral;
    if (canonical == "truncated") return InitMethod::Truncated;
    if (canonical == "amplitude") return InitMethod::Amplitude;
    if (canonical == "weighted") return InitMethod::Weighted;
    if (canonical == "angle") return InitMethod::Angle;
    return InitMethod::Orthogonal;
}

InitOptions init_options(const SolverOptions& opts) {
    InitOptions init;
    init.method = parse_init_method(opts.init_method);
    init.power_iters = opts.power_iters;
    init.power_tol = opts.power_tol;
    init.truncation_alpha = opts.truncation_alpha;
    init.amplitude_fraction = opts.amplitude_fraction;
    init.orthogonal_fraction = opts.orthogonal_fraction;
    init.weight_exponent = opts.weight_exponent;
    init.angle = opts.init_angle;
    return init;
}

EigenPair power_method(const LinearMap& apply, Index n, int iters, double tol, RandomSource& rng, bool real_start) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "power method: n must be positive");
    if (iters < 1) fail(ErrorCode::InvalidArgument, "power method: iters must be >= 1");
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "power method: tol must be positive");

    auto random_start = [&] {
        auto draw = [&]() -> ComplexVector {
            if (real_start) return rng.normal_vector(n).cast<Complex>();
            return rng.complex_normal_vector(n);
        };
        ComplexVector v = draw();
        while (v.norm() == 0.0) v = draw();
        return ComplexVector(v.normalized());
    };

    constexpr int kMaxZeroHits = 3;
    int zero_hits = 0;
    ComplexVector v = random_start();
    for (int k = 0; k < iters; ++k) {
        ComplexVector w = apply(v);
        const double norm = w.norm();
        if (norm == 0.0) {
            if (++zero_hits >= kMaxZeroHits) {
                fail(ErrorCode::ZeroOperator, "power method: operator maps every probe to zero");
            }
            v = random_start();
            continue;
        }
        w /= norm;
        const double change = (w - phase(inner(v, w)) * v).norm();
        v = std::move(w);
        if (change < tol) break;
    }
    // A final zero image means the operator annihilated the last probe as well.
    ComplexVector yv = apply(v);
    if (yv.norm() == 0.0 && zero_hits > 0) fail(ErrorCode::ZeroOperator, "power method: zero operator");

    Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    v *= std::conj(phase(v[peak]));
    return {v, inner(v, apply(v)).real()};
}

std::vector<Index> select_by_magnitude(const RealVector& b, double fraction, bool largest) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        fail(ErrorCode::InvalidArgument, "selection fraction must lie in (0, 1)");
    }
    const Index m = b.size();
    const auto count = static_cast<Index>(std::ceil(fraction * static_cast<double>(m) - 1e-9));
    if (count < 1) fail(ErrorCode::InvalidArgument, "selection fraction selects no measurements");
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        return largest ? b[i] > b[j] : b[i] < b[j];
    });
    order.resize(static_cast<std::size_t>(std::min(count, m)));
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

bool all_zero(const RealVector& b) { return b.size() == 0 || b.cwiseAbs().maxCoeff() == 0.0; }

Initialization zero_init(const PhaseProblem& problem) {
    return {ComplexVector::Zero(problem.n()), std::string("all measurements are zero; returning the zero vector")};
}

// x0 = rho * leading eigenvector of (1/m) A* diag(w) A.
Initialization weighted_direction(const PhaseProblem& problem, const RealVector& weights, const InitOptions& opts,
                                  RandomSource& rng) {
    const auto& op = *problem.op;
    const double scale = 1.0 / static_cast<double>(problem.m());
    const LinearMap apply = [&](const ComplexVector& x) -> ComplexVector {
        return op.adjoint(weights.cast<Complex>().cwiseProduct(op.forward(x))) * scale;
    };
    const auto pair = power_method(apply, problem.n(), opts.power_iters, opts.power_tol, rng, problem.op->is_real());
    return {estimate_signal_norm(problem.b0) * pair.vector, std::nullopt};
}

// s_i = 1/||a_i||^2 on the selected rows, 0 elsewhere; divided by |selection|.
RealVector selection_weights(const MeasurementOperator& op, const std::vector<Index>& selection) {
    const RealVector& norms = op.row_norms_squared();
    RealVector s = RealVector::Zero(op.rows());
    for (Index i : selection) s[i] = norms[i] > 0.0 ? 1.0 / norms[i] : 0.0;
    return s / static_cast<double>(selection.size());
}

void check_problem(const PhaseProblem& problem) {
    if (!problem.op) fail(ErrorCode::InvalidArgument, "initializer: missing operator");
    if (problem.b0.size() != problem.m()) fail(ErrorCode::DimensionMismatch, "initializer: b0 length differs from m");
}

} // namespace

Initialization init_spectral(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    if (all_zero(problem.b0)) return zero_init(problem);
    return weighted_direction(problem, problem.b0.cwiseAbs2(), opts, rng);
}

Initialization init_truncated(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    if (all_zero(problem.b0)) return zero_init(problem);
    const RealVector y = problem.b0.cwiseAbs2();
    const double threshold = opts.truncation_alpha * opts.truncation_alpha * y.mean();
    const RealVector weights = (y.array() <= threshold).select(y, 0.0);
    if (weights.cwiseAbs().maxCoeff() == 0.0) {
        auto init = init_spectral(problem, opts, rng);
        init.warning = "truncation removed every measurement; fell back to the spectral initializer";
        return init;
    }
    return weighted_direction(problem, weights, opts, rng);
}

Initialization init_weighted(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    if (all_zero(problem.b0)) return zero_init(problem);
    RealVector weights = opts.weight_exponent == 2.0
                             ? RealVector(problem.b0.cwiseAbs2())
                             : RealVector(problem.b0.array().pow(opts.weight_exponent));
    return weighted_direction(problem, weights, opts, rng);
}

Initialization init_amplitude(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    const auto& op = *problem.op;
    const auto selection = select_by_magnitude(problem.b0, opts.amplitude_fraction, true);
    const RealVector s = selection_weights(op, selection);
    const LinearMap apply = [&](const ComplexVector& x) -> ComplexVector {
        return op.adjoint(s.cast<Complex>().cwiseProduct(op.forward(x)));
    };
    const auto pair = power_method(apply, problem.n(), opts.power_iters, opts.power_tol, rng, problem.op->is_real());
    Initialization init{estimate_signal_norm(problem.b0) * pair.vector, std::nullopt};
    if (all_zero(problem.b0)) init.warning = "all measurements are zero";
    return init;
}

Initialization init_orthogonal(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    const auto& op = *problem.op;
    const auto selection = select_by_magnitude(problem.b0, opts.orthogonal_fraction, false);
    const RealVector s = selection_weights(op, selection);
    // Y = c I - S turns the bottom eigenvector of the selected-row Gram S into a
    // top one. S has unit trace, so c = 1 always works, but then the gap is
    // about 1/n and power iteration crawls. c slightly above lambda_max(S)
    // keeps Y PSD with a far better ratio.
    const LinearMap gram = [&](const ComplexVector& x) -> ComplexVector {
        return op.adjoint(s.cast<Complex>().cwiseProduct(op.forward(x)));
    };
    RandomSource probe_rng = rng.derive(0x6f7274);
    const double top = power_method(gram, problem.n(), 30, 1e-3, probe_rng, op.is_real()).value;
    const double shift = std::min(1.0, 1.5 * top);
    const LinearMap apply = [&](const ComplexVector& x) -> ComplexVector { return shift * x - gram(x); };
    const auto pair = power_method(apply, problem.n(), opts.power_iters, opts.power_tol, rng, problem.op->is_real());
    Initialization init{estimate_signal_norm(problem.b0) * pair.vector, std::nullopt};
    if (all_zero(problem.b0)) init.warning = "all measurements are zero";
    return init;
}

Initialization init_angle(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    check_problem(problem);
    if (!problem.xt) fail(ErrorCode::MissingGroundTruth, "angle initializer requires the true signal xt");
    const ComplexVector& xt = *problem.xt;
    const double theta = opts.angle;
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0)) {
        fail(ErrorCode::InvalidArgument, "angle initializer: angle must lie in [0, pi/2]");
    }
    const double rho = xt.norm();
    if (rho == 0.0) fail(ErrorCode::DegenerateInput, "angle initializer: ||xt|| = 0");
    if (theta == 0.0) return {xt, std::nullopt};
    if (xt.size() < 2) fail(ErrorCode::InvalidArgument, "angle initializer: a nonzero angle needs n >= 2");

    const ComplexVector ut = xt / rho;
    ComplexVector perp;
    do {
        perp = problem.op->is_real() && xt.imag().isZero(0.0) ? ComplexVector(rng.normal_vector(xt.size()).cast<Complex>())
                                                               : rng.complex_normal_vector(xt.size());
        perp -= inner(ut, perp) * ut;
        perp -= inner(ut, perp) * ut; // second pass for orthogonality to rounding level
    } while (perp.norm() < 1e-8);
    perp.normalize();
    return {rho * (std::cos(theta) * ut + std::sin(theta) * perp), std::nullopt};
}

Initialization initialize(const PhaseProblem& problem, const InitOptions& opts, RandomSource& rng) {
    switch (opts.method) {
    case InitMethod::Spectral: return init_spectral(problem, opts, rng);
    case InitMethod::Truncated: return init_truncated(problem, opts, rng);
    case InitMethod::Amplitude: return init_amplitude(problem, opts, rng);
    case InitMethod::Weighted: return init_weighted(problem, opts, rng);
    case InitMethod::Orthogonal: return init_orthogonal(problem, opts, rng);
    case InitMethod::Angle: return init_angle(problem, opts, rng);
    }
    fail(ErrorCode::InvalidArgument, "unknown initializer");
}

} // namespace phasepack
