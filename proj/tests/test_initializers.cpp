#include <doctest.h>

#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "phasepack/initializers.hpp"
#include "phasepack/metrics.hpp"

using namespace phasepack;

namespace {

PhaseProblem make_problem(const ComplexMatrix& a, const RealVector& b, std::optional<ComplexVector> xt = {}) {
    return PhaseProblem{std::make_shared<DenseOperator>(a), b, std::move(xt)};
}

InitOptions precise(InitMethod method) {
    InitOptions io;
    io.method = method;
    io.power_iters = 20000;
    io.power_tol = 1e-13;
    return io;
}

LinearMap matrix_map(const Eigen::MatrixXcd& y) {
    return [y](const ComplexVector& x) { return ComplexVector(y * x); };
}

const ComplexMatrix& matrix_of(const PhaseProblem& p) { return dynamic_cast<const DenseOperator&>(*p.op).matrix(); }

RealVector rvec(std::initializer_list<double> v) {
    RealVector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double z : v) out[i++] = z;
    return out;
}

} // namespace

TEST_CASE("power method") {
    RandomSource rng(1);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 3;
    const EigenPair p = power_method(matrix_map(d), 2, 2000, 1e-14, rng);
    CHECK(p.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(p.vector[1]) == doctest::Approx(1.0).epsilon(1e-10));

    Eigen::MatrixXcd s(2, 2);
    s << 2, 1, 1, 2;
    const EigenPair q = power_method(matrix_map(s), 2, 2000, 1e-14, rng);
    CHECK(q.value == doctest::Approx(3.0).epsilon(1e-12));
    ComplexVector u(2);
    u << 1, 1;
    CHECK(oracle::abs_correlation(q.vector, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.vector.norm() == doctest::Approx(1.0).epsilon(1e-14));

    try {
        power_method(matrix_map(Eigen::MatrixXcd::Zero(3, 3)), 3, 50, 1e-8, rng);
        FAIL("expected zero-operator error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroOperator);
    }
}

TEST_CASE("spectral initializer closed forms") {
    ComplexMatrix a(2, 1);
    a << 1, 2;
    ComplexVector xt(1);
    xt << 1;
    RandomSource rng(2);
    const ComplexVector x0 = init_spectral(make_problem(a, rvec({1, 2}), xt), precise(InitMethod::Spectral), rng).x0;
    CHECK(std::abs(x0[0]) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));

    // Identity operator: Y is diagonal with the b_i^2, so x0 points at argmax |xt|.
    ComplexVector t(4);
    t << 0.3, -2.0, 1.0, 0.5;
    const ComplexVector e = init_spectral(make_problem(ComplexMatrix::Identity(4, 4), t.cwiseAbs(), t),
                                          precise(InitMethod::Spectral), rng)
                                .x0;
    Index peak = 0;
    e.cwiseAbs().maxCoeff(&peak);
    CHECK(peak == 1);
    CHECK(e.cwiseAbs()[1] / e.norm() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral-family initializers match dense eigensolver oracles") {
    RandomSource prng(3);
    const PhaseProblem p = build_gaussian_problem(8, 160, true, prng);
    const ComplexMatrix& a = matrix_of(p);
    const double scale = estimate_signal_norm(p.b0);
    struct Case {
        InitMethod method;
        ComplexVector expected;
        const char* name;
    };
    const std::vector<Case> cases = {
        {InitMethod::Spectral, oracle::top_eigenvector(oracle::spectral_matrix(a, p.b0)).vector, "spectral"},
        {InitMethod::Truncated, oracle::top_eigenvector(oracle::truncated_matrix(a, p.b0, 3.0)).vector, "truncated"},
        {InitMethod::Amplitude, oracle::top_eigenvector(oracle::subset_matrix(a, p.b0, 1.0 / 6.0, true)).vector,
         "amplitude"},
        {InitMethod::Weighted, oracle::top_eigenvector(oracle::weighted_matrix(a, p.b0, 1.0)).vector, "weighted"},
        {InitMethod::Orthogonal, oracle::bottom_eigenvector(oracle::subset_matrix(a, p.b0, 0.5, false)).vector,
         "orthogonal"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.name);
        RandomSource rng(4);
        const ComplexVector x0 = initialize(p, precise(c.method), rng).x0;
        CHECK(oracle::abs_correlation(x0, c.expected) >= 1 - 1e-6);
        CHECK(x0.norm() == doctest::Approx(scale).epsilon(1e-12));
    }
}

TEST_CASE("truncated initializer") {
    RandomSource prng(5);
    const PhaseProblem p = build_gaussian_problem(4, 30, true, prng);
    const PhaseProblem flat = make_problem(matrix_of(p), RealVector::Constant(30, 1.5));
    RandomSource r1(6), r2(6);
    CHECK(init_truncated(flat, precise(InitMethod::Truncated), r1).x0 ==
          init_spectral(flat, precise(InitMethod::Spectral), r2).x0);

    // 19 rows e1 with b = 1 and one row e2 with b = 10: mean(b^2) = 5.95 and
    // 100 > 9 * 5.95, so the e2 row is dropped.
    ComplexMatrix a(20, 2);
    RealVector b = RealVector::Ones(20);
    for (Index i = 0; i < 19; ++i) a.row(i) << 1, 0;
    a.row(19) << 0, 1;
    b[19] = 10;
    const PhaseProblem outlier = make_problem(a, b);
    RandomSource r3(7), r4(7);
    const ComplexVector trunc = init_truncated(outlier, precise(InitMethod::Truncated), r3).x0;
    const ComplexVector spec = init_spectral(outlier, precise(InitMethod::Spectral), r4).x0;
    CHECK(std::abs(trunc[0]) / trunc.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(spec[1]) / spec.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

// Outliers carry values unrelated to the signal. Scaling true b_i instead
// picks rows already aligned with xt and helps the plain estimator.
TEST_CASE("truncation helps against gross outliers") {
    int wins = 0;
    double sum_trunc = 0, sum_spec = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        RandomSource prng(1000 + s);
        PhaseProblem p = build_gaussian_problem(8, 160, true, prng);
        RandomSource pick(5000 + s);
        std::vector<Index> idx(160);
        std::iota(idx.begin(), idx.end(), Index{0});
        for (Index i = 0; i < 8; ++i) {
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(i + static_cast<Index>(pick.uniform_index(160 - i)))]);
            p.b0[idx[static_cast<std::size_t>(i)]] = 50 * std::abs(pick.normal());
        }
        RandomSource r1(9), r2(9);
        const double ct = correlation(init_truncated(p, precise(InitMethod::Truncated), r1).x0, *p.xt);
        const double cs = correlation(init_spectral(p, precise(InitMethod::Spectral), r2).x0, *p.xt);
        wins += ct >= cs;
        sum_trunc += ct;
        sum_spec += cs;
    }
    CHECK(wins >= 30);
    CHECK(sum_trunc > sum_spec);
}

TEST_CASE("amplitude initializer") {
    RandomSource prng(10);
    const PhaseProblem p = build_gaussian_problem(3, 6, true, prng);
    Index top = 0;
    p.b0.maxCoeff(&top);
    RandomSource rng(11);
    const ComplexVector x0 = init_amplitude(p, precise(InitMethod::Amplitude), rng).x0;
    CHECK(oracle::abs_correlation(x0, oracle::measurement_row(matrix_of(p), top)) == doctest::Approx(1.0).epsilon(1e-10));

    ComplexMatrix same(5, 3);
    for (Index i = 0; i < 5; ++i) same.row(i) << Complex(1, 1), 2.0, Complex(0, -1);
    InitOptions io = precise(InitMethod::Amplitude);
    io.amplitude_fraction = 0.6;
    const ComplexVector v =
        init_amplitude(make_problem(same, rvec({1, 2, 3, 4, 5})), io, rng).x0;
    CHECK(oracle::abs_correlation(v, oracle::measurement_row(same, 0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("weighted initializer") {
    RandomSource prng(12);
    const PhaseProblem p = build_gaussian_problem(6, 50, true, prng);
    InitOptions w = precise(InitMethod::Weighted);
    w.weight_exponent = 2.0;
    RandomSource r1(13), r2(13);
    CHECK(init_weighted(p, w, r1).x0 == init_spectral(p, precise(InitMethod::Spectral), r2).x0);

    w.weight_exponent = 0.0;
    const Eigen::MatrixXcd a = matrix_of(p);
    const ComplexVector expected = oracle::top_eigenvector(a.adjoint() * a).vector;
    RandomSource r3(14);
    CHECK(oracle::abs_correlation(init_weighted(p, w, r3).x0, expected) >= 1 - 1e-8);
}

TEST_CASE("orthogonal initializer") {
    ComplexMatrix a(2, 2);
    a << 1, 0, 1, 0;
    InitOptions io = precise(InitMethod::Orthogonal);
    io.orthogonal_fraction = 0.5; // one e1 row selected
    RandomSource rng(15);
    const ComplexVector v = init_orthogonal(make_problem(a, rvec({1, 1})), io, rng).x0;
    CHECK(std::abs(v[1]) / v.norm() == doctest::Approx(1.0).epsilon(1e-10));

    // Rows spanning a single direction: the result lies in its orthogonal complement.
    ComplexMatrix rank1(4, 3);
    const Complex base[3] = {Complex(1, 2), Complex(-1, 0), Complex(0, 3)};
    const double scales[4] = {1.0, -2.0, 0.5, 3.0};
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 3; ++j) rank1(i, j) = scales[i] * base[j];
    const ComplexVector w = init_orthogonal(make_problem(rank1, rvec({1, 2, 0.5, 3})), io, rng).x0;
    for (Index i = 0; i < 4; ++i) CHECK(std::abs((rank1.row(i) * w)(0)) / w.norm() < 1e-8);
}

TEST_CASE("orthogonal initializer converges with the default power budget") {
    RandomSource prng(16);
    const PhaseProblem p = build_gaussian_problem(64, 384, true, prng);
    const ComplexVector expected = oracle::bottom_eigenvector(oracle::subset_matrix(matrix_of(p), p.b0, 0.5, false)).vector;
    InitOptions io;
    io.method = InitMethod::Orthogonal;
    RandomSource rng(17);
    CHECK(oracle::abs_correlation(init_orthogonal(p, io, rng).x0, expected) > 0.9);
}

TEST_CASE("real operators give real initial points") {
    RandomSource prng(18);
    const PhaseProblem p = build_gaussian_problem(5, 40, false, prng);
    for (auto m : {InitMethod::Spectral, InitMethod::Truncated, InitMethod::Amplitude, InitMethod::Weighted,
                   InitMethod::Orthogonal, InitMethod::Angle}) {
        InitOptions io;
        io.method = m;
        io.angle = 0.5;
        RandomSource rng(19);
        CHECK(initialize(p, io, rng).x0.imag().isZero(0.0));
    }
}

TEST_CASE("angle initializer") {
    RandomSource prng(20);
    const PhaseProblem p = build_gaussian_problem(8, 40, true, prng);
    InitOptions io;
    io.method = InitMethod::Angle;
    RandomSource rng(21);
    io.angle = 0.0;
    CHECK(init_angle(p, io, rng).x0 == *p.xt);
    io.angle = std::numbers::pi / 2;
    CHECK(std::abs(inner(init_angle(p, io, rng).x0, *p.xt)) / p.xt->squaredNorm() < 1e-10);
    io.angle = std::numbers::pi / 4;
    CHECK(std::abs(correlation(init_angle(p, io, rng).x0, *p.xt) - std::sqrt(2.0) / 2) < 1e-10);

    PhaseProblem no_truth = p;
    no_truth.xt.reset();
    try {
        init_angle(no_truth, io, rng);
        FAIL("expected missing ground truth");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingGroundTruth);
    }
}

TEST_CASE("spectral estimate is accurate with many samples") {
    std::vector<double> corr;
    for (std::uint64_t s = 0; s < 20; ++s) {
        RandomSource prng(100 + s);
        const PhaseProblem p = build_gaussian_problem(32, 32 * 50, true, prng);
        InitOptions io;
        io.method = InitMethod::Spectral;
        RandomSource rng(s);
        const double c = correlation(init_spectral(p, io, rng).x0, *p.xt);
        const double best = correlation(oracle::top_eigenvector(oracle::spectral_matrix(matrix_of(p), p.b0)).vector, *p.xt);
        CHECK(std::abs(c - best) < 1e-4);
        corr.push_back(c);
    }
    CHECK(oracle::median(corr) >= 0.9);
}

TEST_CASE("select_by_magnitude") {
    const RealVector b = rvec({3, 1, 2, 1, 5, 0});
    CHECK(select_by_magnitude(b, 0.5, true) == std::vector<Index>{0, 2, 4});
    CHECK(select_by_magnitude(b, 0.5, false) == std::vector<Index>{1, 3, 5});
    CHECK(select_by_magnitude(b, 1.0 / 6.0, true).size() == 1);
}
