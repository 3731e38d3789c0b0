// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phasepack/benchmark.hpp"
#include "phasepack/initializers.hpp"
#include "phasepack/losses.hpp"
#include "phasepack/metrics.hpp"
#include "phasepack/problems.hpp"
#include "phasepack/solve.hpp"

using namespace phasepack;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d  %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const DenseOperator& dense(const PhaseProblem& p) { return dynamic_cast<const DenseOperator&>(*p.op); }

SolveResult run(const PhaseProblem& p, OptionOverlay ov, std::uint64_t seed) {
    RandomSource rng(seed);
    return solve_phase_retrieval(p.op, p.b0, p.n(), ov, rng);
}

// 1
void exact_recovery() {
    const std::vector<std::string> algs = {"gerchbergsaxton", "fienup", "wirtflow", "amplitudeflow",
                                           "taf",             "raf",    "rwf",      "twf"};
    bool all = true;
    std::string detail;
    for (const auto& alg : algs) {
        int ok = 0;
        double slowest = 0;
        for (int t = 0; t < 20; ++t) {
            RandomSource prng(1000 + static_cast<std::uint64_t>(t));
            const PhaseProblem p = build_gaussian_problem(64, 384, true, prng);
            OptionOverlay ov;
            ov.set("algorithm", alg).set("tol", "1e-6").set("maxIters", "5000");
            ov.xt = p.xt;
            const auto t0 = std::chrono::steady_clock::now();
            const SolveResult r = run(p, ov, 77 + static_cast<std::uint64_t>(t));
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            slowest = std::max(slowest, dt);
            if (recon_error(r.x, *p.xt) < 1e-4 && dt < 10.0) ++ok;
        }
        all = all && ok >= 16;
        detail += alg + " " + std::to_string(ok) + "/20 (" + fmt("%.2fs", slowest) + ") ";
    }
    report(1, "exact recovery n=64 m=6n", all, detail);
}

// 2
void sampling_monotonicity() {
    const std::vector<double> ratios = {1, 2, 4, 6};
    bool all = true;
    std::string detail;
    for (const std::string alg : {"gerchbergsaxton", "wirtflow"}) {
        std::vector<double> med;
        for (double r : ratios) {
            std::vector<double> errs;
            for (int t = 0; t < 10; ++t) {
                RandomSource prng(mix_seed(2000 + static_cast<std::uint64_t>(t), hash_double(r)));
                const PhaseProblem p = build_gaussian_problem(64, static_cast<Index>(std::lround(r * 64)), true, prng);
                OptionOverlay ov;
                // No xt: stopping on recon error < tol would pin every
                // recovered trial just under tol and hide the trend.
                ov.set("algorithm", alg).set("maxIters", "1000");
                errs.push_back(recon_error(run(p, ov, 5 + static_cast<std::uint64_t>(t)).x, *p.xt));
            }
            med.push_back(oracle::median(errs));
        }
        int inversions = 0;
        bool small = true;
        for (std::size_t i = 0; i + 1 < med.size(); ++i) {
            if (med[i + 1] > med[i]) {
                ++inversions;
                small = small && (med[i + 1] - med[i]) < 0.1 * med[i];
            }
        }
        all = all && (inversions == 0 || (inversions == 1 && small));
        detail += alg + fmt(" [%.3g %.3g %.3g", med[0], med[1], med[2]) + fmt(" %.3g] ", med[3]);
    }
    report(2, "sampling-ratio monotonicity", all, detail);
}

// 3
void signal_demo() {
    int ok = 0;
    for (int s = 0; s < 20; ++s) {
        RandomSource prng(3000 + static_cast<std::uint64_t>(s));
        const PhaseProblem p = build_gaussian_problem(100, 500, true, prng);
        OptionOverlay ov;
        ov.set("algorithm", "Fienup").set("initMethod", "truncatedSpectral").set("tol", "1e-10").set("maxIters", "500");
        ov.xt = p.xt;
        if (recon_error(run(p, ov, static_cast<std::uint64_t>(s)).x, *p.xt) < 1e-4) ++ok;
    }
    report(3, "signal demo m=5n Fienup", ok >= 16, std::to_string(ok) + "/20 below 1e-4");
}

// 4
double fd_error(const std::function<LossValue(const ComplexVector&)>& f, const ComplexVector& x,
                const ComplexVector& d) {
    const double h = 1e-5;
    const LossValue at = f(x);
    const double fd = (f(x + h * d).value - f(x - h * d).value) / (2 * h);
    const double an = 2.0 * inner(at.gradient, d).real();
    return std::abs(fd - an) / (std::abs(at.value) + 1.0);
}

void gradient_correctness() {
    RandomSource rng(4);
    const PhaseProblem p = build_gaussian_problem(12, 72, true, rng);
    const auto& op = *p.op;
    double worst_i = 0, worst_a = 0, worst_p = 0;
    int pairs_a = 0;
    for (int k = 0; k < 50; ++k) {
        const ComplexVector x = rng.complex_normal_vector(12);
        const ComplexVector d = rng.complex_normal_vector(12).normalized();
        worst_i = std::max(worst_i, fd_error([&](const ComplexVector& v) { return grad_intensity(op, p.b0, v); }, x, d));
        const std::vector<char> keep = twf_truncation_set(op, p.b0, x, TwfBounds{});
        worst_p = std::max(worst_p, fd_error([&](const ComplexVector& v) { return poisson_loss(op, p.b0, keep, v); }, x, d));
    }
    while (pairs_a < 50) {
        const ComplexVector x = rng.complex_normal_vector(12);
        if (op.forward(x).cwiseAbs().minCoeff() <= 0.1) continue;
        const ComplexVector d = rng.complex_normal_vector(12).normalized();
        worst_a = std::max(worst_a, fd_error([&](const ComplexVector& v) { return grad_amplitude(op, p.b0, v); }, x, d));
        ++pairs_a;
    }
    const bool ok = worst_i < 1e-6 && worst_a < 1e-6 && worst_p < 1e-6;
    report(4, "finite-difference gradients", ok, fmt("intensity %.2g amplitude %.2g poisson %.2g", worst_i, worst_a, worst_p));
}

// 5
void adjoint_contract() {
    RandomSource rng(5);
    ComplexMatrix a(20, 13);
    for (Index i = 0; i < 20; ++i)
        for (Index j = 0; j < 13; ++j) a(i, j) = rng.complex_normal();
    const double d = adjoint_dot_test(DenseOperator(a), 20, rng);
    const auto masks = make_octanary_masks(3, 16, 11);
    const double f = adjoint_dot_test(MaskedFourierOperator(4, 4, masks.masks), 20, rng);
    report(5, "operator adjoint contract", d < 1e-10 && f < 1e-10, fmt("dense %.2g masked-fourier %.2g", d, f));
}

// 6
void initializer_oracle() {
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        RandomSource prng(600 + seed);
        const PhaseProblem p = build_gaussian_problem(8, 160, true, prng);
        const ComplexMatrix& a = dense(p).matrix();
        InitOptions io;
        io.power_iters = 20000;
        io.power_tol = 1e-13;
        struct Case {
            InitMethod method;
            ComplexVector expected;
        };
        const std::vector<Case> cases = {
            {InitMethod::Spectral, oracle::top_eigenvector(oracle::spectral_matrix(a, p.b0)).vector},
            {InitMethod::Truncated, oracle::top_eigenvector(oracle::truncated_matrix(a, p.b0, 3.0)).vector},
            {InitMethod::Amplitude, oracle::top_eigenvector(oracle::subset_matrix(a, p.b0, 1.0 / 6.0, true)).vector},
            {InitMethod::Weighted, oracle::top_eigenvector(oracle::weighted_matrix(a, p.b0, 1.0)).vector},
            {InitMethod::Orthogonal, oracle::bottom_eigenvector(oracle::subset_matrix(a, p.b0, 0.5, false)).vector},
        };
        for (const auto& c : cases) {
            io.method = c.method;
            RandomSource rng(seed);
            worst = std::min(worst, oracle::abs_correlation(initialize(p, io, rng).x0, c.expected));
        }
    }
    double angle_err = 0;
    RandomSource prng(66);
    const PhaseProblem p = build_gaussian_problem(8, 40, true, prng);
    for (double theta : {0.0, 0.3, std::acos(-1.0) / 4, 1.0, std::acos(-1.0) / 2}) {
        InitOptions io;
        io.method = InitMethod::Angle;
        io.angle = theta;
        RandomSource rng(7);
        const ComplexVector x0 = initialize(p, io, rng).x0;
        const double c = std::min(1.0, oracle::abs_correlation(x0, *p.xt));
        angle_err = std::max(angle_err, std::abs(std::cos(theta) - c));
    }
    report(6, "initializer eigen-oracle", worst >= 1 - 1e-6 && angle_err < 1e-10,
           fmt("min |corr| %.12f angle err %.2g", worst, angle_err));
}

// 7
void coordinate_descent_oracle() {
    double worst = -INFINITY;
    for (std::uint64_t s = 0; s < 5; ++s) {
        RandomSource prng(700 + s);
        const PhaseProblem p = build_gaussian_problem(2, 6, false, prng);
        const Eigen::MatrixXd a = dense(p).matrix().real();
        OptionOverlay ov;
        ov.set("algorithm", "coordinatedescent").set("maxIters", "3000").set("tol", "1e-300");
        const SolveResult r = run(p, ov, s);
        const double f_cd = oracle::intensity_objective(dense(p).matrix(), p.b0, r.x);
        const double f_grid = oracle::grid_minimum_2d(a, p.b0, 2.0 * p.xt->norm(), 1e-3);
        worst = std::max(worst, f_cd - f_grid);
    }
    report(7, "coordinate-descent global optimum", worst <= 1e-8, fmt("max f_cd - f_grid = %.3g", worst));
}

// 8
void reduction_identities() {
    RandomSource prng(8);
    const PhaseProblem p = build_gaussian_problem(5, 20, true, prng);
    double fienup_gap = 0;
    for (int k = 1; k <= 15; ++k) {
        OptionOverlay gs, fi;
        gs.set("algorithm", "gerchbergsaxton").set("maxIters", std::to_string(k)).set("tol", "1e-300");
        fi = gs;
        fi.set("algorithm", "fienup").set("FienupTuning", "1");
        const SolveResult a = run(p, gs, 3), b = run(p, fi, 3);
        fienup_gap = std::max(fienup_gap, (a.x - b.x).norm() / a.x.norm());
    }

    RandomSource prng2(81);
    const PhaseProblem q = build_gaussian_problem(8, 64, true, prng2);
    InitOptions io;
    io.method = InitMethod::Weighted;
    io.weight_exponent = 2.0;
    RandomSource r1(9), r2(9);
    const ComplexVector w = initialize(q, io, r1).x0;
    io.method = InitMethod::Spectral;
    const ComplexVector s = initialize(q, io, r2).x0;
    const double weighted_gap = (w - s).norm();

    OptionOverlay pm, pl;
    pm.set("algorithm", "phasemax").set("maxIters", "20");
    pl = pm;
    pl.set("algorithm", "phaselamp").set("phaseLampOuterIters", "1");
    const SolveResult ma = run(q, pm, 4), la = run(q, pl, 4);
    const double lamp_gap = (ma.x - la.x).norm();

    OptionOverlay lower, mixed;
    lower.set("algorithm", "wirtflow");
    mixed.set("algorithm", "WirtFlow");
    const SolveResult c1 = run(q, lower, 12), c2 = run(q, mixed, 12);
    bool same_opts = true;
    for (const auto& info : option_registry())
        same_opts = same_opts && get_option(c1.resolved, info.name) == get_option(c2.resolved, info.name);
    const bool same_out = c1.x == c2.x && c1.outs.residuals == c2.outs.residuals;

    const bool ok = fienup_gap <= 1e-12 && weighted_gap == 0.0 && lamp_gap == 0.0 && same_opts && same_out;
    report(8, "reduction identities", ok,
           fmt("fienup/gs %.2g weighted/spectral %.2g lamp/max %.2g", fienup_gap, weighted_gap, lamp_gap) +
               (same_opts && same_out ? " registry identical" : " registry differs"));
}

// 9
void metric_suite() {
    bool ok = true;
    auto expect = [&](bool c) { ok = ok && c; };
    const Complex I{0, 1};
    ComplexVector xt(3);
    xt << Complex{1, 2}, Complex{-0.5, 0}, Complex{0, 3};
    expect(std::abs(align_phase(xt, xt).alpha - 1.0) < 1e-15);
    const PhaseAlignment ai = align_phase(I * xt, xt);
    expect(std::abs(ai.alpha + I) < 1e-15 && (ai.aligned - xt).norm() < 1e-15);
    const PhaseAlignment a2 = align_phase(2.0 * xt, xt);
    expect(std::abs(a2.alpha - 0.5) < 1e-15 && (a2.aligned - xt).norm() < 1e-15);
    expect(recon_error(std::polar(1.0, 0.7) * xt, xt) < 1e-15);
    expect(recon_error(ComplexVector::Zero(3), xt) == 1.0);
    ComplexVector e1(2), e2(2), ones(2);
    e1 << 1, 0;
    e2 << 0, 1;
    ones << 1, 1;
    expect(std::abs(recon_error(e2, e1) - 1.0) < 1e-15);
    const auto id = DenseOperator::identity(1);
    ComplexVector one(1);
    one << 1;
    RealVector two(1);
    two << 2;
    expect(std::abs(measurement_error(*id, one, two) - 0.5) < 1e-15);
    expect(std::abs(measurement_error(*id, ComplexVector::Zero(1), two) - 1.0) < 1e-15);
    expect(measurement_error(*id, 2.0 * one, two) == 0.0);
    expect(std::abs(correlation(xt, xt) - 1.0) < 1e-15);
    expect(correlation(e1, e2) == 0.0);
    expect(std::abs(correlation(ones, e1) - 1.0 / std::sqrt(2.0)) < 1e-15);
    bool degenerate = false;
    expect(correlation(ComplexVector::Zero(2), e1, &degenerate) == 0.0 && degenerate);

    RandomSource rng(9);
    for (int k = 0; k < 100; ++k) {
        const ComplexVector x = rng.complex_normal_vector(6), y = rng.complex_normal_vector(6);
        const Complex ph = std::polar(1.0, 6.0 * rng.uniform());
        const double sc = 0.1 + 10.0 * rng.uniform();
        const double base = recon_error(x, y);
        expect(std::abs(recon_error(ph * x, y) - base) < 1e-12);
        expect(std::abs(recon_error(x, ph * y) - base) < 1e-12);
        expect(std::abs(recon_error(sc * x, y) - base) < 1e-12);
        const double c = correlation(x, y);
        expect(std::abs(correlation(y, x) - c) < 1e-12);
        expect(std::abs(correlation(sc * ph * x, y) - c) < 1e-12);
        const PhaseAlignment al = align_phase(x, y);
        const double best = (y - al.aligned).norm();
        for (int j = 0; j < 50; ++j) {
            const Complex probe = al.alpha + Complex{rng.normal(), rng.normal()} * (j < 25 ? 1e-3 : 1.0);
            expect(best <= (y - probe * x).norm());
        }
    }
    report(9, "metric unit suite", ok, ok ? "all examples and invariance properties hold" : "mismatch");
}

// 10
void benchmark_harness() {
    auto make = [] {
        BenchmarkConfig c;
        c.xitem = "m/n";
        c.xvals = {2, 4, 6};
        c.yitem = "reconError";
        c.dataset = "1DGaussian";
        c.params.num_trials = 2;
        c.params.n = 16;
        c.params.is_complex = true;
        c.params.num_threads = 4;
        for (const std::string alg : {"gerchbergsaxton", "wirtflow"}) {
            AlgorithmSpec s;
            s.label = alg;
            s.overlay.set("algorithm", alg);
            c.algorithms.push_back(s);
        }
        validate(c);
        return c;
    };
    const BenchmarkConfig cfg = make();
    const std::string csv1 = results_csv(run_benchmark(cfg, 2024));
    const std::string csv2 = results_csv(run_benchmark(make(), 2024));
    const std::string header = "algorithm,xitem,xvalue,yitem,trial,yvalue,runtime_s,iterations,termination\n";
    std::size_t lines = 0;
    for (char ch : csv1) lines += ch == '\n';
    const bool schema = csv1.rfind(header, 0) == 0 && lines == 1 + 2 * 3 * 2;

    bool agg = true;
    RandomSource rng(10);
    for (int k = 0; k < 200; ++k) {
        const auto len = static_cast<std::size_t>(1 + rng.uniform_index(99));
        std::vector<double> v(len);
        for (auto& e : v) e = std::pow(10.0, -8.0 * rng.uniform());
        agg = agg && aggregate(v, "median", 1e-5, false) == oracle::median(v);
        const double c = 1e-5;
        double hits = 0;
        for (double e : v) hits += e < c ? 1 : 0;
        agg = agg && std::abs(aggregate(v, "successrate", c, false) - hits / static_cast<double>(len)) < 1e-15;
    }
    report(10, "benchmark harness", schema && csv1 == csv2 && agg,
           std::string(schema ? "schema+rows ok" : "schema/rows wrong") + (csv1 == csv2 ? ", deterministic" : ", nondeterministic") +
               (agg ? ", aggregation ok" : ", aggregation mismatch"));
}

// 11
void out_of_scope_and_bundle() {
    std::printf("[SKIP] criterion 11  empirical transmission-matrix datasets: out of scope (external data)\n");
    RandomSource prng(11);
    const PhaseProblem p = build_gaussian_problem(6, 36, true, prng);
    const auto path = std::filesystem::temp_directory_path() / "phasepack_acceptance_bundle.bin";
    save_measurement_bundle(p, path);
    const PhaseProblem q = load_measurement_bundle(path);
    std::filesystem::remove(path);
    const bool exact = dense(q).matrix() == dense(p).matrix() && q.b0 == p.b0;
    OptionOverlay ov;
    ov.set("algorithm", "gerchbergsaxton").set("maxIters", "2000").set("tol", "1e-10");
    RandomSource rng(1);
    const SolveResult r = solve_phase_retrieval(q.op, q.b0, std::nullopt, ov, rng);
    const double me = measurement_error(*q.op, r.x, q.b0);
    report(11, "bundle write/read/solve substitute", exact && me < 1e-6,
           std::string(exact ? "bit-exact round trip" : "round trip differs") + fmt(", measurement error %.2g", me));
}

} // namespace

int main() {
    const std::vector<std::function<void()>> criteria = {
        exact_recovery,      sampling_monotonicity, signal_demo,     gradient_correctness,
        adjoint_contract,    initializer_oracle,    coordinate_descent_oracle, reduction_identities,
        metric_suite,        benchmark_harness,     out_of_scope_and_bundle};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "exception", false, e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
