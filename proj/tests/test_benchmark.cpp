#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "phasepack/benchmark.hpp"

using namespace phasepack;
namespace fs = std::filesystem;

namespace {

BenchmarkConfig config(std::vector<std::string> algorithms, std::vector<double> xvals, int trials, int n) {
    BenchmarkConfig c;
    c.xitem = "m/n";
    c.xvals = std::move(xvals);
    c.yitem = "reconError";
    c.dataset = "1DGaussian";
    c.params.num_trials = trials;
    c.params.n = n;
    for (const auto& a : algorithms) {
        AlgorithmSpec s;
        s.overlay.set("algorithm", a);
        c.algorithms.push_back(s);
    }
    return c;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kHeader = "algorithm,xitem,xvalue,yitem,trial,yvalue,runtime_s,iterations,termination\n";

} // namespace

TEST_CASE("aggregation policies") {
    CHECK(aggregate({1, 2, 9}, "median", 1e-5) == 2);
    CHECK(aggregate({1, 2, 9, 10}, "median", 1e-5) == 5.5);
    CHECK(aggregate({1e-6, 1, 1e-7}, "successrate", 1e-5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(aggregate({1, 2, 9}, "average", 1e-5) == 4);
    CHECK(aggregate({3, 1, 2}, "best", 1e-5) == 1);
    CHECK(aggregate({0.3, 0.9, 0.2}, "best", 1e-5, true) == 0.9);
    CHECK(code_of([] { aggregate({1}, "mode", 1e-5); }) == ErrorCode::InvalidValue);
    CHECK(code_of([] { aggregate({}, "median", 1e-5); }) == ErrorCode::InvalidArgument);

    RandomSource rng(1);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> v(static_cast<std::size_t>(1 + rng.uniform_index(99)));
        for (auto& e : v) e = rng.normal();
        CHECK(aggregate(v, "median", 1e-5) == oracle::median(v));
        double sum = 0;
        for (double e : v) sum += e;
        CHECK(aggregate(v, "average", 1e-5) == doctest::Approx(sum / static_cast<double>(v.size())).epsilon(1e-12));
        CHECK(aggregate(v, "best", 1e-5) == *std::min_element(v.begin(), v.end()));
    }
}

TEST_CASE("config validation") {
    BenchmarkConfig masks = config({"wirtflow"}, {1, 2}, 1, 8);
    masks.xitem = "masks";
    const ErrorCode c = code_of([&] { validate(masks); });
    CHECK(c == ErrorCode::Configuration);
    try {
        validate(masks);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("2DImage") != std::string::npos);
    }

    BenchmarkConfig none = config({}, {2}, 1, 8);
    CHECK(code_of([&] { validate(none); }) == ErrorCode::InvalidValue);

    BenchmarkConfig corr = config({"wirtflow"}, {2}, 1, 8);
    corr.yitem = "correlation";
    corr.params.policy = "successrate";
    CHECK(code_of([&] { validate(corr); }) == ErrorCode::Configuration);

    BenchmarkConfig order = config({"wirtflow"}, {4, 2}, 1, 8);
    CHECK(code_of([&] { validate(order); }) == ErrorCode::InvalidValue);

    BenchmarkConfig empty_x = config({"wirtflow"}, {}, 1, 8);
    CHECK(code_of([&] { validate(empty_x); }) == ErrorCode::InvalidValue);

    BenchmarkConfig dup = config({"wirtflow", "WirtFlow"}, {2}, 1, 8);
    CHECK(code_of([&] { validate(dup); }) == ErrorCode::InvalidValue);

    BenchmarkConfig names = config({"wirtflow"}, {2}, 1, 8);
    names.xitem = "M/N";
    names.yitem = "reconerror";
    names.dataset = "1dgaussian";
    CHECK_NOTHROW(validate(names));
    CHECK(names.xitem == "m/n");
    CHECK(names.yitem == "reconError");
    CHECK(names.dataset == "1DGaussian");
}

TEST_CASE("row counts and schema") {
    BenchmarkConfig one = config({"gerchbergsaxton"}, {4}, 1, 8);
    validate(one);
    const BenchmarkResult r1 = run_benchmark(one, 3);
    CHECK(r1.table.size() == 1);

    BenchmarkConfig two = config({"wirtflow"}, {2, 4}, 3, 8);
    validate(two);
    const std::string csv = results_csv(run_benchmark(two, 3));
    CHECK(csv.rfind(kHeader, 0) == 0);
    CHECK(line_count(csv) == 1 + 2 * 3);
}

TEST_CASE("reduced example configuration is deterministic") {
    auto make = [] {
        BenchmarkConfig c = config({"gerchbergsaxton", "wirtflow"}, {2, 4, 6}, 2, 16);
        c.params.num_threads = 3;
        validate(c);
        return c;
    };
    const BenchmarkResult a = run_benchmark(make(), 11);
    const std::string csv = results_csv(a);
    CHECK(line_count(csv) == 1 + 2 * 3 * 2);
    CHECK(csv == results_csv(run_benchmark(make(), 11)));
    CHECK(csv != results_csv(run_benchmark(make(), 12)));
    CHECK(a.curves.size() == 2);

    // Canonical ordering: algorithm, then x value, then trial.
    CHECK(a.table.front().algorithm == "gerchbergsaxton");
    CHECK(a.table.back().algorithm == "wirtflow");
    CHECK(a.table[1].trial == 1);
    CHECK(a.table[2].xvalue == 4.0);
}

TEST_CASE("every algorithm sees the same problem instance") {
    BenchmarkConfig c = config({"wirtflow"}, {3}, 2, 8);
    validate(c);
    const PhaseProblem p = benchmark_problem(c, 3, 1, 5);
    c.algorithms.front().overlay.set("algorithm", "raf");
    const PhaseProblem q = benchmark_problem(c, 3, 1, 5);
    const auto& a = dynamic_cast<const DenseOperator&>(*p.op).matrix();
    const auto& b = dynamic_cast<const DenseOperator&>(*q.op).matrix();
    CHECK(a == b);
    CHECK(p.b0 == q.b0);
    CHECK(*p.xt == *q.xt);
    CHECK(p.m() == 24);
    CHECK(benchmark_problem(c, 3, 0, 5).b0 != p.b0);
}

TEST_CASE("full example configuration") {
    BenchmarkConfig c = config({"gerchbergsaxton", "wirtflow", "phasemax", "phaselamp"},
                               {1, 2, 2.25, 2.5, 2.75, 3, 3.25, 3.5, 3.75, 4, 5, 6}, 5, 20);
    c.algorithms[1].overlay.set("initMethod", "spectral");
    c.algorithms[2].overlay.set("maxIters", "1000");
    c.yitem = "reconerror";
    c.params.num_threads = 0;
    validate(c);
    const BenchmarkResult r = run_benchmark(c, 2018);
    CHECK(r.table.size() == 4 * 12 * 5);
    REQUIRE(r.curves.size() == 4);
    for (const auto& curve : r.curves) {
        CHECK(curve.yvals.size() == 12);
        for (double y : curve.yvals) {
            CHECK(std::isfinite(y));
            CHECK(y >= 0.0);
        }
    }
    // Gerchberg-Saxton: more measurements, smaller median error.
    CHECK(r.curves[0].yvals.back() <= r.curves[0].yvals.front());
}

TEST_CASE("other datasets and x items") {
    BenchmarkConfig img;
    img.xitem = "masks";
    img.xvals = {2, 4};
    img.yitem = "measurementError";
    img.dataset = "2DImage";
    AlgorithmSpec gs;
    gs.overlay.set("algorithm", "gerchbergsaxton").set("maxIters", "50");
    img.algorithms = {gs};
    validate(img);
    const BenchmarkResult r = run_benchmark(img, 1);
    CHECK(r.table.size() == 2);
    CHECK(benchmark_problem(img, 4, 0, 1).m() == 4 * 256);

    BenchmarkConfig snr = config({"wirtflow"}, {10, 30}, 2, 8);
    snr.xitem = "snr";
    snr.params.m_over_n = 6;
    validate(snr);
    CHECK(run_benchmark(snr, 2).table.size() == 4);

    BenchmarkConfig iters = config({"wirtflow"}, {1, 5}, 1, 8);
    iters.xitem = "iterations";
    validate(iters);
    const BenchmarkResult ri = run_benchmark(iters, 2);
    CHECK(ri.table[0].iterations <= 1);
    CHECK(ri.table[1].iterations <= 5);

    BenchmarkConfig angle = config({"wirtflow"}, {0.0, 0.5}, 1, 8);
    angle.xitem = "angle";
    angle.yitem = "correlation";
    validate(angle);
    const BenchmarkResult ra = run_benchmark(angle, 2);
    for (const auto& t : ra.table) {
        CHECK(t.yvalue >= 0.0);
        CHECK(t.yvalue <= 1.0 + 1e-12);
    }
}

TEST_CASE("artifact emission") {
    BenchmarkConfig c = config({"wirtflow"}, {2, 4}, 1, 8);
    c.params.record_signals = true;
    validate(c);
    const BenchmarkResult r = run_benchmark(c, 4);
    const fs::path dir = fs::temp_directory_path() / "phasepack_test_emit";
    fs::remove_all(dir);
    const auto files = emit_results(r, dir / "nested");
    CHECK(files.size() == 3);
    CHECK(slurp(dir / "nested" / "results.csv") == results_csv(r));
    const std::string svg = slurp(dir / "nested" / "plot.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("m/n") != std::string::npos);
    CHECK(fs::exists(dir / "nested" / "signals.csv"));

    BenchmarkResult empty = r;
    empty.curves.clear();
    CHECK(code_of([&] { emit_results(empty, dir); }) == ErrorCode::Configuration);

    std::ofstream(dir / "blocker") << "x";
    CHECK(code_of([&] { emit_results(r, dir / "blocker" / "sub"); }) == ErrorCode::Io);
    fs::remove_all(dir);
}

TEST_CASE("golden csv") {
    BenchmarkConfig c = config({"gerchbergsaxton", "wirtflow"}, {2, 4}, 2, 8);
    validate(c);
    const std::string csv = results_csv(run_benchmark(c, 7));
    const fs::path golden = fs::path(PHASEPACK_TEST_DATA) / "golden_results.csv";
    REQUIRE(fs::exists(golden));
    CHECK(csv == slurp(golden));
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
}
