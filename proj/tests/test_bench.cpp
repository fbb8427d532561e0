#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qread/bench.hpp"
#include "qread/rng.hpp"
#include "table_fixtures.hpp"

using namespace qread;

TEST_CASE("test function evaluators match their stored grids") {
    for (const TestFunction& fn : {make_gaussian2d(5), make_sine2d(5), make_ramp1d(6)}) {
        for (uint64_t j = 0; j < fn.spec.total(); ++j) {
            const double v = fn.eval(fn.spec.point(index_unmap(j, fn.spec)));
            CHECK(std::abs(v - fn.values[j]) < 1e-12);
        }
    }
}

TEST_CASE("loglog slope fitting") {
    std::vector<double> x{10, 100, 1000, 10000, 100000};
    std::vector<double> y;
    for (double v : x) y.push_back(std::pow(v, -0.5));
    auto [s1, se1] = fit_loglog_slope(x, y);
    CHECK(std::abs(s1 - (-0.5)) < 1e-12);
    CHECK(se1 < 1e-12);

    std::vector<double> c(x.size(), 3.7);
    auto [s2, se2] = fit_loglog_slope(x, c);
    CHECK(std::abs(s2) < 1e-12);

    // y = 3 x^(-1/3) (1 + 0.01 noise)
    Rng rng(5);
    std::vector<double> yn;
    for (double v : x) yn.push_back(3.0 * std::pow(v, -1.0 / 3.0) *
                                    (1.0 + 0.01 * (2.0 * rng.uniform01() - 1.0)));
    auto [s3, se3] = fit_loglog_slope(x, yn);
    CHECK(std::abs(s3 - (-1.0 / 3.0)) < 0.02);

    CHECK_THROWS(fit_loglog_slope({1, 2, 3}, {1, 2, 3}));          // too few points
    CHECK_THROWS(fit_loglog_slope({1, 1, 1, 1}, {1, 2, 3, 4}));    // degenerate abscissa
}

TEST_CASE("rsr medians decrease monotonically on the sine example") {
    const TestFunction fn = make_sine2d(8);
    BenchOptions opt;
    opt.repeats = 3;
    opt.seed = 11;
    const std::vector<double> shots{1e4, 4e4, 1.6e5, 6.4e5, 2.56e6};
    const ScalingRun run = run_scaling_experiment("rsr", fn, AbscissaKind::Shots, shots, opt);
    REQUIRE(run.points.size() == 5);
    for (size_t i = 1; i < run.points.size(); ++i)
        CHECK(run.points[i].median_error < run.points[i - 1].median_error);
}

TEST_CASE("shot-free fsr block sweep on the band-limited sine") {
    const TestFunction fn = make_sine2d(6);
    BenchOptions opt;
    const ScalingRun run =
        run_scaling_experiment("fsr", fn, AbscissaKind::BlockM, {2, 4, 8, 16}, opt);
    for (const auto& p : run.points) {
        CHECK(p.median_error < 1e-10);
        CHECK(p.median_error > 0.0);  // floating-point floor, never exactly zero
    }
}

TEST_CASE("shot-free arsr block sweep decays at second order") {
    const TestFunction fn = make_gaussian2d(8);
    BenchOptions opt;
    const ScalingRun run =
        run_scaling_experiment("arsr", fn, AbscissaKind::BlockM, {2, 4, 8, 16, 32, 64}, opt);
    REQUIRE(run.fitted);
    CHECK(run.slope == doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("scaling runs are bit-reproducible under a fixed seed") {
    const TestFunction fn = make_sine2d(6);
    BenchOptions opt;
    opt.repeats = 2;
    opt.seed = 77;
    const std::vector<double> shots{1e4, 4e4, 1.6e5, 6.4e5};
    const ScalingRun a = run_scaling_experiment("fsr", fn, AbscissaKind::Shots, shots, opt);
    const ScalingRun b = run_scaling_experiment("fsr", fn, AbscissaKind::Shots, shots, opt);
    REQUIRE(a.points.size() == b.points.size());
    for (size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].errors == b.points[i].errors);
        CHECK(a.points[i].seeds == b.points[i].seeds);
    }
    CHECK(a.slope == b.slope);
}

TEST_CASE("shot estimator reproduces both resource tables") {
    for (const auto& row : fixtures::shot_table_rows()) {
        const double est = estimate_required_shots(row.method, row.d, row.eps, row.cls);
        CHECK(round_sig(est, 2) == doctest::Approx(row.shots).epsilon(1e-12));
        CHECK(fixtures::table_acceleration(row) == doctest::Approx(row.accel).epsilon(1e-12));
    }
    CHECK_THROWS(estimate_required_shots("rsr", 4, 0.01, RegularityClass::W21));
    CHECK_THROWS(estimate_required_shots("fsqae", 2, 0.01, RegularityClass::W21));
}

TEST_CASE("postproc study shapes") {
    // small, fast configuration; full-scale behavior is covered by acceptance
    const auto f = [](double x, double y) {
        return std::exp(-25.0 * ((x - 0.65) * (x - 0.65) + (y - 0.65) * (y - 0.65))) +
               std::exp(-16.0 * ((x - 0.35) * (x - 0.35) + (y - 0.35) * (y - 0.35)));
    };
    const PostprocStudy st = run_postproc_study(f, {3, 4, 5, 6}, 160000, 3);
    REQUIRE(st.methods.size() == 4);
    REQUIRE(st.errors[0].size() == 4);
    for (const auto& per_method : st.errors)
        for (double e : per_method) {
            CHECK(e > 0.0);
            CHECK(e < 1.0);
        }
    // RMS is the flattest of the four on growing grids
    for (size_t mi = 1; mi < st.methods.size(); ++mi) CHECK(st.slopes[0] < st.slopes[mi]);
}
