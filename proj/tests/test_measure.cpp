#include <doctest.h>

#include <cmath>
#include <numbers>

#include "o3cp1/measure.hpp"

using namespace o3cp1;
constexpr double kHalfPi = std::numbers::pi / 2;

TEST_CASE("mollified delta is a normalized Gaussian") {
    double sum = 0.0;
    const double h = 1e-4;
    for (double t = -1.0; t <= 1.0; t += h) sum += mollified_delta(t, 0.05) * h;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mollified_delta(0.0, 0.1) == doctest::Approx(1.0 / (0.1 * std::sqrt(2 * std::numbers::pi))));
}

TEST_CASE("measure left-hand side against the consistent reference") {
    const Vector3d n(0.6, 0.0, 0.8);
    for (double eps : {0.1, 0.05}) {
        const auto lhs = measure_lhs(n, eps);
        CHECK(lhs.value / reference_density(n, eps) == doctest::Approx(kHalfPi).epsilon(1e-6));
        CHECK(lhs.error < 1e-6 * lhs.value);
    }
    const Vector3d pole(0, 0, 1);
    CHECK(measure_lhs(pole, 0.05).value / reference_density(pole, 0.05) ==
          doctest::Approx(kHalfPi).epsilon(1e-6));
}

TEST_CASE("literal mollified reference differs by a fixed factor") {
    const Vector3d n(0.6, 0.0, 0.8);
    const double lhs = measure_lhs(n, 0.025).value;
    CHECK(lhs / naive_reference_density(n, 0.025) ==
          doctest::Approx(std::numbers::pi / (4 * std::sqrt(2.0))).epsilon(2e-3));
}

TEST_CASE("support away from the sphere") {
    CHECK(measure_lhs(Vector3d(0, 0, 2), 0.05).value < 1e-12);
    for (double eps : {0.1, 0.05}) CHECK(measure_lhs(Vector3d(0, 0, 1 + 12 * eps), eps).value < 1e-12);
    const double eps = 0.05;
    CHECK(measure_lhs(Vector3d(0.6, 0, 0.8) * (1 - 12 * eps), eps).value < 1e-12);
    CHECK(measure_lhs(Vector3d(0, 0, 0), eps).value < 1e-12);
}

TEST_CASE("rotation invariance of the left-hand side") {
    const Vector3d a(0.6, 0.0, 0.8), b(0.0, -0.8, 0.6);
    const double va = measure_lhs(a, 0.1).value, vb = measure_lhs(b, 0.1).value;
    CHECK(va == doctest::Approx(vb).epsilon(1e-6));
}

TEST_CASE("Cartesian grid agrees with the polar quadrature") {
    const Vector3d n(0.6, 0.0, 0.8);
    const double polar = measure_lhs(n, 0.1).value;
    CHECK(measure_lhs_cartesian(n, 0.1) == doctest::Approx(polar).epsilon(5e-3));
    CHECK_THROWS_AS(measure_lhs_cartesian(n, 0.1, 2), ValidationError);
}

TEST_CASE("under-resolved quadrature is rejected") {
    MeasureQuad q;
    q.panels_per_eps = 0.25;
    CHECK_THROWS_AS(measure_lhs(Vector3d(0, 0, 1), 0.1, q), ValidationError);
    q = {};
    q.order = 2;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    q = {};
    q.cutoff_sigma = 4;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    CHECK_NOTHROW(MeasureQuad{}.validate());
}

TEST_CASE("phi roots in closed form") {
    const auto a = check_phi_roots(Vector3d(0.0, 0.8, -0.6));
    CHECK(a.root_closed == doctest::Approx(kHalfPi));
    CHECK(a.root_numeric_pos == doctest::Approx(kHalfPi));
    CHECK(a.root_numeric_neg == doctest::Approx(-kHalfPi));
    CHECK(a.slope_closed == doctest::Approx(0.8));
    CHECK(a.max_deviation() < 1e-10);

    const auto b = check_phi_roots(Vector3d(0.5, 0.5, 1 / std::sqrt(2.0)));
    CHECK(b.slope_closed == doctest::Approx(0.5));
    CHECK(b.root_closed == doctest::Approx(std::acos(0.5 / std::sqrt(0.5))));
    CHECK(b.max_deviation() < 1e-10);

    CHECK_THROWS_AS(check_phi_roots(Vector3d(1, 0, 0)), ValidationError);
}

TEST_CASE("reduction stages share one value") {
    const Vector3d n(0.6, 0.0, 0.8);
    const double eps = 0.1;
    const double fin = final_stage_value(n, eps);
    CHECK(fin == doctest::Approx(kHalfPi * reference_density(n, eps)));
    for (auto stage : {ReductionStage::Raw4d, ReductionStage::AfterRTheta, ReductionStage::AfterS}) {
        const auto v = reduction_stage_value(n, eps, stage);
        CHECK_MESSAGE(v.value == doctest::Approx(fin).epsilon(1e-5), stage_label(stage));
    }
    // sqrt(1 - 0.36 - 0.64) = 0: the phi roots are degenerate here
    CHECK_THROWS_AS(reduction_stage_value(n, eps, ReductionStage::AfterPhi), ValidationError);
    const Vector3d m(0.0, 0.8, 0.6);
    CHECK_THROWS_AS(reduction_stage_value(m, eps, ReductionStage::AfterPhi), ValidationError);
    CHECK(reduction_stage_value(m, 0.05, ReductionStage::AfterPhi).value ==
          doctest::Approx(final_stage_value(m, 0.05)).epsilon(1e-5));
    CHECK(all_stages().size() == 4);
    CHECK(stage_label(ReductionStage::AfterS) == "after-S");
}

TEST_CASE("Richardson extrapolation in eps^2") {
    auto f = [](double e) { return 1.5 + 0.3 * e * e - 2.0 * e * e * e * e; };
    const std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<double> v;
    for (double e : eps) v.push_back(f(e));
    CHECK(richardson_eps2(eps, v) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK_THROWS_AS(richardson_eps2({0.1}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("constant extraction needs a ladder and enough points") {
    Rng rng(3);
    const auto pts = random_sphere_points(10, rng);
    MollifierConfig single;
    single.ladder = {0.5};
    const auto biased = verify_constant_c(single, pts);
    CHECK_FALSE(biased.pass);
    CHECK(biased.message.find("single-width") != std::string::npos);

    const auto few = verify_constant_c(MollifierConfig{}, {Vector3d(0, 0, 1)});
    CHECK_FALSE(few.pass);

    MollifierConfig bad;
    bad.ladder = {0.05, 0.1};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad.ladder = {0.1, -0.05};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("one-site ratio examples") {
    const auto r0 = one_site_ratio_test(0.0);
    CHECK(r0.lhs == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-10));
    CHECK(r0.rel_diff() < 1e-10);
    for (double lambda : {1.0, 2.5}) {
        const auto r = one_site_ratio_test(lambda);
        CHECK(r.rel_diff() < 1e-10);
        CHECK(r.rhs / r.closed_form == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("Kolmogorov-Smirnov helpers") {
    std::vector<double> grid;
    for (int k = 0; k < 1000; ++k) grid.push_back((k + 0.5) / 1000.0);
    CHECK(ks_statistic_uniform(grid, 0.0, 1.0) == doctest::Approx(0.0005));
    CHECK(ks_statistic_uniform({0.0, 0.0}, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(ks_critical_value_1pct(10000) == doctest::Approx(0.0162762));
    CHECK_THROWS_AS(ks_statistic_uniform({}, 0.0, 1.0), ValidationError);
}
