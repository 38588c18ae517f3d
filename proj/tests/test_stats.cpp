#include <doctest.h>

#include <cmath>
#include <random>

#include "o3cp1/fields.hpp"
#include "o3cp1/stats.hpp"

using namespace o3cp1;

TEST_CASE("jackknife of a constant series") {
    const std::vector<double> v(200, 3.25);
    const auto r = jackknife(v, 5);
    CHECK(r.mean == 3.25);
    CHECK(r.error == 0.0);
    CHECK(r.bins == 40);
}

TEST_CASE("jackknife of an alternating series") {
    std::vector<double> v;
    for (int k = 0; k < 100; ++k) v.push_back(k % 2 == 0 ? 1.0 : -1.0);
    const auto r = jackknife(v, 2);
    CHECK(r.mean == 0.0);
    CHECK(r.error == 0.0);
    CHECK(r.bins == 50);
}

TEST_CASE("jackknife on independent samples matches the naive error") {
    Rng rng(1);
    std::vector<double> v(4000);
    for (double& x : v) x = standard_normal(rng);
    const auto r = jackknife(v, 1);
    double m = 0.0, m2 = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) m2 += (x - m) * (x - m);
    CHECK(r.mean == doctest::Approx(m));
    CHECK(r.error == doctest::Approx(std::sqrt(m2 / (v.size() - 1) / v.size())).epsilon(1e-10));
}

TEST_CASE("binned jackknife recovers the AR(1) integrated error") {
    Rng rng(2);
    const double phi = 0.9;
    const std::size_t n = 200000;
    std::vector<double> v(n);
    double x = 0.0;
    for (std::size_t k = 0; k < 1000; ++k) x = phi * x + std::sqrt(1 - phi * phi) * standard_normal(rng);
    for (auto& e : v) {
        x = phi * x + std::sqrt(1 - phi * phi) * standard_normal(rng);
        e = x;
    }
    const double expected = std::sqrt((1 + phi) / (1 - phi) / n);
    const auto r = jackknife(v, 200);
    CHECK(r.error == doctest::Approx(expected).epsilon(0.25));
    CHECK(r.error_doubled > 0.0);
    // unbinned errors underestimate by sqrt(2 tau_int)
    CHECK(jackknife(v, 1).error < 0.5 * expected);
}

TEST_CASE("too few bins are rejected") {
    const std::vector<double> v(39, 1.0);
    CHECK_THROWS_AS(jackknife(v, 2), ValidationError);
    CHECK_THROWS_AS(jackknife(v, 0), ValidationError);
    CHECK_NOTHROW(jackknife(std::vector<double>(40, 1.0), 2));
}

TEST_CASE("stability flag compares doubled bins") {
    Rng rng(3);
    std::vector<double> white(4000);
    for (double& x : white) x = standard_normal(rng);
    CHECK(jackknife(white, 50).stable);

    // blocks of 400 identical values: bins of 20 are badly correlated
    std::vector<double> blocky;
    for (int b = 0; b < 20; ++b) {
        const double v = standard_normal(rng);
        for (int k = 0; k < 400; ++k) blocky.push_back(v);
    }
    const auto r = jackknife(blocky, 20);
    CHECK(r.error_doubled > 0.0);
    CHECK(std::abs(r.error_doubled / r.error - 1.0) > 0.2);
    CHECK_FALSE(r.stable);

    const auto no_double = jackknife(std::vector<double>(30, 1.0), 1);
    CHECK(no_double.error_doubled < 0.0);
    CHECK(no_double.stable);
}

TEST_CASE("series helpers") {
    ObservableSeries s{"e", std::vector<double>(105, 2.0), {}, 5, 0};
    CHECK(s.n_bins() == 21);
    CHECK(jackknife(s).bins == 21);
    CHECK(bin_size_for(1000, 50) == 20);
    CHECK(bin_size_for(10, 50) == 1);
}
