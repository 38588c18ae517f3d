#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "o3cp1/mc.hpp"

using namespace o3cp1;

namespace {

ChainConfig two_site(Model m, long sweeps = 100000) {
    ChainConfig c;
    c.model = m;
    c.dims = {2};
    c.g = 1.0;
    c.sweeps = sweeps;
    c.seed = 31;
    c.max_r = 1;
    return c;
}

/// Langevin function: <n_z> for the weight exp(-lambda n_z) on S^2.
double field_mean_nz(double lambda) { return 1.0 / lambda - 1.0 / std::tanh(lambda); }

void check_within(const ObservableSeries& s, double target, double n_sigma = 4.0) {
    const auto j = jackknife(s.values, bin_size_for(s.values.size(), 50));
    CHECK_MESSAGE(std::abs(j.mean - target) < n_sigma * j.error,
                  s.name << " mean " << j.mean << " +- " << j.error << " target " << target);
}

}  // namespace

TEST_CASE("model and regime names") {
    for (auto m : {Model::O3, Model::CP1Pullback, Model::CP1Reduced, Model::CP1Gauged})
        CHECK(parse_model(model_name(m)) == m);
    CHECK(parse_regime("reduced") == GaugedRegime::Reduced);
    CHECK_THROWS_AS(parse_model("xy"), ValidationError);
    CHECK_THROWS_AS(parse_regime("other"), ValidationError);
}

TEST_CASE("split seeds are distinct and deterministic") {
    CHECK(split_seed(42, 0) == split_seed(42, 0));
    CHECK(split_seed(42, 0) != split_seed(42, 1));
    CHECK(split_seed(42, 0) != split_seed(43, 0));
}

TEST_CASE("zero proposal width leaves the state unchanged") {
    ChainState st(Model::CP1Reduced, Lattice({4, 4}), Coupling(1.0), 5);
    st.delta = 0.0;
    const auto z0 = st.z;
    CHECK(metropolis_sweep(st) == 1.0);
    CHECK(st.z == z0);
}

TEST_CASE("weak coupling gives near-unit acceptance") {
    for (auto m : {Model::O3, Model::CP1Pullback}) {
        ChainConfig c;
        c.model = m;
        c.dims = {4, 4};
        c.g = 1e6;
        c.sweeps = 3000;
        c.seed = 2;
        const auto r = run_chain(c);
        CHECK(r.acceptance > 0.99);
        CHECK(r.delta == doctest::Approx(max_proposal_width(m)));
    }
}

TEST_CASE("two-site O(3) chain against the exact correlator") {
    const double exact = 1.0 / std::tanh(1.0) - 1.0;
    CHECK(two_site_correlator_quadrature(Model::O3, GaugedRegime::Pullback, 1.0) ==
          doctest::Approx(exact).epsilon(1e-12));
    check_within(run_chain(two_site(Model::O3)).get("corr_1"), exact);
    check_within(run_chain(two_site(Model::CP1Pullback)).get("corr_1"), exact);
    auto gauged = two_site(Model::CP1Gauged);
    gauged.regime = GaugedRegime::Pullback;
    check_within(run_chain(gauged).get("corr_1"), exact);
}

TEST_CASE("gauged chain in the reduced regime samples the reduced marginal") {
    const double target = two_site_correlator_quadrature(Model::CP1Reduced, GaugedRegime::Reduced, 1.0);
    CHECK(target == doctest::Approx(0.4051644794).epsilon(1e-8));
    check_within(run_chain(two_site(Model::CP1Reduced)).get("corr_1"), target);
    auto gauged = two_site(Model::CP1Gauged);
    gauged.regime = GaugedRegime::Reduced;
    check_within(run_chain(gauged).get("corr_1"), target);
}

TEST_CASE("Gibbs gauge update draws N(b, g/2)") {
    const Lattice lat({100000});
    ChainState st(Model::CP1Gauged, lat, Coupling(0.8), 9);
    gibbs_gauge_update(st);
    double m = 0.0, m2 = 0.0;
    for (SiteIndex x = 0; x < lat.volume(); ++x) {
        const double d = st.a(lat, x, 0) - gauge_current(st.z[x], st.z[lat.neighbor(x, 0, 1)]);
        m += d;
        m2 += d * d;
    }
    const double n = static_cast<double>(lat.volume());
    m /= n;
    m2 = m2 / n - m * m;
    CHECK(std::abs(m) < 4.0 * std::sqrt(0.4 / n));
    CHECK(m2 == doctest::Approx(0.4).epsilon(0.02));

    ChainState cold(Model::CP1Gauged, Lattice({50}), Coupling(1e-10), 9);
    gibbs_gauge_update(cold);
    CHECK(std::abs(cold.a[7] - optimal_gauge(cold.z, cold.lat)[7]) < 1e-3);

    ChainState o3(Model::O3, Lattice({4}), Coupling(1.0), 1);
    CHECK_THROWS_AS(gibbs_gauge_update(o3), ValidationError);
}

TEST_CASE("external field on decoupled sites") {
    for (double lambda : {1.0, 2.5})
        for (auto m : {Model::O3, Model::CP1Pullback}) {
            ChainConfig c;
            c.model = m;
            c.dims = {2};
            c.g = 1e9;
            c.field = lambda;
            c.sweeps = 60000;
            c.seed = 12;
            check_within(run_chain(c).get("nz"), field_mean_nz(lambda));
        }
}

TEST_CASE("correlators") {
    const Lattice lat({4, 6});
    Rng rng(1);
    const auto n = random_spin_field(lat, rng);
    CHECK(correlator(n, lat, {0, 0}) == doctest::Approx(1.0));
    CHECK(correlator(constant_spin_field(lat, Vector3d(0, 0, 1)), lat, {2, 3}) == 1.0);
    CHECK_THROWS_AS(correlator(n, lat, {3, 0}), ValidationError);
    CHECK_THROWS_AS(correlator(n, lat, {1}), ValidationError);
    CHECK(axis_correlator(n, lat, 3) == doctest::Approx(correlator(n, lat, {0, 3})));
    CHECK_THROWS_AS(axis_correlator(n, lat, 4), ValidationError);

    ChainConfig c;
    c.g = 1e6;
    c.sweeps = 6000;
    c.seed = 3;
    const auto r = run_chain(c);
    const auto j = jackknife(r.get("corr_1"));
    CHECK(std::abs(j.mean) < 5 * j.error + 1e-3);
}

TEST_CASE("proposal tuning") {
    ChainState st(Model::O3, Lattice({4}), Coupling(1.0), 1);
    st.delta = 0.5;
    CHECK(tune_proposal(st, 0.9) == doctest::Approx(0.9));
    CHECK(tune_proposal(st, 0.5) == doctest::Approx(0.9));
    CHECK(tune_proposal(st, 0.05) == doctest::Approx(0.45));
    st.delta = 3.0;
    CHECK(tune_proposal(st, 1.0) == doctest::Approx(std::numbers::pi));
    st.frozen = true;
    CHECK_THROWS_AS(tune_proposal(st, 0.9), std::logic_error);
}

TEST_CASE("self-check agrees with full recomputation for every model") {
    for (auto m : {Model::O3, Model::CP1Pullback, Model::CP1Reduced, Model::CP1Gauged})
        for (auto regime : {GaugedRegime::Reduced, GaugedRegime::Pullback}) {
            ChainConfig c;
            c.model = m;
            c.regime = regime;
            c.dims = {3, 4};
            c.g = 0.7;
            c.field = 0.3;
            c.sweeps = 300;
            c.thermalization = 100;
            c.seed = 8;
            c.self_check = true;
            ChainResult r;
            CHECK_NOTHROW(r = run_chain(c));
            require_unit_field(r.final_n, Lattice(c.dims), "final");
            if (m != Model::O3) require_unit_field(r.final_z, Lattice(c.dims), "final");
        }
}

TEST_CASE("runs are deterministic in the seed") {
    ChainConfig c;
    c.model = Model::CP1Gauged;
    c.dims = {4, 4};
    c.sweeps = 2000;
    c.seed = 77;
    const auto a = run_chain(c), b = run_chain(c);
    for (std::size_t k = 0; k < a.series.size(); ++k) CHECK(a.series[k].values == b.series[k].values);
    c.stream = 1;
    CHECK(run_chain(c).series[0].values != a.series[0].values);
}

TEST_CASE("chain configuration") {
    ChainConfig c;
    CHECK(c.effective_thermalization() == 5000);
    c.sweeps = 2000;
    CHECK(c.effective_thermalization() == 1000);
    c.sweeps = 1000;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.g = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.dims = {1, 4};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.measure_every = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);

    c = {};
    c.sweeps = 2000;
    c.seed = 1;
    const auto r = run_chain(c);
    CHECK(r.get("energy").values.size() == 200);
    CHECK(r.get("energy").sweeps.front() == 1005);
    CHECK(r.get("corr_4").values.size() == 200);
    CHECK_THROWS_AS(r.get("corr_5"), ValidationError);
}
