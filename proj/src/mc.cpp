#include "o3cp1/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "o3cp1/quadrature.hpp"

namespace o3cp1 {

std::string model_name(Model m) {
    switch (m) {
        case Model::O3: return "o3";
        case Model::CP1Pullback: return "cp1-pullback";
        case Model::CP1Reduced: return "cp1-reduced";
        case Model::CP1Gauged: return "cp1-gauged";
    }
    return "unknown";
}

Model parse_model(const std::string& name) {
    if (name == "o3") return Model::O3;
    if (name == "cp1-pullback") return Model::CP1Pullback;
    if (name == "cp1-reduced") return Model::CP1Reduced;
    if (name == "cp1-gauged") return Model::CP1Gauged;
    throw ValidationError("unknown model '" + name +
                          "' (expected o3, cp1-pullback, cp1-reduced or cp1-gauged)");
}

std::string regime_name(GaugedRegime r) {
    return r == GaugedRegime::Reduced ? "reduced" : "pullback";
}

GaugedRegime parse_regime(const std::string& name) {
    if (name == "reduced") return GaugedRegime::Reduced;
    if (name == "pullback") return GaugedRegime::Pullback;
    throw ValidationError("unknown gauged regime '" + name + "' (expected reduced or pullback)");
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = master + (stream + 1) * 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

ChainState::ChainState(Model m, const Lattice& lattice, Coupling coupling, std::uint64_t seed)
    : model(m), lat(lattice), g(coupling), rng(seed) {
    if (model == Model::O3) {
        n = random_spin_field(lat, rng);
    } else {
        z = random_cp1_field(lat, rng);
        n = hopf_field(z);
    }
    if (model == Model::CP1Gauged) a = optimal_gauge(z, lat);
}

double ChainState::total_action() const {
    double s = 0.0;
    switch (model) {
        case Model::O3: s = action_o3(n, lat, g); break;
        case Model::CP1Pullback: s = action_cp1_pullback(z, lat, g); break;
        case Model::CP1Reduced: s = action_cp1_reduced(z, lat, g); break;
        case Model::CP1Gauged:
            s = regime == GaugedRegime::Pullback ? action_cp1_gauged_pullback(z, a, lat, g)
                                                  : action_cp1_gauged(z, a, lat, g);
            break;
    }
    if (field != 0.0) {
        const SpinField spins = model == Model::O3 ? n : hopf_field(z);
        for (const Vector3d& v : spins) s += field * v.z();
    }
    return s;
}

double max_proposal_width(Model m) { return m == Model::O3 ? std::numbers::pi : 8.0; }

namespace {

double local_o3(const ChainState& st, SiteIndex x, const Vector3d& nx) {
    double sum = 0.0;
    for (int mu = 0; mu < st.lat.dimension(); ++mu) {
        sum += o3_link_term(nx, st.n[st.lat.neighbor(x, mu, +1)]);
        sum += o3_link_term(st.n[st.lat.neighbor(x, mu, -1)], nx);
    }
    return sum / (4.0 * st.g.value()) + st.field * nx.z();
}

double local_cp1(const ChainState& st, SiteIndex x, const Spinord& zx, const Vector3d& nx) {
    double sum = 0.0;
    for (int mu = 0; mu < st.lat.dimension(); ++mu) {
        const SiteIndex up = st.lat.neighbor(x, mu, +1), dn = st.lat.neighbor(x, mu, -1);
        switch (st.model) {
            case Model::CP1Reduced:
                sum += cp1_reduced_link_term(zx, st.z[up]) + cp1_reduced_link_term(st.z[dn], zx);
                break;
            case Model::CP1Gauged:
                sum += cp1_gauged_link_term(zx, st.z[up], st.a(st.lat, x, mu)) +
                       cp1_gauged_link_term(st.z[dn], zx, st.a(st.lat, dn, mu));
                if (st.regime == GaugedRegime::Pullback)
                    sum -= cp1_lattice_gap_term(zx, st.z[up]) + cp1_lattice_gap_term(st.z[dn], zx);
                break;
            default: break;
        }
    }
    return sum * st.g.inverse() + st.field * nx.z();
}

Vector3d propose_spin(const Vector3d& n, double delta, Rng& rng) {
    Vector3d axis;
    do {
        const Vector3d v = random_unit_vector(rng);
        axis = v - v.dot(n) * n;
    } while (axis.norm() < 1e-6);
    axis.normalize();
    const double theta = delta * uniform01(rng);
    return (n * std::cos(theta) + axis.cross(n) * std::sin(theta)).normalized();
}

Spinord propose_spinor(const Spinord& z, double delta, Rng& rng) {
    for (;;) {
        Spinord w = z;
        w(0) += delta * std::complex<double>(standard_normal(rng), standard_normal(rng));
        w(1) += delta * std::complex<double>(standard_normal(rng), standard_normal(rng));
        const double norm = w.norm();
        if (norm > 0.0) return w / norm;
    }
}

bool accept(double ds, Rng& rng) { return ds <= 0.0 || uniform01(rng) < std::exp(-ds); }

void self_check(const ChainState& st, double before, double ds) {
    const double after = st.total_action();
    if (std::abs((after - before) - ds) > 1e-9) {
        std::ostringstream msg;
        msg << "self-check: local dS " << ds << " differs from full-action difference "
            << after - before << " (model " << model_name(st.model) << ", sweep " << st.sweep
            << ")";
        throw std::logic_error(msg.str());
    }
}

}  // namespace

double metropolis_sweep(ChainState& st) {
    long acc = 0;
    const long sites = static_cast<long>(st.lat.volume());
    for (SiteIndex x = 0; x < st.lat.volume(); ++x) {
        if (st.delta == 0.0) {
            ++acc;
            continue;
        }
        if (st.model == Model::O3) {
            const Vector3d prop = propose_spin(st.n[x], st.delta, st.rng);
            const double ds = local_o3(st, x, prop) - local_o3(st, x, st.n[x]);
            if (accept(ds, st.rng)) {
                const double before = st.self_check ? st.total_action() : 0.0;
                st.n[x] = prop;
                ++acc;
                if (st.self_check) self_check(st, before, ds);
            }
        } else {
            const Spinord prop = propose_spinor(st.z[x], st.delta, st.rng);
            const Vector3d nprop = hopf_map(prop);
            const double ds = st.model == Model::CP1Pullback
                                  ? local_o3(st, x, nprop) - local_o3(st, x, st.n[x])
                                  : local_cp1(st, x, prop, nprop) - local_cp1(st, x, st.z[x], st.n[x]);
            if (accept(ds, st.rng)) {
                const double before = st.self_check ? st.total_action() : 0.0;
                st.z[x] = prop;
                st.n[x] = nprop;
                ++acc;
                if (st.self_check) self_check(st, before, ds);
            }
        }
    }
    st.proposals += sites;
    st.accepted += acc;
    ++st.sweep;
    return static_cast<double>(acc) / static_cast<double>(sites);
}

void gibbs_gauge_update(ChainState& st) {
    if (st.model != Model::CP1Gauged)
        throw ValidationError("gibbs_gauge_update requires a cp1-gauged chain");
    const double sigma = std::sqrt(0.5 * st.g.value());
    for (SiteIndex x = 0; x < st.lat.volume(); ++x)
        for (int mu = 0; mu < st.lat.dimension(); ++mu) {
            const double b = gauge_current(st.z[x], st.z[st.lat.neighbor(x, mu, +1)]);
            st.a(st.lat, x, mu) = b + sigma * standard_normal(st.rng);
        }
}

double tune_proposal(ChainState& st, double acceptance) {
    if (st.frozen) throw std::logic_error("tune_proposal: proposal width is frozen");
    if (acceptance < 0.4 || acceptance > 0.6) {
        st.delta *= std::clamp(acceptance / 0.5, 0.5, 2.0);
        st.delta = std::clamp(st.delta, 1e-6, max_proposal_width(st.model));
    }
    return st.delta;
}

double correlator(const SpinField& n, const Lattice& lat, const std::vector<int>& sep) {
    if (static_cast<int>(sep.size()) != lat.dimension())
        throw ValidationError("correlator: separation has wrong dimension");
    for (int mu = 0; mu < lat.dimension(); ++mu)
        if (std::abs(sep[mu]) > lat.dims()[mu] / 2)
            throw ValidationError("correlator: separation " + std::to_string(sep[mu]) +
                                  " along direction " + std::to_string(mu) +
                                  " exceeds dims/2");
    double sum = 0.0;
    for (SiteIndex x = 0; x < lat.volume(); ++x) sum += n[x].dot(n[lat.shifted(x, sep)]);
    return sum / static_cast<double>(lat.volume());
}

double axis_correlator(const SpinField& n, const Lattice& lat, int r) {
    double sum = 0.0;
    int axes = 0;
    for (int mu = 0; mu < lat.dimension(); ++mu) {
        if (r > lat.dims()[mu] / 2) continue;
        std::vector<int> sep(lat.dimension(), 0);
        sep[mu] = r;
        sum += correlator(n, lat, sep);
        ++axes;
    }
    if (axes == 0)
        throw ValidationError("axis_correlator: no axis admits separation " + std::to_string(r));
    return sum / axes;
}

ObservableSeries correlator(const std::vector<SpinField>& snapshots, const Lattice& lat,
                            const std::vector<int>& sep) {
    ObservableSeries s;
    s.name = "corr";
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        s.values.push_back(correlator(snapshots[k], lat, sep));
        s.sweeps.push_back(static_cast<long>(k));
    }
    return s;
}

long ChainConfig::effective_thermalization() const {
    return thermalization >= 0 ? thermalization : std::max(1000L, sweeps / 10);
}

void ChainConfig::validate() const {
    Coupling check(g);
    (void)check;
    build_lattice(dims);
    if (sweeps <= 0) throw ValidationError("sweeps must be positive");
    if (effective_thermalization() >= sweeps)
        throw ValidationError("thermalization (" + std::to_string(effective_thermalization()) +
                              ") must be smaller than sweeps (" + std::to_string(sweeps) + ")");
    if (measure_every < 1) throw ValidationError("measure_every must be >= 1");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw ValidationError("proposal width delta must be non-negative");
    if (!std::isfinite(field)) throw ValidationError("field must be finite");
    if (max_r < 0) throw ValidationError("max_r must be non-negative");
}

const ObservableSeries& ChainResult::get(const std::string& name) const {
    for (const auto& s : series)
        if (s.name == name) return s;
    throw ValidationError("no observable named '" + name + "'");
}

ChainResult run_chain(const ChainConfig& cfg) {
    cfg.validate();
    const Lattice lat(cfg.dims);
    ChainResult res;
    res.config = cfg;
    res.thermalization = cfg.effective_thermalization();
    res.stream_seed = split_seed(cfg.seed, cfg.stream);

    ChainState st(cfg.model, lat, Coupling(cfg.g), res.stream_seed);
    st.regime = cfg.regime;
    st.field = cfg.field;
    st.delta = std::min(cfg.delta, max_proposal_width(cfg.model));
    st.self_check = cfg.self_check;

    std::vector<int> radii;
    for (int r = 1; r <= cfg.max_r; ++r) {
        bool ok = false;
        for (int d : lat.dims()) ok = ok || r <= d / 2;
        if (ok) radii.push_back(r);
    }
    res.series.push_back({"energy", {}, {}, 1, res.thermalization});
    for (int r : radii) res.series.push_back({"corr_" + std::to_string(r), {}, {}, 1, res.thermalization});
    res.series.push_back({"nz", {}, {}, 1, res.thermalization});

    auto measure = [&](long sweep) {
        std::size_t k = 0;
        auto push = [&](double v) {
            res.series[k].values.push_back(v);
            res.series[k].sweeps.push_back(sweep);
            ++k;
        };
        push(action_o3(st.n, lat, st.g) / static_cast<double>(lat.volume()));
        for (int r : radii) push(axis_correlator(st.n, lat, r));
        double nz = 0.0;
        for (const Vector3d& v : st.n) nz += v.z();
        push(nz / static_cast<double>(lat.volume()));
    };

    constexpr int kTuneWindow = 20;
    double window = 0.0;
    int in_window = 0;
    long props0 = 0, acc0 = 0;
    auto freeze = [&] {
        st.frozen = true;
        props0 = st.proposals;
        acc0 = st.accepted;
    };
    if (res.thermalization == 0) freeze();

    for (long s = 1; s <= cfg.sweeps; ++s) {
        const double acc = metropolis_sweep(st);
        if (cfg.model == Model::CP1Gauged) gibbs_gauge_update(st);
        if (s <= res.thermalization) {
            window += acc;
            if (++in_window == kTuneWindow) {
                if (st.delta > 0.0) tune_proposal(st, window / kTuneWindow);
                window = 0.0;
                in_window = 0;
            }
            if (s == res.thermalization) freeze();
        } else if ((s - res.thermalization) % cfg.measure_every == 0) {
            measure(s);
        }
    }
    res.delta = st.delta;
    res.final_n = st.n;
    res.final_z = st.z;
    res.final_a = st.a;
    const long props = st.proposals - props0;
    res.acceptance = props == 0 ? 0.0 : static_cast<double>(st.accepted - acc0) / props;
    return res;
}

double two_site_correlator_quadrature(Model m, GaugedRegime regime, double g) {
    const Coupling c(g);
    const bool reduced = m == Model::CP1Reduced ||
                         (m == Model::CP1Gauged && regime == GaugedRegime::Reduced);
    if (!reduced) {
        // n(1) relative to n(0) is uniform on S^2, so c = n0.n1 is uniform on [-1, 1];
        // two identical links give weight exp(-(1 - c) / g)
        const auto grid = quad::composite_grid(-1.0, 1.0, 16, 16);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double w = grid.w[k] * std::exp(-(1.0 - grid.x[k]) * c.inverse());
            num += w * grid.x[k];
            den += w;
        }
        return num / den;
    }
    // Global SU(2) fixes z0 = (1, 0); z1 = (cos chi e^{ia}, sin chi e^{ib}) with
    // measure cos chi sin chi; both links carry 2 - 2 cos chi cos a - cos^2 chi sin^2 a.
    const auto chi = quad::composite_grid(0.0, 0.5 * std::numbers::pi, 16, 16);
    const auto al = quad::composite_grid(0.0, 2.0 * std::numbers::pi, 32, 16);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const double cc = std::cos(chi.x[i]), sc = std::sin(chi.x[i]);
        for (std::size_t j = 0; j < al.size(); ++j) {
            const double sa = std::sin(al.x[j]);
            const double link = 2.0 - 2.0 * cc * std::cos(al.x[j]) - cc * cc * sa * sa;
            const double w = chi.w[i] * al.w[j] * cc * sc * std::exp(-2.0 * link * c.inverse());
            num += w * (cc * cc - sc * sc);
            den += w;
        }
    }
    return num / den;
}

}  // namespace o3cp1
