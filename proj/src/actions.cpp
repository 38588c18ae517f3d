#include "o3cp1/actions.hpp"

#include <numbers>
#include <string>

#include "o3cp1/quadrature.hpp"

namespace o3cp1 {

namespace {

template <typename LinkFn>
double sum_links(const Lattice& lat, LinkFn&& fn) {
    double total = 0.0;
    for (SiteIndex x = 0; x < lat.volume(); ++x)
        for (int mu = 0; mu < lat.dimension(); ++mu) total += fn(x, mu, lat.neighbor(x, mu, +1));
    return total;
}

}  // namespace

double action_o3(const SpinField& n, const Lattice& lat, Coupling g) {
    require_unit_field(n, lat, "action_o3");
    const double sum =
        sum_links(lat, [&](SiteIndex x, int, SiteIndex up) { return o3_link_term(n[x], n[up]); });
    return sum / (4.0 * g.value());
}

double action_cp1_gauged(const CP1Field& z, const GaugeField& a, const Lattice& lat, Coupling g) {
    require_unit_field(z, lat, "action_cp1_gauged");
    require_finite(a, lat, "action_cp1_gauged");
    const double sum = sum_links(lat, [&](SiteIndex x, int mu, SiteIndex up) {
        return cp1_gauged_link_term(z[x], z[up], a(lat, x, mu));
    });
    return sum * g.inverse();
}

double action_cp1_reduced(const CP1Field& z, const Lattice& lat, Coupling g) {
    require_unit_field(z, lat, "action_cp1_reduced");
    const double sum = sum_links(
        lat, [&](SiteIndex x, int, SiteIndex up) { return cp1_reduced_link_term(z[x], z[up]); });
    return sum * g.inverse();
}

double action_cp1_pullback(const CP1Field& z, const Lattice& lat, Coupling g) {
    require_unit_field(z, lat, "action_cp1_pullback");
    return action_o3(hopf_field(z), lat, g);
}

double action_cp1_gauged_pullback(const CP1Field& z, const GaugeField& a, const Lattice& lat,
                                  Coupling g) {
    const double gap = sum_links(
        lat, [&](SiteIndex x, int, SiteIndex up) { return cp1_lattice_gap_term(z[x], z[up]); });
    return action_cp1_gauged(z, a, lat, g) - gap * g.inverse();
}

GaugeField optimal_gauge(const CP1Field& z, const Lattice& lat) {
    require_unit_field(z, lat, "optimal_gauge");
    GaugeField a(lat);
    for (SiteIndex x = 0; x < lat.volume(); ++x)
        for (int mu = 0; mu < lat.dimension(); ++mu)
            a(lat, x, mu) = gauge_current(z[x], z[lat.neighbor(x, mu, +1)]);
    return a;
}

MarginalizationResult marginalize_link_numeric(const Spinord& z, const Spinord& z_up, Coupling g,
                                               const QuadControl& control) {
    if (control.truncation_k < 8.0)
        throw ValidationError("marginalization: truncation_k must be >= 8");
    MarginalizationResult res;
    res.current = gauge_current(z, z_up);
    res.closed_form = std::sqrt(std::numbers::pi * g.value()) *
                      std::exp(res.current * res.current * g.inverse());

    const double free_term = (z_up - z).squaredNorm();
    auto integrand = [&](double a) {
        return std::exp(-(cp1_gauged_link_term(z, z_up, a) - free_term) * g.inverse());
    };
    // Conditional density of A is N(b, g/2); the window +-K sqrt(g) is K*sqrt(2) widths.
    const double half_width = control.truncation_k * std::sqrt(g.value());
    const auto r = quad::integrate_adaptive(integrand, res.current - half_width,
                                            res.current + half_width, control.rel_tol, 0.0,
                                            control.order, control.max_panels);
    res.value = r.value;
    res.error_estimate = r.error;
    res.converged = r.converged;
    res.tail_bound = std::erfc(control.truncation_k);
    return res;
}

MarginalizationResult marginalize_gauge_numeric(const CP1Field& z, const Lattice& lat,
                                                const LinkId& link, Coupling g,
                                                const QuadControl& control) {
    require_unit_field(z, lat, "marginalize_gauge_numeric");
    const SiteIndex up = lat.neighbor(link.site, link.mu, +1);
    return marginalize_link_numeric(z[link.site], z[up], g, control);
}

// ---------------------------------------------------------------------------

void AnalyticFieldProbe::validate(const Eigen::VectorXd& x, double h, double tol) const {
    const ProbeSample p = eval_(x);
    if (p.dr.size() != dim_ || p.ds.size() != dim_ || p.dalpha.size() != dim_ ||
        p.dbeta.size() != dim_)
        throw ValidationError("probe: derivative arrays have wrong dimension");
    if (std::abs(p.r * p.r + p.s * p.s - 1.0) > 1e-12)
        throw ValidationError("probe: r^2 + s^2 != 1");
    for (int mu = 0; mu < dim_; ++mu) {
        if (std::abs(2.0 * (p.r * p.dr(mu) + p.s * p.ds(mu))) > 1e-12)
            throw ValidationError("probe: derivative of r^2 + s^2 is not zero");
        Eigen::VectorXd xp = x, xm = x;
        xp(mu) += h;
        xm(mu) -= h;
        const ProbeSample a = eval_(xp), b = eval_(xm);
        const double fd[4] = {(a.r - b.r) / (2 * h), (a.s - b.s) / (2 * h),
                              (a.alpha - b.alpha) / (2 * h), (a.beta - b.beta) / (2 * h)};
        const double exact[4] = {p.dr(mu), p.ds(mu), p.dalpha(mu), p.dbeta(mu)};
        for (int k = 0; k < 4; ++k)
            if (std::abs(fd[k] - exact[k]) > tol * (1.0 + std::abs(exact[k])))
                throw ValidationError("probe: supplied derivative " + std::to_string(k) +
                                      " disagrees with finite difference along " +
                                      std::to_string(mu));
    }
}

namespace {

/// f(x) = c + sum_k a_k sin(k_k . x + phase_k), with exact gradient.
struct FourierSum {
    double offset = 0.0;
    std::vector<double> amp, phase;
    std::vector<Eigen::VectorXd> wave;

    double value(const Eigen::VectorXd& x) const {
        double v = offset;
        for (std::size_t k = 0; k < amp.size(); ++k) v += amp[k] * std::sin(wave[k].dot(x) + phase[k]);
        return v;
    }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(x.size());
        for (std::size_t k = 0; k < amp.size(); ++k)
            d += amp[k] * std::cos(wave[k].dot(x) + phase[k]) * wave[k];
        return d;
    }
};

FourierSum random_sum(int dim, Rng& rng, int modes, double amplitude, double offset,
                      double period) {
    FourierSum f;
    f.offset = offset;
    for (int k = 0; k < modes; ++k) {
        Eigen::VectorXd w(dim);
        for (int mu = 0; mu < dim; ++mu) {
            if (period > 0.0) {
                // integer winding numbers in {-2..2}
                const int m = static_cast<int>(std::floor(uniform01(rng) * 5.0)) - 2;
                w(mu) = 2.0 * std::numbers::pi * m / period;
            } else {
                w(mu) = 2.0 * (uniform01(rng) - 0.5) * 3.0;
            }
        }
        f.wave.push_back(w);
        f.amp.push_back(amplitude * (uniform01(rng) - 0.5) * 2.0 / modes);
        f.phase.push_back(2.0 * std::numbers::pi * uniform01(rng));
    }
    return f;
}

}  // namespace

AnalyticFieldProbe AnalyticFieldProbe::random_fourier(int dimension, Rng& rng, int modes,
                                                      double amplitude, double period) {
    const double u0 = 0.25 * std::numbers::pi + 0.3 * (uniform01(rng) - 0.5);
    FourierSum u = random_sum(dimension, rng, modes, amplitude, u0, period);
    FourierSum al = random_sum(dimension, rng, modes, 2.0 * amplitude,
                               2.0 * std::numbers::pi * uniform01(rng), period);
    FourierSum be = random_sum(dimension, rng, modes, 2.0 * amplitude,
                               2.0 * std::numbers::pi * uniform01(rng), period);
    return AnalyticFieldProbe(dimension, [u, al, be](const Eigen::VectorXd& x) {
        ProbeSample p;
        const double uu = u.value(x);
        const Eigen::VectorXd du = u.gradient(x);
        p.r = std::cos(uu);
        p.s = std::sin(uu);
        p.dr = -p.s * du;
        p.ds = p.r * du;
        p.alpha = al.value(x);
        p.beta = be.value(x);
        p.dalpha = al.gradient(x);
        p.dbeta = be.gradient(x);
        return p;
    });
}

AnalyticFieldProbe AnalyticFieldProbe::constant(int dimension, double u, double alpha,
                                                double beta) {
    return AnalyticFieldProbe(dimension, [=](const Eigen::VectorXd&) {
        ProbeSample p;
        p.r = std::cos(u);
        p.s = std::sin(u);
        p.alpha = alpha;
        p.beta = beta;
        p.dr = p.ds = p.dalpha = p.dbeta = Eigen::VectorXd::Zero(dimension);
        return p;
    });
}

double action_polar_density(const AnalyticFieldProbe& probe, const Eigen::VectorXd& x,
                            Coupling g) {
    probe.validate(x);
    const ProbeSample p = probe(x);
    const double rs = p.r * p.s;
    const double density = rs * rs * (p.dalpha - p.dbeta).squaredNorm() + p.dr.squaredNorm() +
                           p.ds.squaredNorm();
    return density * g.inverse();
}

double o3_density_chain_rule(const AnalyticFieldProbe& probe, const Eigen::VectorXd& x,
                             Coupling g) {
    probe.validate(x);
    const ProbeSample p = probe(x);
    const double phi = p.alpha - p.beta;
    const double c = std::cos(phi), sn = std::sin(phi);
    // columns: d n / d(r, s, alpha, beta)
    Eigen::Matrix<double, 3, 4> jac;
    jac << 2 * p.s * c, 2 * p.r * c, -2 * p.r * p.s * sn, 2 * p.r * p.s * sn,
        -2 * p.s * sn, -2 * p.r * sn, -2 * p.r * p.s * c, 2 * p.r * p.s * c,
        2 * p.r, -2 * p.s, 0.0, 0.0;
    double sum = 0.0;
    for (int mu = 0; mu < probe.dimension(); ++mu) {
        const Eigen::Vector4d d(p.dr(mu), p.ds(mu), p.dalpha(mu), p.dbeta(mu));
        sum += (jac * d).squaredNorm();
    }
    return sum / (4.0 * g.value());
}

CP1Field sample_probe(const AnalyticFieldProbe& probe, const Lattice& lat) {
    if (probe.dimension() != lat.dimension())
        throw ValidationError("sample_probe: probe and lattice dimensions differ");
    CP1Field z(lat.volume());
    for (SiteIndex x = 0; x < lat.volume(); ++x) {
        const auto c = lat.coord(x);
        Eigen::VectorXd pos(lat.dimension());
        for (int mu = 0; mu < lat.dimension(); ++mu) pos(mu) = c[mu];
        const ProbeSample p = probe(pos);
        z[x] = normalized(Spinord(std::polar(p.r, p.alpha), std::polar(p.s, p.beta)));
    }
    return z;
}

}  // namespace o3cp1
