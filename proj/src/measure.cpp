#include "o3cp1/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "o3cp1/quadrature.hpp"

namespace o3cp1 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

quad::Grid1D uniform_panels(double lo, double hi, double width, int order) {
    if (!(hi > lo)) return {};
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    return quad::composite_grid(lo, hi, panels, order);
}

void append(quad::Grid1D& into, const quad::Grid1D& more) {
    into.x.insert(into.x.end(), more.x.begin(), more.x.end());
    into.w.insert(into.w.end(), more.w.begin(), more.w.end());
}

/// Grid over [lo, hi] restricted to the periodic images of [center - hw, center + hw].
quad::Grid1D periodic_window(double lo, double hi, double center, double hw, double width,
                             int order) {
    if (hw >= kPi) return uniform_panels(lo, hi, width, order);
    quad::Grid1D g;
    const int kmin = static_cast<int>(std::floor((lo - center - hw) / kTwoPi)) - 1;
    const int kmax = static_cast<int>(std::ceil((hi - center + hw) / kTwoPi)) + 1;
    for (int k = kmin; k <= kmax; ++k) {
        const double a = std::max(lo, center - hw + kTwoPi * k);
        const double b = std::min(hi, center + hw + kTwoPi * k);
        if (b > a) append(g, uniform_panels(a, b, width, order));
    }
    return g;
}

/// Half-angle of the cone around the direction of a planar point at distance
/// `radius` from the origin that contains the disc of radius `d` around it.
double angular_half_width(double radius, double d) {
    return radius > d ? std::asin(d / radius) : kPi;
}

struct Support {
    double eps, kc, inv2e2, norm1, d;
};

Support support(double eps, const MeasureQuad& quad) {
    Support s;
    s.eps = eps;
    s.kc = quad.cutoff_sigma * eps;
    s.inv2e2 = 1.0 / (2.0 * eps * eps);
    s.norm1 = kInvSqrt2Pi / eps;
    s.d = std::sqrt(2.0) * s.kc;
    return s;
}

double raw4d(const Vector3d& n, double eps, const MeasureQuad& quad, int order) {
    const Support sp = support(eps, quad);
    const double rmax = 1.0 + 10.0 * eps;
    const double width = eps / quad.panels_per_eps;

    // windows on R = r^2 and S = s^2, panels uniform in r and s: the transverse
    // deltas have width ~eps/2 in s near the poles, far narrower than in S
    const double rc = 0.5 * (1.0 + n.z()), sc = 0.5 * (1.0 - n.z());
    auto radial = [&](double c) {
        const double lo = std::max(0.0, c - sp.kc), hi = std::min(rmax * rmax, c + sp.kc);
        return hi > lo ? uniform_panels(std::sqrt(lo), std::sqrt(hi), 0.5 * width, order)
                       : quad::Grid1D{};
    };
    const auto rgrid = radial(rc);
    const auto sgrid = radial(sc);
    if (rgrid.size() == 0 || sgrid.size() == 0) return 0.0;

    const double nxy = std::hypot(n.x(), n.y());
    const double hw = angular_half_width(nxy, sp.d);
    const double rho_hi = std::max(eps, std::min(1.0 + sp.kc, nxy + sp.d));
    const double phic = std::atan2(-n.y(), n.x());
    const auto phigrid = uniform_panels(phic - hw, phic + hw, width / rho_hi, order);
    const auto agrid = quad::composite_grid(0.0, kTwoPi, 1, quad.alpha_nodes);

    double total = 0.0;
    for (std::size_t ia = 0; ia < agrid.size(); ++ia) {
        const double alpha = agrid.x[ia];
        for (std::size_t ip = 0; ip < phigrid.size(); ++ip) {
            // beta runs over a window of its period; the integrand is 2 pi periodic in beta
            const double beta = alpha - phigrid.x[ip];
            const double c = std::cos(alpha - beta), sn = std::sin(alpha - beta);
            double inner = 0.0;
            for (std::size_t ir = 0; ir < rgrid.size(); ++ir) {
                const double r = rgrid.x[ir];
                double row = 0.0;
                for (std::size_t is = 0; is < sgrid.size(); ++is) {
                    const double s = sgrid.x[is];
                    const double rs = jacobian_polar(r, s);
                    const double u = r * r + s * s - 1.0;
                    const double x = n.x() - 2.0 * rs * c;
                    const double y = n.y() + 2.0 * rs * sn;
                    const double z = n.z() - (r * r - s * s);
                    const double e = (u * u + x * x + y * y + z * z) * sp.inv2e2;
                    if (e < 700.0) row += sgrid.w[is] * rs * std::exp(-e);
                }
                inner += rgrid.w[ir] * row;
            }
            total += agrid.w[ia] * phigrid.w[ip] * inner;
        }
    }
    const double n2 = sp.norm1 * sp.norm1;
    return total * n2 * n2;
}

double after_r_theta(const Vector3d& n, double eps, const MeasureQuad& quad, int order) {
    const Support sp = support(eps, quad);
    const double width = eps / quad.panels_per_eps;
    const auto tgrid = uniform_panels(std::max(0.0, 1.0 - sp.kc), 1.0 + sp.kc, width, order);

    const double nxy = std::hypot(n.x(), n.y());
    const double hw = angular_half_width(nxy, sp.d);
    const double rho_hi = std::max(eps, std::min(1.0 + sp.kc, nxy + sp.d));
    const double phic = std::atan2(-n.y(), n.x());
    const auto phigrid = periodic_window(-kTwoPi, kTwoPi, phic, hw, width / rho_hi, order);
    std::vector<double> cphi(phigrid.size()), sphi(phigrid.size());
    for (std::size_t k = 0; k < phigrid.size(); ++k) {
        cphi[k] = std::cos(phigrid.x[k]);
        sphi[k] = std::sin(phigrid.x[k]);
    }

    double total = 0.0;
    for (std::size_t it = 0; it < tgrid.size(); ++it) {
        const double t = tgrid.x[it];
        const double wt = tgrid.w[it] * mollified_delta(t - 1.0, eps);
        const auto sgrid = uniform_panels(std::max(0.0, 0.5 * (t - n.z() - sp.kc)),
                                          std::min(t, 0.5 * (t - n.z() + sp.kc)), 0.5 * width,
                                          order);
        double acc = 0.0;
        for (std::size_t is = 0; is < sgrid.size(); ++is) {
            const double S = sgrid.x[is];
            const double R = t - S;
            const double rho = 2.0 * std::sqrt(std::max(0.0, R * S));
            const double wz = sgrid.w[is] * mollified_delta(n.z() - (R - S), eps);
            double inner = 0.0;
            for (std::size_t k = 0; k < phigrid.size(); ++k) {
                const double x = n.x() - rho * cphi[k];
                const double y = n.y() + rho * sphi[k];
                const double e = (x * x + y * y) * sp.inv2e2;
                if (e < 700.0) inner += phigrid.w[k] * std::exp(-e);
            }
            acc += wz * inner * sp.norm1 * sp.norm1;
        }
        total += wt * acc;
    }
    return 0.25 * kPi * total;
}

double after_s(const Vector3d& n, double eps, const MeasureQuad& quad, int order) {
    const Support sp = support(eps, quad);
    const double width = eps / quad.panels_per_eps;
    const auto tgrid = uniform_panels(std::max(0.0, 1.0 - sp.kc), 1.0 + sp.kc, width, order);

    const double nxy = std::hypot(n.x(), n.y());
    const double hw = angular_half_width(nxy, sp.d);
    const double rho_hi = std::max(eps, std::min(1.0 + sp.kc, nxy + sp.d));
    const double phic = std::atan2(-n.y(), n.x());
    const auto phigrid = periodic_window(-kPi, kPi, phic, hw, width / rho_hi, order);
    std::vector<double> cphi(phigrid.size()), sphi(phigrid.size());
    for (std::size_t k = 0; k < phigrid.size(); ++k) {
        cphi[k] = std::cos(phigrid.x[k]);
        sphi[k] = std::sin(phigrid.x[k]);
    }

    double total = 0.0;
    for (std::size_t it = 0; it < tgrid.size(); ++it) {
        const double t = tgrid.x[it];
        const double wt = tgrid.w[it] * mollified_delta(t - 1.0, eps);
        const auto zgrid = uniform_panels(std::max(-t, n.z() - sp.kc), std::min(t, n.z() + sp.kc),
                                          width, order);
        double acc = 0.0;
        for (std::size_t iz = 0; iz < zgrid.size(); ++iz) {
            const double nz = zgrid.x[iz];
            const double rho = std::sqrt(std::max(0.0, t * t - nz * nz));
            const double wz = zgrid.w[iz] * mollified_delta(n.z() - nz, eps);
            double inner = 0.0;
            for (std::size_t k = 0; k < phigrid.size(); ++k) {
                const double x = n.x() - rho * cphi[k];
                const double y = n.y() + rho * sphi[k];
                const double e = (x * x + y * y) * sp.inv2e2;
                if (e < 700.0) inner += phigrid.w[k] * std::exp(-e);
            }
            acc += wz * inner * sp.norm1 * sp.norm1;
        }
        total += wt * acc;
    }
    return 0.25 * kPi * total;
}

// Root expansion of the phi delta: sum over phi0 of delta(n_y + rho sin phi0) /
// |f'(phi0)|, smeared over (n_x, n_z). With n_x = p cos psi, n_z = p sin psi and
// q = sqrt(t^2 - p^2), dn_x dn_z / q = dq dpsi, which absorbs the 1/|f'| factor.
double after_phi(const Vector3d& n, double eps, const MeasureQuad& quad, int order) {
    const Support sp = support(eps, quad);
    const double width = eps / quad.panels_per_eps;
    const auto tgrid = uniform_panels(std::max(0.0, 1.0 - sp.kc), 1.0 + sp.kc, width, order);

    const double nxz = std::hypot(n.x(), n.z());
    const double hw = angular_half_width(nxz, sp.d);
    const double p_hi = std::max(eps, std::min(1.0 + sp.kc, nxz + sp.d));
    const double psic = std::atan2(n.z(), n.x());
    const auto psigrid = periodic_window(0.0, kTwoPi, psic, hw, width / p_hi, order);
    std::vector<double> cpsi(psigrid.size()), spsi(psigrid.size());
    for (std::size_t k = 0; k < psigrid.size(); ++k) {
        cpsi[k] = std::cos(psigrid.x[k]);
        spsi[k] = std::sin(psigrid.x[k]);
    }

    const double ny = std::abs(n.y());
    double total = 0.0;
    for (std::size_t it = 0; it < tgrid.size(); ++it) {
        const double t = tgrid.x[it];
        const double wt = tgrid.w[it] * mollified_delta(t - 1.0, eps);
        const auto qgrid =
            uniform_panels(std::max(0.0, ny - sp.kc), std::min(t, ny + sp.kc), width, order);
        double acc = 0.0;
        for (std::size_t iq = 0; iq < qgrid.size(); ++iq) {
            const double q = qgrid.x[iq];
            const double p = std::sqrt(std::max(0.0, t * t - q * q));
            const double wy = qgrid.w[iq] * (mollified_delta(n.y() + q, eps) +
                                             mollified_delta(n.y() - q, eps));
            double inner = 0.0;
            for (std::size_t k = 0; k < psigrid.size(); ++k) {
                const double x = n.x() - p * cpsi[k];
                const double z = n.z() - p * spsi[k];
                const double e = (x * x + z * z) * sp.inv2e2;
                if (e < 700.0) inner += psigrid.w[k] * std::exp(-e);
            }
            acc += wy * inner * sp.norm1 * sp.norm1;
        }
        total += wt * acc;
    }
    return 0.25 * kPi * total;
}

template <typename Fn>
QuadValue with_error(Fn&& fn, const MeasureQuad& quad) {
    QuadValue v;
    v.value = fn(quad.order);
    v.error = std::abs(v.value - fn(std::max(2, quad.order - 2)));
    return v;
}

}  // namespace

double mollified_delta(double t, double eps) {
    return std::exp(-0.5 * t * t / (eps * eps)) * kInvSqrt2Pi / eps;
}

void MollifierConfig::validate() const {
    if (!(eps > 0.0)) throw ValidationError("mollifier eps must be positive");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!(ladder[k] > 0.0)) throw ValidationError("eps ladder entries must be positive");
        if (k > 0 && !(ladder[k] < ladder[k - 1]))
            throw ValidationError("eps ladder must be strictly decreasing");
    }
}

void MeasureQuad::validate() const {
    if (order < 4) throw ValidationError("measure quadrature order must be >= 4");
    if (!(panels_per_eps > 0.0)) throw ValidationError("panels_per_eps must be positive");
    if (cutoff_sigma < 6.0) throw ValidationError("cutoff_sigma must be >= 6");
    if (alpha_nodes < 1) throw ValidationError("alpha_nodes must be >= 1");
    if (spacing_over_eps() > 0.25) {
        std::ostringstream msg;
        msg << "under-resolved quadrature: node spacing " << spacing_over_eps()
            << " eps exceeds eps/4";
        throw ValidationError(msg.str());
    }
}

QuadValue measure_lhs(const Vector3d& n, double eps, const MeasureQuad& quad) {
    if (!(eps > 0.0)) throw ValidationError("measure_lhs: eps must be positive");
    quad.validate();
    return with_error([&](int order) { return raw4d(n, eps, quad, order); }, quad);
}

double measure_lhs_cartesian(const Vector3d& n, double eps, int points_per_eps) {
    if (!(eps > 0.0)) throw ValidationError("measure_lhs_cartesian: eps must be positive");
    if (points_per_eps < 4) throw ValidationError("cartesian grid spacing must be <= eps/4");
    const double h = eps / points_per_eps;
    const double l2 = 1.0 + 8.0 * eps;
    const double l = std::sqrt(l2);
    const int m = static_cast<int>(std::ceil(2.0 * l / h));
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = -l + (i + 0.5) * h;
    const double inv2e2 = 1.0 / (2.0 * eps * eps);

    double total = 0.0;
    for (double x1 : xs)
        for (double y1 : xs) {
            const double a1 = x1 * x1 + y1 * y1;
            if (a1 > l2) continue;
            for (double x2 : xs) {
                const double a12 = a1 + x2 * x2;
                if (a12 > l2) continue;
                for (double y2 : xs) {
                    const double a = a12 + y2 * y2;
                    if (a > l2) continue;
                    // n(z) = (2 Re conj(z1) z2, 2 Im conj(z1) z2, |z1|^2 - |z2|^2)
                    const double hx = 2.0 * (x1 * x2 + y1 * y2);
                    const double hy = 2.0 * (x1 * y2 - y1 * x2);
                    const double hz = a1 - (x2 * x2 + y2 * y2);
                    const double u = a - 1.0, dx = n.x() - hx, dy = n.y() - hy, dz = n.z() - hz;
                    const double e = (u * u + dx * dx + dy * dy + dz * dz) * inv2e2;
                    if (e < 700.0) total += std::exp(-e);
                }
            }
        }
    const double norm = kInvSqrt2Pi / eps;
    return total * std::pow(h, 4) * std::pow(norm, 4);
}

double reference_density(const Vector3d& n, double eps) {
    if (!(eps > 0.0)) throw ValidationError("reference_density: eps must be positive");
    // int_0^inf dt d_eps(t - 1) d_eps(t - b) = d_{sqrt2 eps}(1 - b) * P(T > 0),
    // T ~ N((1 + b)/2, eps^2/2)
    auto level_overlap = [eps](double b) {
        return mollified_delta(1.0 - b, std::sqrt(2.0) * eps) * 0.5 *
               std::erfc(-(1.0 + b) / (2.0 * eps));
    };
    const double a = std::max(n.norm(), 1e-8);
    return (level_overlap(a) - level_overlap(-a)) / (2.0 * a);
}

double naive_reference_density(const Vector3d& n, double eps) {
    return mollified_delta(n.squaredNorm() - 1.0, eps);
}

std::string stage_label(ReductionStage stage) {
    switch (stage) {
        case ReductionStage::Raw4d: return "raw-4d";
        case ReductionStage::AfterRTheta: return "after-R-theta";
        case ReductionStage::AfterS: return "after-S";
        case ReductionStage::AfterPhi: return "after-phi";
    }
    return "unknown";
}

const std::vector<ReductionStage>& all_stages() {
    static const std::vector<ReductionStage> stages = {
        ReductionStage::Raw4d, ReductionStage::AfterRTheta, ReductionStage::AfterS,
        ReductionStage::AfterPhi};
    return stages;
}

QuadValue reduction_stage_value(const Vector3d& n, double eps, ReductionStage stage,
                                const MeasureQuad& quad) {
    if (!(eps > 0.0)) throw ValidationError("reduction stage: eps must be positive");
    quad.validate();
    switch (stage) {
        case ReductionStage::Raw4d: return measure_lhs(n, eps, quad);
        case ReductionStage::AfterRTheta:
            return with_error([&](int o) { return after_r_theta(n, eps, quad, o); }, quad);
        case ReductionStage::AfterS:
            return with_error([&](int o) { return after_s(n, eps, quad, o); }, quad);
        case ReductionStage::AfterPhi: {
            const double q2 = 1.0 - n.x() * n.x() - n.z() * n.z();
            if (q2 <= 0.0 || std::sqrt(q2) < 10.0 * eps)
                throw ValidationError(
                    "after-phi stage: point within 10 eps of the root-coalescence locus "
                    "n_x^2 + n_z^2 = 1");
            return with_error([&](int o) { return after_phi(n, eps, quad, o); }, quad);
        }
    }
    throw ValidationError("unknown reduction stage");
}

double final_stage_value(const Vector3d& n, double eps) {
    return 0.5 * kPi * reference_density(n, eps);
}

double PhiRootCheck::max_deviation() const {
    return std::max({std::abs(root_numeric_pos - root_closed),
                     std::abs(root_numeric_neg + root_closed),
                     std::abs(slope_numeric_pos - slope_closed),
                     std::abs(slope_numeric_neg - slope_closed)});
}

PhiRootCheck check_phi_roots(const Vector3d& n) {
    const double rho = std::sqrt(1.0 - n.z() * n.z());
    if (!(rho > std::abs(n.x())))
        throw ValidationError("phi roots: need n_x^2 + n_z^2 < 1 for two simple roots");
    PhiRootCheck out;
    out.root_closed = std::acos(n.x() / rho);
    out.slope_closed = std::sqrt(1.0 - n.x() * n.x() - n.z() * n.z());

    auto f = [&](double phi) { return rho * std::cos(phi) - n.x(); };
    auto bisect = [&](double lo, double hi) {
        double flo = f(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if ((fm > 0) == (flo > 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    auto slope = [&](double x) {
        const double h = 1e-3;
        return std::abs((f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h));
    };
    out.root_numeric_pos = bisect(0.0, kPi);
    out.root_numeric_neg = bisect(-kPi, 0.0);
    out.slope_numeric_pos = slope(out.root_numeric_pos);
    out.slope_numeric_neg = slope(out.root_numeric_neg);
    return out;
}

double richardson_eps2(const std::vector<double>& eps, const std::vector<double>& values) {
    if (eps.size() != values.size() || eps.empty())
        throw ValidationError("richardson: size mismatch");
    std::vector<double> x(eps.size()), p(values);
    for (std::size_t i = 0; i < eps.size(); ++i) x[i] = eps[i] * eps[i];
    const std::size_t m = x.size();
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = 0; i + level < m; ++i)
            p[i] = (-x[i + level] * p[i] + x[i] * p[i + 1]) / (x[i] - x[i + level]);
    return p[0];
}

ConstantEstimate verify_constant_c(const MollifierConfig& mollifier,
                                   const std::vector<Vector3d>& points, double rel_tol,
                                   const MeasureQuad& quad) {
    mollifier.validate();
    quad.validate();
    const auto& ladder = mollifier.ladder;
    if (ladder.empty()) throw ValidationError("verify_constant_c: empty eps ladder");
    const double target = 0.5 * kPi;
    ConstantEstimate out;
    out.extrapolated = ladder.size() >= 3;

    double lo = 1e300, hi = -1e300, sum = 0.0;
    for (const Vector3d& n : points) {
        if (std::abs(n.norm() - 1.0) > 1e-9)
            throw ValidationError("verify_constant_c: test points must lie on the unit sphere");
        ConstantPoint cp;
        cp.n = n;
        for (double eps : ladder) {
            const QuadValue lhs = measure_lhs(n, eps, quad);
            const double ref = reference_density(n, eps);
            cp.ratios.push_back(lhs.value / ref);
            cp.naive_ratios.push_back(lhs.value / naive_reference_density(n, eps));
            cp.quad_errors.push_back(lhs.error / std::abs(lhs.value));
        }
        cp.extrapolated = out.extrapolated ? richardson_eps2(ladder, cp.ratios) : cp.ratios.back();
        // distance to the extrapolated value must not grow as eps shrinks
        // (differences below the quadrature noise floor count as converged)
        for (std::size_t k = 1; k < cp.ratios.size(); ++k) {
            const double prev = std::abs(cp.ratios[k - 1] - cp.extrapolated);
            const double cur = std::abs(cp.ratios[k] - cp.extrapolated);
            if (cur > prev + 1e-7 * target) cp.monotone = false;
        }
        out.monotone = out.monotone && cp.monotone;
        lo = std::min(lo, cp.extrapolated);
        hi = std::max(hi, cp.extrapolated);
        sum += cp.extrapolated;
        out.max_rel_error = std::max(out.max_rel_error, std::abs(cp.extrapolated - target) / target);
        out.points.push_back(std::move(cp));
    }
    out.mean = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
    out.spread = points.empty() ? 0.0 : hi - lo;

    std::ostringstream msg;
    if (points.size() < 10) {
        msg << "need at least 10 test points (got " << points.size() << ")";
    } else if (!out.extrapolated) {
        msg << "ladder has " << ladder.size()
            << " width(s); at least 3 are needed to extrapolate eps -> 0, the single-width "
               "estimate is biased and is not accepted";
    } else if (!out.monotone) {
        msg << "non-monotone convergence across the eps ladder";
    } else if (out.max_rel_error > rel_tol) {
        msg << "extrapolated constant deviates from pi/2 by " << out.max_rel_error
            << " (relative) > " << rel_tol;
    } else {
        out.pass = true;
        msg << "extrapolated constant " << out.mean << " within " << rel_tol << " of pi/2";
    }
    out.message = msg.str();
    return out;
}

std::vector<Vector3d> random_sphere_points(int count, Rng& rng) {
    std::vector<Vector3d> pts;
    pts.reserve(count);
    for (int k = 0; k < count; ++k) pts.push_back(random_unit_vector(rng));
    return pts;
}

OneSiteRatio one_site_ratio_test(double lambda, int nodes) {
    OneSiteRatio out;
    out.lambda = lambda;
    out.closed_form = lambda == 0.0 ? kPi * kPi : kPi * kPi * std::sinh(lambda) / lambda;

    // S^3 side. delta(|z|^2 - 1) = delta(|z| - 1) / 2 leaves half the S^3 surface
    // measure, cos(chi) sin(chi) dchi dalpha dbeta with z = (cos chi e^{ia}, sin chi e^{ib}).
    const auto chi = quad::composite_grid(0.0, 0.5 * kPi, 1, nodes);
    const int phase_nodes = 8;
    double lhs = 0.0;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const double c = std::cos(chi.x[i]), s = std::sin(chi.x[i]);
        double ring = 0.0;
        for (int a = 0; a < phase_nodes; ++a)
            for (int b = 0; b < phase_nodes; ++b) {
                const double alpha = kTwoPi * a / phase_nodes, beta = kTwoPi * b / phase_nodes;
                const Spinord z(std::polar(c, alpha), std::polar(s, beta));
                ring += std::exp(-lambda * hopf_map(z).z());
            }
        ring *= (kTwoPi / phase_nodes) * (kTwoPi / phase_nodes);
        lhs += chi.w[i] * c * s * ring;
    }
    out.lhs = 0.5 * lhs;

    // S^2 side with the same delta convention, times the constant pi/2.
    const auto theta = quad::composite_grid(0.0, kPi, 1, nodes);
    double rhs = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        rhs += theta.w[i] * std::sin(theta.x[i]) * std::exp(-lambda * std::cos(theta.x[i]));
    out.rhs = 0.5 * kPi * 0.5 * kTwoPi * rhs;
    return out;
}

double ks_statistic_uniform(std::vector<double> samples, double lo, double hi) {
    if (samples.empty()) throw ValidationError("ks: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

double ks_critical_value_1pct(std::size_t n) {
    // Kolmogorov distribution quantile K_{0.99} = 1.62762
    return 1.62762 / std::sqrt(static_cast<double>(n));
}

PushforwardResult pushforward_uniformity(std::size_t samples, Rng& rng) {
    PushforwardResult out;
    out.samples = samples;
    std::vector<double> nz(samples), az(samples);
    double sum = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Spinord z = random_unit_spinor(rng);
        out.max_norm_error = std::max(out.max_norm_error, std::abs(z.squaredNorm() - 1.0));
        const Vector3d n = hopf_map(z);
        nz[k] = n.z();
        az[k] = wrap_angle(std::atan2(n.y(), n.x()));
        sum += n.z();
    }
    out.mean_nz = sum / static_cast<double>(samples);
    out.ks_nz = ks_statistic_uniform(std::move(nz), -1.0, 1.0);
    out.ks_azimuth = ks_statistic_uniform(std::move(az), 0.0, kTwoPi);
    out.critical = ks_critical_value_1pct(samples);
    return out;
}

}  // namespace o3cp1
