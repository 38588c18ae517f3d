#pragma once

#include <string>
#include <vector>

#include "o3cp1/fields.hpp"
#include "o3cp1/hopf.hpp"

namespace o3cp1 {

/// Gaussian nascent delta exp(-t^2 / 2 eps^2) / (eps sqrt(2 pi)).
double mollified_delta(double t, double eps);

struct MollifierConfig {
    double eps = 0.05;
    /// strictly decreasing widths used for extrapolation
    std::vector<double> ladder = {0.1, 0.05, 0.025};

    void validate() const;
};

/// Resolution of the smoothed-delta quadratures. Panels are laid out in units
/// of the mollifier width; every Gaussian factor is covered to +-cutoff_sigma widths.
struct MeasureQuad {
    int order = 8;
    double panels_per_eps = 1.0;
    double cutoff_sigma = 10.0;
    int alpha_nodes = 4;

    /// nominal node spacing divided by eps
    double spacing_over_eps() const { return 1.0 / (panels_per_eps * order); }
    /// throws if the node spacing exceeds eps / 4
    void validate() const;
};

struct QuadValue {
    double value = 0.0;
    double error = 0.0;  ///< |value - value at the next lower order|
};

/// Smoothed left-hand side of the measure identity at one point n:
///   int r dr s ds dalpha dbeta  d_eps(r^2+s^2-1) d_eps(n_x - 2rs cos(a-b))
///       d_eps(n_y + 2rs sin(a-b)) d_eps(n_z - r^2 + s^2)
/// over r, s in [0, 1 + 10 eps] and alpha, beta in [0, 2 pi).
QuadValue measure_lhs(const Vector3d& n, double eps, const MeasureQuad& quad = {});

/// The same integral on a uniform Cartesian grid in (Re z1, Im z1, Re z2, Im z2).
/// Low resolution cross-check of the polar route.
double measure_lhs_cartesian(const Vector3d& n, double eps, int points_per_eps = 4);

/// delta(|n|^2 - 1) regularized the same way as the left-hand side: the level
/// |z|^2 = t is smeared with d_eps(t - 1) and the point n with a 3D Gaussian of
/// width eps. Closed form in terms of erfc.
double reference_density(const Vector3d& n, double eps);

/// d_eps(|n|^2 - 1) taken literally; kept for diagnostics only.
double naive_reference_density(const Vector3d& n, double eps);

enum class ReductionStage { Raw4d, AfterRTheta, AfterS, AfterPhi };
std::string stage_label(ReductionStage stage);
const std::vector<ReductionStage>& all_stages();

/// Value of one intermediate form of the left-hand side, regularized identically
/// to measure_lhs (so every stage has the same exact value). AfterPhi requires
/// simple roots: points with sqrt(1 - n_x^2 - n_z^2) < 10 eps are rejected.
QuadValue reduction_stage_value(const Vector3d& n, double eps, ReductionStage stage,
                                const MeasureQuad& quad = {});

/// (pi/2) * reference_density: the last stage in closed form.
double final_stage_value(const Vector3d& n, double eps);

/// Roots of f(phi) = sqrt(1 - n_z^2) cos(phi) - n_x, closed form versus a bracketing solver.
struct PhiRootCheck {
    double root_closed = 0.0;        ///< +arccos(n_x / sqrt(1 - n_z^2))
    double root_numeric_pos = 0.0;   ///< root found in (0, pi)
    double root_numeric_neg = 0.0;   ///< root found in (-pi, 0)
    double slope_closed = 0.0;       ///< sqrt(1 - n_x^2 - n_z^2)
    double slope_numeric_pos = 0.0;  ///< |f'| by 5-point difference at the numeric root
    double slope_numeric_neg = 0.0;
    double max_deviation() const;
};
PhiRootCheck check_phi_roots(const Vector3d& n);

/// Polynomial extrapolation to eps -> 0 in the variable eps^2 (Neville).
double richardson_eps2(const std::vector<double>& eps, const std::vector<double>& values);

struct ConstantPoint {
    Vector3d n;
    std::vector<double> ratios;        ///< measure_lhs / reference_density per ladder width
    std::vector<double> naive_ratios;  ///< measure_lhs / d_eps(|n|^2-1), diagnostic
    std::vector<double> quad_errors;   ///< relative quadrature error estimates
    double extrapolated = 0.0;
    bool monotone = true;
};

struct ConstantEstimate {
    std::vector<ConstantPoint> points;
    double mean = 0.0;
    double spread = 0.0;          ///< max - min over test points
    double max_rel_error = 0.0;   ///< max |c_p - pi/2| / (pi/2)
    bool extrapolated = false;
    bool monotone = true;
    bool pass = false;
    std::string message;
};

/// Extracts the constant c of the measure identity from a width ladder and a set of
/// on-sphere points; passes when every extrapolated ratio is within rel_tol of pi/2.
ConstantEstimate verify_constant_c(const MollifierConfig& mollifier,
                                   const std::vector<Vector3d>& points, double rel_tol = 0.01,
                                   const MeasureQuad& quad = {});

/// Points uniformly distributed on the unit sphere.
std::vector<Vector3d> random_sphere_points(int count, Rng& rng);

struct OneSiteRatio {
    double lambda = 0.0;
    double lhs = 0.0;          ///< int d^4z delta(|z|^2-1) exp(-lambda n_z(z))
    double rhs = 0.0;          ///< (pi/2) int d^3n delta(n^2-1) exp(-lambda n_z)
    double closed_form = 0.0;  ///< pi^2 sinh(lambda)/lambda
    double rel_diff() const { return std::abs(lhs - rhs) / std::abs(rhs); }
};

/// Tests the proportionality of the two one-site partition functions for the
/// weight S = lambda n_z, integrating each side on its own sphere.
OneSiteRatio one_site_ratio_test(double lambda, int nodes = 48);

/// Kolmogorov-Smirnov statistic of samples against the uniform law on [lo, hi].
double ks_statistic_uniform(std::vector<double> samples, double lo, double hi);
/// One-sample asymptotic critical value at significance 1%.
double ks_critical_value_1pct(std::size_t n);

struct PushforwardResult {
    std::size_t samples = 0;
    double ks_nz = 0.0;
    double ks_azimuth = 0.0;
    double critical = 0.0;
    double mean_nz = 0.0;
    double max_norm_error = 0.0;  ///< max ||z|^2 - 1| over sampled spinors
    bool pass() const { return ks_nz < critical && ks_azimuth < critical; }
};

/// Maps uniform S^3 samples through the Hopf map and tests uniformity on S^2.
PushforwardResult pushforward_uniformity(std::size_t samples, Rng& rng);

}  // namespace o3cp1
