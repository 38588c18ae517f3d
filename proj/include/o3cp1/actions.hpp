#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "o3cp1/fields.hpp"
#include "o3cp1/lattice.hpp"

namespace o3cp1 {

/// Positive coupling strength g.
class Coupling {
public:
    explicit Coupling(double g) : g_(g) {
        if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("coupling g must be positive");
    }
    double value() const { return g_; }
    double inverse() const { return 1.0 / g_; }

private:
    double g_;
};

// Per-link kinetic terms, without the 1/g or 1/(4g) prefactor.

/// |n(x+mu) - n(x)|^2
inline double o3_link_term(const Vector3d& n, const Vector3d& n_up) {
    return (n_up - n).squaredNorm();
}

/// |(z(x+mu) - z(x)) - i A z(x)|^2
inline double cp1_gauged_link_term(const Spinord& z, const Spinord& z_up, double a) {
    const std::complex<double> i(0.0, 1.0);
    return ((z_up - z) - i * a * z).squaredNorm();
}

/// Im z(x)^dagger (z(x+mu) - z(x)); the optimal gauge value on the link.
inline double gauge_current(const Spinord& z, const Spinord& z_up) {
    return z.dot(z_up - z).imag();  // Eigen's dot conjugates the first argument
}

/// |Dz|^2 - (Im z^dagger Dz)^2
inline double cp1_reduced_link_term(const Spinord& z, const Spinord& z_up) {
    const double b = gauge_current(z, z_up);
    return (z_up - z).squaredNorm() - b * b;
}

/// (1 - Re z(x)^dagger z(x+mu))^2: the amount by which the reduced link term
/// exceeds the pulled-back O(3) link term.
inline double cp1_lattice_gap_term(const Spinord& z, const Spinord& z_up) {
    const double c = 1.0 - z.dot(z_up).real();
    return c * c;
}

double action_o3(const SpinField& n, const Lattice& lat, Coupling g);
double action_cp1_gauged(const CP1Field& z, const GaugeField& a, const Lattice& lat, Coupling g);
double action_cp1_reduced(const CP1Field& z, const Lattice& lat, Coupling g);
/// O(3) action evaluated on the Hopf image of z.
double action_cp1_pullback(const CP1Field& z, const Lattice& lat, Coupling g);
/// Gauged action minus the lattice gap counterterm; its exact Gaussian marginal
/// over A is the pullback action.
double action_cp1_gauged_pullback(const CP1Field& z, const GaugeField& a, const Lattice& lat,
                                  Coupling g);

/// A*_mu(x) = Im z(x)^dagger Delta_mu z(x), the unique minimizer of the gauged action.
GaugeField optimal_gauge(const CP1Field& z, const Lattice& lat);

struct QuadControl {
    /// integration window is mean +- truncation_k * sqrt(g)
    double truncation_k = 8.0;
    double rel_tol = 1e-12;
    int order = 10;
    int max_panels = 2000;
};

struct MarginalizationResult {
    double value = 0.0;        ///< numeric  int dA exp(-(|D_A z|^2 - |Dz|^2)/g)
    double closed_form = 0.0;  ///< sqrt(pi g) exp(b^2 / g)
    double current = 0.0;      ///< b = Im z^dagger Dz
    double error_estimate = 0.0;
    double tail_bound = 0.0;   ///< relative weight outside the truncated window
    bool converged = false;
};

/// Numerically integrates one link's gauge variable out of the gauged action.
MarginalizationResult marginalize_gauge_numeric(const CP1Field& z, const Lattice& lat,
                                                const LinkId& link, Coupling g,
                                                const QuadControl& control = {});

/// Same integral for an explicit pair of spinors on a link.
MarginalizationResult marginalize_link_numeric(const Spinord& z, const Spinord& z_up, Coupling g,
                                               const QuadControl& control = {});

/// log of the constant prod_links sqrt(pi g) that the gauge integral contributes.
inline double log_gauge_constant(const Lattice& lat, Coupling g) {
    return 0.5 * static_cast<double>(lat.n_links()) * std::log(std::numbers::pi * g.value());
}

// ---------------------------------------------------------------------------
// Analytic probes for the continuum polar identity.

/// Polar coordinates and their exact gradients at one point of D-dimensional space.
struct ProbeSample {
    double r = 0, s = 0, alpha = 0, beta = 0;
    Eigen::VectorXd dr, ds, dalpha, dbeta;
};

/// Closed-form smooth field x -> (r, s, alpha, beta) with exact first derivatives.
/// The random family uses r = cos u, s = sin u with u, alpha, beta finite Fourier sums.
class AnalyticFieldProbe {
public:
    using Evaluator = std::function<ProbeSample(const Eigen::VectorXd&)>;

    AnalyticFieldProbe(int dimension, Evaluator eval) : dim_(dimension), eval_(std::move(eval)) {}

    int dimension() const { return dim_; }
    ProbeSample operator()(const Eigen::VectorXd& x) const { return eval_(x); }

    /// Throws if r^2 + s^2 != 1, its derivative is nonzero, or any supplied
    /// derivative disagrees with a central difference of the closed forms.
    void validate(const Eigen::VectorXd& x, double h = 1e-4, double tol = 1e-6) const;

    /// u0 + sum of random modes; `period` > 0 makes every mode periodic with that period.
    static AnalyticFieldProbe random_fourier(int dimension, Rng& rng, int modes = 3,
                                             double amplitude = 0.4, double period = 0.0);
    static AnalyticFieldProbe constant(int dimension, double u, double alpha, double beta);

private:
    int dim_;
    Evaluator eval_;
};

/// (1/g) sum_mu [ r^2 s^2 (d alpha - d beta)^2 + (dr)^2 + (ds)^2 ]
double action_polar_density(const AnalyticFieldProbe& probe, const Eigen::VectorXd& x,
                            Coupling g);

/// (1/4g) d_mu n . d_mu n with d n from the chain rule on n(r, s, alpha, beta).
double o3_density_chain_rule(const AnalyticFieldProbe& probe, const Eigen::VectorXd& x,
                             Coupling g);

/// Samples a probe at lattice site coordinates (unit spacing) into a CP1 field.
CP1Field sample_probe(const AnalyticFieldProbe& probe, const Lattice& lat);

}  // namespace o3cp1
