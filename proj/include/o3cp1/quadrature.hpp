#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

namespace o3cp1::quad {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    explicit GaussLegendre(int n);
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Shared cached rule (thread-safe after first construction per order).
const GaussLegendre& gauss_legendre(int n);

/// Composite rule: nodes and weights for `panels` equal panels on [a, b].
struct Grid1D {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

Grid1D composite_grid(double a, double b, int panels, int order);

/// Composite rule whose panel boundaries are given explicitly (must be increasing).
Grid1D composite_grid(const std::vector<double>& breaks, int order);

template <typename F>
double integrate(const Grid1D& g, F&& f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += g.w[k] * f(g.x[k]);
    return sum;
}

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Globally adaptive bisection with a Gauss-Legendre rule per panel; the error
/// of a panel is estimated by comparing it with the sum over its two halves.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol = 0.0, int order = 10,
                                  int max_panels = 4000);

}  // namespace o3cp1::quad
