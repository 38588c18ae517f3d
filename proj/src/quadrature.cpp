#include "o3cp1/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace o3cp1::quad {

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes(i) = -x;
        nodes(n - 1 - i) = x;
        weights(i) = w;
        weights(n - 1 - i) = w;
    }
    if (n == 1) {
        nodes(0) = 0.0;
        weights(0) = 2.0;
    }
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

Grid1D composite_grid(double a, double b, int panels, int order) {
    if (panels < 1) panels = 1;
    std::vector<double> breaks(panels + 1);
    for (int k = 0; k <= panels; ++k) breaks[k] = a + (b - a) * k / panels;
    return composite_grid(breaks, order);
}

Grid1D composite_grid(const std::vector<double>& breaks, int order) {
    const GaussLegendre& rule = gauss_legendre(order);
    Grid1D g;
    if (breaks.size() < 2) return g;
    g.x.reserve((breaks.size() - 1) * order);
    g.w.reserve((breaks.size() - 1) * order);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p], hi = breaks[p + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int k = 0; k < order; ++k) {
            g.x.push_back(mid + half * rule.nodes(k));
            g.w.push_back(half * rule.weights(k));
        }
    }
    return g;
}

namespace {

double panel_rule(const std::function<double(double)>& f, const GaussLegendre& rule, double lo,
                  double hi, int& evals) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (int k = 0; k < rule.size(); ++k) sum += rule.weights(k) * f(mid + half * rule.nodes(k));
    evals += rule.size();
    return half * sum;
}

struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int order, int max_panels) {
    const GaussLegendre& rule = gauss_legendre(order);
    AdaptiveResult res;
    auto make_panel = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        const double whole = panel_rule(f, rule, lo, hi, res.evaluations);
        const double halves = panel_rule(f, rule, lo, mid, res.evaluations) +
                              panel_rule(f, rule, mid, hi, res.evaluations);
        return Panel{lo, hi, halves, std::abs(halves - whole)};
    };

    std::priority_queue<Panel> queue;
    queue.push(make_panel(a, b));
    double total = queue.top().value, err = queue.top().error;
    while (static_cast<int>(queue.size()) < max_panels) {
        if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
            res.converged = true;
            break;
        }
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        Panel left = make_panel(worst.lo, mid), right = make_panel(mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    if (!res.converged && err <= std::max(abs_tol, rel_tol * std::abs(total))) res.converged = true;

    // resum to avoid drift from incremental updates
    total = 0.0;
    err = 0.0;
    while (!queue.empty()) {
        total += queue.top().value;
        err += queue.top().error;
        queue.pop();
    }
    res.value = total;
    res.error = err;
    return res;
}

}  // namespace o3cp1::quad
