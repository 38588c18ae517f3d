#include "o3cp1/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "o3cp1/lattice.hpp"

namespace o3cp1 {

namespace {

double jackknife_error(const std::vector<double>& values, std::size_t bin_size, double& mean) {
    const std::size_t nb = values.size() / bin_size;
    std::vector<double> bins(nb, 0.0);
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t k = 0; k < bin_size; ++k) bins[b] += values[b * bin_size + k];
        total += bins[b];
    }
    const double used = static_cast<double>(nb * bin_size);
    mean = total / used;
    double var = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double loo = (total - bins[b]) / (used - static_cast<double>(bin_size));
        var += (loo - mean) * (loo - mean);
    }
    return std::sqrt(var * static_cast<double>(nb - 1) / static_cast<double>(nb));
}

}  // namespace

JackknifeResult jackknife(const std::vector<double>& values, std::size_t bin_size) {
    if (bin_size == 0) throw ValidationError("jackknife: bin size must be positive");
    const std::size_t nb = values.size() / bin_size;
    if (nb < kMinBins)
        throw ValidationError("jackknife: " + std::to_string(nb) + " bins, need at least " +
                              std::to_string(kMinBins));
    JackknifeResult r;
    r.bins = nb;
    r.error = jackknife_error(values, bin_size, r.mean);
    if (values.size() / (2 * bin_size) >= kMinBins) {
        double m2 = 0.0;
        r.error_doubled = jackknife_error(values, 2 * bin_size, m2);
        if (r.error > 0.0)
            r.stable = std::abs(r.error_doubled / r.error - 1.0) <= 0.2;
        else
            r.stable = r.error_doubled <= 1e-300;
    }
    return r;
}

JackknifeResult jackknife(const ObservableSeries& series) {
    return jackknife(series.values, series.bin_size);
}

std::size_t bin_size_for(std::size_t n_values, std::size_t bins) {
    if (bins == 0) return 1;
    return std::max<std::size_t>(1, n_values / bins);
}

}  // namespace o3cp1
