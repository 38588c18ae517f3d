#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace o3cp1 {

/// Monte Carlo measurements of one observable, in sweep order.
struct ObservableSeries {
    std::string name;
    std::vector<double> values;
    std::vector<long> sweeps;    ///< sweep index of each measurement, same length as values
    std::size_t bin_size = 1;
    long thermalization = 0;     ///< sweeps discarded before the first measurement

    std::size_t n_bins() const { return bin_size == 0 ? 0 : values.size() / bin_size; }
};

inline constexpr std::size_t kMinBins = 20;

struct JackknifeResult {
    double mean = 0.0;
    double error = 0.0;
    std::size_t bins = 0;
    /// error with twice the bin size, when at least kMinBins bins remain (else negative)
    double error_doubled = -1.0;
    /// |error_doubled / error - 1| <= 0.2; true when the doubled estimate is unavailable
    bool stable = true;
};

/// Binned delete-one jackknife of the mean. Trailing values that do not fill a
/// bin are dropped. Throws ValidationError with fewer than kMinBins bins.
JackknifeResult jackknife(const ObservableSeries& series);
JackknifeResult jackknife(const std::vector<double>& values, std::size_t bin_size);

/// Bin size giving exactly `bins` bins (at least 1).
std::size_t bin_size_for(std::size_t n_values, std::size_t bins);

}  // namespace o3cp1
