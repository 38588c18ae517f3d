#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "o3cp1/fields.hpp"
#include "o3cp1/lattice.hpp"
#include "o3cp1/stats.hpp"

namespace o3cp1 {

/// Shortest text that round-trips a double exactly ("%.17g").
std::string format_double(double v);

// Snapshot CSVs: one row per site (or link) after a header line.
//   spin:  site,nx,ny,nz
//   cp1:   site,re_z1,im_z1,re_z2,im_z2
//   gauge: link,site,mu,a

void write_spin_snapshot(std::ostream& out, const SpinField& n);
void write_cp1_snapshot(std::ostream& out, const CP1Field& z);
void write_gauge_snapshot(std::ostream& out, const GaugeField& a, const Lattice& lat);

SpinField read_spin_snapshot(std::istream& in, const Lattice& lat);
CP1Field read_cp1_snapshot(std::istream& in, const Lattice& lat);
GaugeField read_gauge_snapshot(std::istream& in, const Lattice& lat);

/// Series CSV with columns sweep,observable,value, measurement by measurement and,
/// within one measurement, in the order of `series`. Each line of `preamble`
/// is written first as a "# " comment.
void write_series_csv(std::ostream& out, const std::vector<ObservableSeries>& series,
                      const std::vector<std::string>& preamble = {});

struct SeriesRow {
    long sweep = 0;
    std::string observable;
    double value = 0.0;
};
/// Reads back a series CSV, skipping comment lines.
std::vector<SeriesRow> read_series_csv(std::istream& in);

}  // namespace o3cp1
