#include "o3cp1/io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace o3cp1 {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

double to_double(const std::string& s, std::size_t row) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("snapshot row " + std::to_string(row) + ": bad number '" + s + "'");
    }
}

/// Rows after the header, checked for width and consecutive leading index.
std::vector<std::vector<double>> read_rows(std::istream& in, const std::string& header,
                                           std::size_t expected_rows) {
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw ValidationError("snapshot: expected header '" + header + "'");
    const std::size_t width = split(header).size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != width)
            throw ValidationError("snapshot row " + std::to_string(rows.size()) +
                                  ": expected " + std::to_string(width) + " columns");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(to_double(c, rows.size()));
        if (row[0] != static_cast<double>(rows.size()))
            throw ValidationError("snapshot row " + std::to_string(rows.size()) +
                                  ": index out of order");
        rows.push_back(std::move(row));
    }
    if (rows.size() != expected_rows)
        throw ValidationError("snapshot: " + std::to_string(rows.size()) + " rows, expected " +
                              std::to_string(expected_rows));
    return rows;
}

}  // namespace

void write_spin_snapshot(std::ostream& out, const SpinField& n) {
    out << "site,nx,ny,nz\n";
    for (std::size_t x = 0; x < n.size(); ++x)
        out << x << ',' << format_double(n[x].x()) << ',' << format_double(n[x].y()) << ','
            << format_double(n[x].z()) << '\n';
}

void write_cp1_snapshot(std::ostream& out, const CP1Field& z) {
    out << "site,re_z1,im_z1,re_z2,im_z2\n";
    for (std::size_t x = 0; x < z.size(); ++x)
        out << x << ',' << format_double(z[x](0).real()) << ',' << format_double(z[x](0).imag())
            << ',' << format_double(z[x](1).real()) << ',' << format_double(z[x](1).imag())
            << '\n';
}

void write_gauge_snapshot(std::ostream& out, const GaugeField& a, const Lattice& lat) {
    out << "link,site,mu,a\n";
    for (std::size_t l = 0; l < a.size(); ++l) {
        const LinkId id = lat.link(l);
        out << l << ',' << id.site << ',' << id.mu << ',' << format_double(a[l]) << '\n';
    }
}

SpinField read_spin_snapshot(std::istream& in, const Lattice& lat) {
    SpinField n;
    for (const auto& r : read_rows(in, "site,nx,ny,nz", lat.volume()))
        n.emplace_back(r[1], r[2], r[3]);
    require_unit_field(n, lat, "read_spin_snapshot");
    return n;
}

CP1Field read_cp1_snapshot(std::istream& in, const Lattice& lat) {
    CP1Field z;
    for (const auto& r : read_rows(in, "site,re_z1,im_z1,re_z2,im_z2", lat.volume()))
        z.emplace_back(std::complex<double>(r[1], r[2]), std::complex<double>(r[3], r[4]));
    require_unit_field(z, lat, "read_cp1_snapshot");
    return z;
}

GaugeField read_gauge_snapshot(std::istream& in, const Lattice& lat) {
    GaugeField a(lat);
    const auto rows = read_rows(in, "link,site,mu,a", lat.n_links());
    for (std::size_t l = 0; l < rows.size(); ++l) {
        const LinkId id = lat.link(l);
        if (rows[l][1] != static_cast<double>(id.site) || rows[l][2] != id.mu)
            throw ValidationError("gauge snapshot row " + std::to_string(l) +
                                  ": site/mu do not match the link index");
        a[l] = rows[l][3];
    }
    require_finite(a, lat, "read_gauge_snapshot");
    return a;
}

void write_series_csv(std::ostream& out, const std::vector<ObservableSeries>& series,
                      const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) out << "# " << line << '\n';
    out << "sweep,observable,value\n";
    std::size_t rows = 0;
    for (const auto& s : series) rows = std::max(rows, s.values.size());
    for (std::size_t k = 0; k < rows; ++k)
        for (const auto& s : series) {
            if (k >= s.values.size()) continue;
            const long sweep = k < s.sweeps.size() ? s.sweeps[k] : static_cast<long>(k);
            out << sweep << ',' << s.name << ',' << format_double(s.values[k]) << '\n';
        }
}

std::vector<SeriesRow> read_series_csv(std::istream& in) {
    std::vector<SeriesRow> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "sweep,observable,value")
                throw ValidationError("series csv: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != 3) throw ValidationError("series csv: malformed row '" + line + "'");
        rows.push_back({std::stol(cells[0]), cells[1], to_double(cells[2], rows.size())});
    }
    return rows;
}

}  // namespace o3cp1
