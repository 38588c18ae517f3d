#include <doctest.h>

#include <sstream>

#include "o3cp1/io.hpp"

using namespace o3cp1;

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("snapshot round trips are exact") {
    const Lattice lat({3, 2});
    Rng rng(4);
    const auto n = random_spin_field(lat, rng);
    const auto z = random_cp1_field(lat, rng);
    GaugeField a(lat);
    for (std::size_t l = 0; l < a.size(); ++l) a[l] = standard_normal(rng);

    std::stringstream sn, sz, sa;
    write_spin_snapshot(sn, n);
    write_cp1_snapshot(sz, z);
    write_gauge_snapshot(sa, a, lat);
    CHECK(sn.str().rfind("site,nx,ny,nz\n", 0) == 0);
    CHECK(sz.str().rfind("site,re_z1,im_z1,re_z2,im_z2\n", 0) == 0);
    CHECK(sa.str().rfind("link,site,mu,a\n", 0) == 0);

    CHECK(read_spin_snapshot(sn, lat) == n);
    CHECK(read_cp1_snapshot(sz, lat) == z);
    CHECK(read_gauge_snapshot(sa, lat).values() == a.values());
}

TEST_CASE("malformed snapshots are rejected") {
    const Lattice lat({2});
    auto bad = [&](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(read_spin_snapshot(in, lat), ValidationError);
    };
    bad("");
    bad("site,x,y,z\n0,0,0,1\n1,0,0,1\n");
    bad("site,nx,ny,nz\n0,0,0,1\n");
    bad("site,nx,ny,nz\n0,0,0,1\n1,0,0\n");
    bad("site,nx,ny,nz\n1,0,0,1\n0,0,0,1\n");
    bad("site,nx,ny,nz\n0,0,0,1\n1,0,0,2\n");
    bad("site,nx,ny,nz\n0,0,0,1\n1,0,0,nan\n");
    bad("site,nx,ny,nz\n0,0,0,1\n1,0,0,1\n2,0,0,1\n");
    std::istringstream in("site,re_z1,im_z1,re_z2,im_z2\n0,1,0,0,0\n1,0.5,0,0,0\n");
    CHECK_THROWS_AS(read_cp1_snapshot(in, lat), ValidationError);
}

TEST_CASE("series CSV layout") {
    std::vector<ObservableSeries> s = {{"energy", {0.5, 0.25}, {10, 15}, 1, 5},
                                       {"nz", {0.1, -0.1}, {10, 15}, 1, 5}};
    std::ostringstream out;
    write_series_csv(out, s, {"config {}"});
    CHECK(out.str() ==
          "# config {}\nsweep,observable,value\n10,energy,0.5\n10,nz,0.10000000000000001\n"
          "15,energy,0.25\n15,nz,-0.10000000000000001\n");
    std::istringstream in(out.str());
    const auto rows = read_series_csv(in);
    REQUIRE(rows.size() == 4);
    CHECK(rows[3].sweep == 15);
    CHECK(rows[3].observable == "nz");
    CHECK(rows[3].value == -0.1);
}
