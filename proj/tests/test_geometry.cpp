#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ntnsim/geometry.hpp"

using namespace ntnsim;
using namespace ntnsim::geometry;
using Catch::Approx;

TEST_CASE("sector area") {
  // sqrt(3)/6 * 500^2
  REQUIRE(cell_area_m2(500.0) == Approx(72168.78364870322).epsilon(1e-12));
}

TEST_CASE("slant range") {
  EarthModel earth;

  SECTION("zenith gives the orbit altitude exactly") {
    REQUIRE(slant_range_m(90.0, earth) == 600000.0);
  }
  SECTION("frozen values") {
    REQUIRE(slant_range_m(87.0, earth) == Approx(600752.4066601563).margin(1e-3));
    REQUIRE(slant_range_m(30.0, earth) == Approx(1075088.0169291184).margin(1e-3));
  }
  SECTION("monotone decreasing in elevation") {
    double prev = slant_range_m(5.0, earth);
    for (double e = 10.0; e <= 90.0; e += 5.0) {
      const double d = slant_range_m(e, earth);
      REQUIRE(d < prev);
      prev = d;
    }
  }
  SECTION("rejects elevations outside (0, 90]") {
    REQUIRE_THROWS_AS(slant_range_m(0.0, earth), std::invalid_argument);
    REQUIRE_THROWS_AS(slant_range_m(-5.0, earth), std::invalid_argument);
    REQUIRE_THROWS_AS(slant_range_m(90.5, earth), std::invalid_argument);
  }
}

TEST_CASE("terrestrial layout") {
  const TnLayout layout = build_tn_layout(500.0, 52.0e6);

  SECTION("site and cell counts") {
    REQUIRE(layout.sites.size() == 241);
    REQUIRE(layout.cells.size() == 723);
  }
  SECTION("sites inside the service disc, at BS height") {
    for (const Vec3& s : layout.sites) {
      REQUIRE(std::hypot(s.x, s.y) <= layout.area_radius_m + 1e-9);
      REQUIRE(s.z == 25.0);
    }
  }
  SECTION("three sectors per site at 30/150/270") {
    std::vector<int> per_site(layout.sites.size(), 0);
    for (const TnCell& c : layout.cells) {
      ++per_site[static_cast<std::size_t>(c.site)];
      const bool ok = c.azimuth_deg == 30.0 || c.azimuth_deg == 150.0 ||
                      c.azimuth_deg == 270.0;
      REQUIRE(ok);
    }
    for (int n : per_site) REQUIRE(n == 3);
  }
  SECTION("interior sites have exactly six neighbours at one ISD") {
    const double r_int = layout.area_radius_m - 1.5 * layout.isd_m;
    int interior = 0;
    for (std::size_t a = 0; a < layout.sites.size(); ++a) {
      if (std::hypot(layout.sites[a].x, layout.sites[a].y) > r_int) continue;
      ++interior;
      int neighbours = 0;
      for (std::size_t b = 0; b < layout.sites.size(); ++b) {
        if (a == b) continue;
        const double d = std::hypot(layout.sites[a].x - layout.sites[b].x,
                                    layout.sites[a].y - layout.sites[b].y);
        if (std::abs(d - layout.isd_m) < 1.0) ++neighbours;
        REQUIRE(d > layout.isd_m - 1.0);  // no closer pair exists
      }
      REQUIRE(neighbours == 6);
    }
    REQUIRE(interior > 100);
  }
  SECTION("an area of three sector footprints holds one site") {
    const TnLayout tiny = build_tn_layout(500.0, 3.0 * cell_area_m2(500.0));
    REQUIRE(tiny.sites.size() == 1);
    REQUIRE(tiny.cells.size() == 3);
  }
  SECTION("rejects non-positive dimensions") {
    REQUIRE_THROWS_AS(build_tn_layout(0.0, 52.0e6), std::invalid_argument);
    REQUIRE_THROWS_AS(build_tn_layout(500.0, -1.0), std::invalid_argument);
  }
}

TEST_CASE("beam grid at zenith") {
  EarthModel earth;
  const BeamGrid g = build_beam_grid(90.0, 4.41, 1, earth);

  SECTION("satellite straight above the area centre") {
    REQUIRE(g.sat_pos.x == Approx(0.0).margin(1e-6));
    REQUIRE(g.sat_pos.y == Approx(0.0).margin(1e-6));
    REQUIRE(g.sat_pos.z == Approx(600000.0).margin(1e-6));
  }
  SECTION("centre beam points at nadir") {
    REQUIRE(off_boresight_angle_deg(g, 0, Vec3{0, 0, 1.5}) ==
            Approx(0.0).margin(1e-9));
    REQUIRE(elevation_deg_at(g, Vec3{0, 0, 1.5}, earth) ==
            Approx(90.0).margin(1e-9));
  }
  SECTION("ring beams tilt one HPBW off nadir, 60 degrees apart") {
    for (int b = 1; b <= 6; ++b) {
      REQUIRE(angle_between_deg(g.beams[0].boresight,
                                g.beams[static_cast<std::size_t>(b)].boresight) ==
              Approx(4.41).margin(1e-9));
    }
    for (int b = 1; b <= 6; ++b) {
      const int nb = b == 6 ? 1 : b + 1;
      const double sep = angle_between_deg(
          g.beams[static_cast<std::size_t>(b)].boresight,
          g.beams[static_cast<std::size_t>(nb)].boresight);
      // chord of a 60 degree step on a 4.41 degree cone
      REQUIRE(sep == Approx(4.41).margin(0.01));
    }
  }
}

TEST_CASE("beam grid off zenith") {
  EarthModel earth;
  const BeamGrid g = build_beam_grid(87.0, 4.41, 1, earth);

  SECTION("range and elevation seen from the area centre") {
    const Vec3 origin{0, 0, 0};
    REQUIRE(norm(g.sat_pos - origin) ==
            Approx(slant_range_m(87.0, earth)).epsilon(1e-9));
    REQUIRE(elevation_deg_at(g, origin, earth) == Approx(87.0).margin(1e-6));
  }
  SECTION("satellite displaced along the track azimuth") {
    REQUIRE(rad2deg(std::atan2(g.sat_pos.y, g.sat_pos.x)) ==
            Approx(30.0).margin(1e-9));
  }
  SECTION("centre-beam off-boresight at the area centre equals the off-nadir angle") {
    // asin(R cos(e) / (R + h)) for e = 87
    REQUIRE(off_boresight_angle_deg(g, 0, Vec3{0, 0, 0}) ==
            Approx(2.741580843198467).margin(1e-6));
  }
}

TEST_CASE("frequency reuse bands") {
  EarthModel earth;

  SECTION("FRF 1 shares one band") {
    const BeamGrid g = build_beam_grid(90.0, 4.41, 1, earth);
    for (const Beam& b : g.beams) REQUIRE(b.band == 0);
    REQUIRE(co_band_beams(g, 0).size() == 6);
  }
  SECTION("FRF 3 isolates the centre beam") {
    const BeamGrid g = build_beam_grid(90.0, 4.41, 3, earth);
    REQUIRE(g.beams[0].band == 0);
    for (int b = 1; b <= 6; ++b)
      REQUIRE(g.beams[static_cast<std::size_t>(b)].band == 1 + (b - 1) % 2);
    REQUIRE(co_band_beams(g, 0).empty());
    REQUIRE(co_band_beams(g, 1) == std::vector<int>{3, 5});
    REQUIRE(co_band_beams(g, 2) == std::vector<int>{4, 6});
  }
  SECTION("rejects unsupported parameters") {
    REQUIRE_THROWS_AS(build_beam_grid(90.0, 4.41, 2, earth),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(build_beam_grid(90.0, 0.0, 1, earth),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(build_beam_grid(0.0, 4.41, 1, earth),
                      std::invalid_argument);
  }
}

TEST_CASE("user drops") {
  const TnLayout layout = build_tn_layout(500.0, 52.0e6);
  TrafficMix mix;

  SECTION("counts follow the mix") {
    Stream s(derive(42, 1));
    const auto users = drop_users(layout, mix, s);
    const double mean = 15.0 * 723.0;
    REQUIRE(std::abs(static_cast<double>(users.size()) - mean) <
            6.0 * std::sqrt(mean));

    std::size_t n_uav = 0;
    for (const User& u : users)
      if (u.kind == UserKind::uav) ++n_uav;
    const auto want = static_cast<std::size_t>(std::llround(
        static_cast<double>(users.size()) * mix.uav_ratio /
        (1.0 + mix.uav_ratio)));
    REQUIRE(n_uav == want);
  }

  SECTION("positions, heights and flags") {
    Stream s(derive(42, 2));
    const auto users = drop_users(layout, mix, s);
    std::size_t indoor = 0, gue = 0;
    for (const User& u : users) {
      const double rr = std::hypot(u.pos.x, u.pos.y);
      REQUIRE(rr <= layout.area_radius_m);
      REQUIRE(u.edge == (rr > layout.area_radius_m - layout.isd_m));
      if (u.kind == UserKind::uav) {
        REQUIRE(u.pos.z == 150.0);
        REQUIRE_FALSE(u.indoor);
      } else {
        ++gue;
        if (u.indoor) {
          ++indoor;
          REQUIRE(u.floor >= 1);
          REQUIRE(u.floor <= 8);
          REQUIRE(u.pos.z == Approx(1.5 + 3.0 * (u.floor - 1)));
          REQUIRE(u.pos.z <= 22.5);
        } else {
          REQUIRE(u.pos.z == 1.5);
        }
      }
    }
    REQUIRE(std::abs(static_cast<double>(indoor) / static_cast<double>(gue) -
                     0.8) < 0.02);
  }

  SECTION("same seed reproduces the drop") {
    Stream s1(derive(7, 3)), s2(derive(7, 3));
    const auto a = drop_users(layout, mix, s1);
    const auto b = drop_users(layout, mix, s2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].pos.x == b[i].pos.x);
      REQUIRE(a[i].pos.y == b[i].pos.y);
      REQUIRE(a[i].pos.z == b[i].pos.z);
      REQUIRE(a[i].kind == b[i].kind);
      REQUIRE(a[i].indoor == b[i].indoor);
    }
  }
}
