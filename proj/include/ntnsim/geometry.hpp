#pragma once

// Deployment geometry: hexagonal terrestrial layout, LEO satellite and beam
// grid placement, and per-drop user positioning.
//
// Local coordinate frame: origin at the centre of the service area on the
// Earth surface, z up.  Terrestrial distances use the flat tangent plane;
// satellite geometry accounts for Earth curvature (the Earth centre sits at
// z = -R).

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntnsim/math.hpp"
#include "ntnsim/rng.hpp"

namespace ntnsim::geometry {

struct EarthModel {
  double radius_m = 6371000.0;
  double orbit_altitude_m = 600000.0;
};

// ---------------------------------------------------------------------------
// Terrestrial layout

struct TnCell {
  int site = 0;            // index into TnLayout::sites
  double azimuth_deg = 0;  // sector boresight azimuth, x axis = 0, ccw
};

struct TnLayout {
  double isd_m = 0;
  double area_m2 = 0;
  double area_radius_m = 0;  // service area is a disc of this radius
  double bs_height_m = 0;
  std::vector<Vec3> sites;  // z = bs_height_m
  std::vector<TnCell> cells;
};

// Area of one hexagonal sector: sqrt(3)/6 * ISD^2.
inline double cell_area_m2(double isd_m) {
  return std::sqrt(3.0) / 6.0 * isd_m * isd_m;
}

// Hexagonal site lattice clipped to the service disc, three sectors per
// site at azimuths 30/150/270.
inline TnLayout build_tn_layout(double isd_m, double area_m2,
                                double bs_height_m = 25.0) {
  if (!(isd_m > 0.0))
    throw std::invalid_argument("isd_m must be positive, got " +
                                std::to_string(isd_m));
  if (!(area_m2 > 0.0))
    throw std::invalid_argument("area_m2 must be positive, got " +
                                std::to_string(area_m2));

  TnLayout out;
  out.isd_m = isd_m;
  out.area_m2 = area_m2;
  out.area_radius_m = std::sqrt(area_m2 / kPi);
  out.bs_height_m = bs_height_m;

  const double row_dy = isd_m * std::sqrt(3.0) / 2.0;
  const double r = out.area_radius_m;
  const int jmax = static_cast<int>(std::floor(r / row_dy));
  for (int j = -jmax; j <= jmax; ++j) {
    const double y = j * row_dy;
    const double x_off = (j % 2 != 0) ? isd_m / 2.0 : 0.0;
    const double half_span = std::sqrt(std::max(0.0, r * r - y * y));
    const int imin = static_cast<int>(std::ceil((-half_span - x_off) / isd_m));
    const int imax = static_cast<int>(std::floor((half_span - x_off) / isd_m));
    for (int i = imin; i <= imax; ++i)
      out.sites.push_back({i * isd_m + x_off, y, bs_height_m});
  }
  if (out.sites.empty())
    throw std::invalid_argument(
        "area_m2 too small for the given isd_m: no site fits");

  for (int s = 0; s < static_cast<int>(out.sites.size()); ++s)
    for (double az : {30.0, 150.0, 270.0})
      out.cells.push_back({s, az});
  return out;
}

// ---------------------------------------------------------------------------
// Satellite geometry

// Distance from a ground point to a satellite seen at the given elevation:
// d = sqrt(R^2 sin^2(e) + h^2 + 2hR) - R sin(e).
inline double slant_range_m(double elevation_deg, const EarthModel& earth) {
  if (!(elevation_deg > 0.0) || elevation_deg > 90.0)
    throw std::invalid_argument("elevation_deg must be in (0, 90], got " +
                                std::to_string(elevation_deg));
  const double r = earth.radius_m;
  const double h = earth.orbit_altitude_m;
  const double rs = r * std::sin(deg2rad(elevation_deg));
  return std::sqrt(rs * rs + h * h + 2.0 * h * r) - rs;
}

struct Beam {
  Vec3 boresight;  // unit vector from the satellite
  int band = 0;    // frequency band index; co-band beams interfere
};

struct BeamGrid {
  Vec3 sat_pos;
  double elevation_deg = 90.0;  // as seen from the area centre
  double hpbw_deg = 4.41;
  int frf = 1;
  double track_azimuth_deg = 30.0;
  std::array<Beam, 7> beams;  // [0] nadir-pointing centre, [1..6] ring
};

// Places the satellite so the area centre sees it at `elevation_deg`, with
// the displacement along the ground-track azimuth, and builds the 7-beam
// grid: a nadir-pointing centre beam plus a ring at one-HPBW angular offset
// in 60-degree azimuth steps.  FRF 1 puts every beam in band 0; FRF 3 keeps
// the centre beam alone in band 0 and alternates bands 1,2 around the ring.
inline BeamGrid build_beam_grid(double elevation_deg, double hpbw_deg, int frf,
                                const EarthModel& earth,
                                double track_azimuth_deg = 30.0) {
  if (frf != 1 && frf != 3)
    throw std::invalid_argument("frf must be 1 or 3, got " +
                                std::to_string(frf));
  if (!(hpbw_deg > 0.0))
    throw std::invalid_argument("hpbw_deg must be positive, got " +
                                std::to_string(hpbw_deg));
  slant_range_m(elevation_deg, earth);  // validates the elevation

  const double r = earth.radius_m;
  const double h = earth.orbit_altitude_m;
  // Off-nadir angle at the satellite, then Earth central angle between the
  // sub-satellite point and the area centre.
  const double beta =
      std::asin(r * std::cos(deg2rad(elevation_deg)) / (r + h));
  const double gamma = deg2rad(90.0 - elevation_deg) - beta;

  BeamGrid g;
  g.elevation_deg = elevation_deg;
  g.hpbw_deg = hpbw_deg;
  g.frf = frf;
  g.track_azimuth_deg = track_azimuth_deg;

  const Vec3 u_track{std::cos(deg2rad(track_azimuth_deg)),
                     std::sin(deg2rad(track_azimuth_deg)), 0.0};
  const double rs = r + h;
  g.sat_pos = u_track * (rs * std::sin(gamma));
  g.sat_pos.z = rs * std::cos(gamma) - r;

  const Vec3 earth_centre{0.0, 0.0, -r};
  const Vec3 nadir = normalized(earth_centre - g.sat_pos);
  // Ring azimuth basis: e1 along global +x projected off the nadir axis, so
  // ring azimuth 0 is the global x direction regardless of the track.
  Vec3 e1{1.0, 0.0, 0.0};
  e1 = normalized(e1 - nadir * dot(e1, nadir));
  const Vec3 e2 = cross(nadir, e1);

  g.beams[0] = {nadir, 0};
  const double tilt = deg2rad(hpbw_deg);
  for (int k = 0; k < 6; ++k) {
    const double az = deg2rad(60.0 * k);
    const Vec3 dir = nadir * std::cos(tilt) +
                     (e1 * std::cos(az) + e2 * std::sin(az)) * std::sin(tilt);
    const int band = (frf == 1) ? 0 : 1 + (k % 2);
    g.beams[k + 1] = {normalized(dir), band};
  }
  return g;
}

// Angle between a beam boresight and the satellite-to-user direction.
inline double off_boresight_angle_deg(const BeamGrid& g, int beam,
                                      const Vec3& user_pos) {
  return angle_between_deg(g.beams[static_cast<std::size_t>(beam)].boresight,
                           user_pos - g.sat_pos);
}

// Elevation of the satellite above the user's local horizontal plane.
inline double elevation_deg_at(const BeamGrid& g, const Vec3& user_pos,
                               const EarthModel& earth) {
  const Vec3 up = normalized(user_pos - Vec3{0.0, 0.0, -earth.radius_m});
  const Vec3 d = g.sat_pos - user_pos;
  return rad2deg(std::asin(std::clamp(dot(d, up) / norm(d), -1.0, 1.0)));
}

// Beams sharing the band of `beam`, excluding itself.
inline std::vector<int> co_band_beams(const BeamGrid& g, int beam) {
  std::vector<int> out;
  for (int b = 0; b < 7; ++b)
    if (b != beam && g.beams[static_cast<std::size_t>(b)].band ==
                         g.beams[static_cast<std::size_t>(beam)].band)
      out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------
// Users

enum class UserKind { gue, uav };

struct User {
  UserKind kind = UserKind::gue;
  Vec3 pos;           // z is the antenna height
  bool indoor = false;
  int floor = 0;      // 1-based, indoor users only
  bool edge = false;  // within one ISD of the service-area rim
};

struct TrafficMix {
  double users_per_cell = 15.0;  // Poisson mean per sector
  double uav_ratio = 0.071;      // UAV / GUE count ratio
  double indoor_fraction = 0.8;  // of GUEs
  double uav_height_m = 150.0;
  double outdoor_height_m = 1.5;
};

// Draws one drop of users, uniform over the service disc.  The total count
// is Poisson with mean users_per_cell * n_cells; the UAV count follows the
// UAV/GUE ratio, i.e. round(total * ratio / (1 + ratio)).  Indoor GUEs get
// a floor uniform in a building of 4..8 floors, height 1.5 + 3(floor-1).
inline std::vector<User> drop_users(const TnLayout& layout,
                                    const TrafficMix& mix, Stream& stream) {
  const double mean =
      mix.users_per_cell * static_cast<double>(layout.cells.size());
  const std::uint64_t total = stream.poisson(mean);
  const std::uint64_t n_uav = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(total) * mix.uav_ratio /
                   (1.0 + mix.uav_ratio)));

  std::vector<User> users(total);
  const double r_area = layout.area_radius_m;
  for (std::uint64_t i = 0; i < total; ++i) {
    User& u = users[i];
    const double rr = r_area * std::sqrt(stream.uniform());
    const double ang = 2.0 * kPi * stream.uniform();
    u.pos = {rr * std::cos(ang), rr * std::sin(ang), 0.0};
    u.edge = rr > r_area - layout.isd_m;
    if (i < n_uav) {
      u.kind = UserKind::uav;
      u.pos.z = mix.uav_height_m;
    } else {
      u.kind = UserKind::gue;
      u.indoor = stream.uniform() < mix.indoor_fraction;
      if (u.indoor) {
        const int building_floors = 4 + static_cast<int>(stream.uniform_int(5));
        u.floor = 1 + static_cast<int>(
                          stream.uniform_int(static_cast<std::uint64_t>(
                              building_floors)));
        u.pos.z = 1.5 + 3.0 * (u.floor - 1);
      } else {
        u.pos.z = mix.outdoor_height_m;
      }
    }
  }
  return users;
}

}  // namespace ntnsim::geometry
