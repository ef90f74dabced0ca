#pragma once

// Antenna patterns: the sectorised BS element plus vertical array used by
// terrestrial cells, and the circular-aperture reflector used by satellite
// beams.  All gains are in dBi; angles follow the BS convention (zenith
// angle theta from +z, azimuth phi from the sector boresight).

#include <cmath>
#include <stdexcept>
#include <string>

#include "ntnsim/math.hpp"

namespace ntnsim::antenna {

// Single sector element, 65 degree 3 dB widths, 30 dB front-to-back.
inline double element_gain_dbi(double theta_deg, double phi_deg,
                               double gmax_dbi = 8.0) {
  const double av = -std::min(12.0 * std::pow((theta_deg - 90.0) / 65.0, 2), 30.0);
  const double ah = -std::min(12.0 * std::pow(phi_deg / 65.0, 2), 30.0);
  return gmax_dbi - std::min(-(av + ah), 30.0);
}

struct SectorPattern {
  int n_elements = 10;          // vertical ULA
  double spacing_wl = 0.5;      // in wavelengths
  double downtilt_deg = 12.0;   // electrical, steering zenith = 90 + downtilt
  double element_gmax_dbi = 8.0;

  // Power array factor relative to one element; peaks at n_elements.
  double array_factor(double theta_deg) const {
    const double cs = std::cos(deg2rad(90.0 + downtilt_deg));
    const double psi =
        2.0 * kPi * spacing_wl * (std::cos(deg2rad(theta_deg)) - cs);
    const double den = std::sin(psi / 2.0);
    if (std::abs(den) < 1e-9) return static_cast<double>(n_elements);
    const double num = std::sin(n_elements * psi / 2.0);
    const double af = num * num / (n_elements * den * den);
    return std::max(af, 1e-12);
  }

  double gain_dbi(double theta_deg, double phi_deg) const {
    return element_gain_dbi(theta_deg, phi_deg, element_gmax_dbi) +
           lin_to_db(array_factor(theta_deg));
  }
};

// Composite sector gain towards a point, with the sector boresight at
// `azimuth_deg` in the global frame.
inline double sector_gain_dbi(const SectorPattern& pat, const Vec3& bs_pos,
                              double azimuth_deg, const Vec3& to) {
  const Vec3 v = to - bs_pos;
  const double theta = rad2deg(std::acos(std::clamp(v.z / norm(v), -1.0, 1.0)));
  const double phi = wrap_deg(rad2deg(std::atan2(v.y, v.x)) - azimuth_deg);
  return pat.gain_dbi(theta, phi);
}

// Circular-aperture reflector: G(psi) = Gmax + 20 log10 |2 J1(x)/x| with
// x = ka sin(psi).  `ka` is calibrated so the pattern is 3 dB down at half
// the requested beamwidth.
class ReflectorPattern {
 public:
  ReflectorPattern(double gmax_dbi = 30.0, double hpbw_deg = 4.41)
      : gmax_dbi_(gmax_dbi), hpbw_deg_(hpbw_deg) {
    if (!(hpbw_deg > 0.0) || hpbw_deg >= 60.0)
      throw std::invalid_argument("hpbw_deg must be in (0, 60), got " +
                                  std::to_string(hpbw_deg));
    // 2 J1(x)/x is 1 at x = 0 and falls monotonically to the first null at
    // x ~ 3.83; bisect for the -3 dB point.
    const double target = std::pow(10.0, -3.0 / 20.0);
    double lo = 1e-6, hi = 3.8;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (taper(mid) > target ? lo : hi) = mid;
    }
    ka_ = 0.5 * (lo + hi) / std::sin(deg2rad(hpbw_deg / 2.0));
  }

  double gain_dbi(double off_boresight_deg) const {
    const double x = ka_ * std::sin(deg2rad(std::abs(off_boresight_deg)));
    // clamp keeps the nulls finite in dB; -200 dB is far below any noise
    const double u = std::max(taper(x), 1e-10);
    return gmax_dbi_ + 20.0 * std::log10(u);
  }

  double ka() const { return ka_; }
  double gmax_dbi() const { return gmax_dbi_; }
  double hpbw_deg() const { return hpbw_deg_; }

 private:
  static double taper(double x) {
    if (std::abs(x) < 1e-8) return 1.0;
    return std::abs(2.0 * bessel_j1(x) / x);
  }

  double gmax_dbi_;
  double hpbw_deg_;
  double ka_ = 0.0;
};

}  // namespace ntnsim::antenna
