#pragma once

// Small numeric helpers shared by all modules: 3-vectors, dB/linear
// conversion, angle wrapping, and a Bessel J1 implementation used by the
// reflector antenna pattern.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ntnsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Wraps an angle to (-180, 180].
inline double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

// Angle between two vectors in degrees, robust near 0 and 180.
inline double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double c = dot(a, b) / (norm(a) * norm(b));
  return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

// Bessel function of the first kind, order 1.
//
// Power series below the crossover, Hankel asymptotic expansion above it.
// Absolute error is below 1e-9 on [0, 50], which covers every off-axis
// argument the reflector pattern can produce (k*a ~ 42).  Accuracy is
// asserted in tests against std::cyl_bessel_j.
inline double bessel_j1(double x) {
  const double ax = std::fabs(x);
  double r;
  if (ax < 12.0) {
    // J1(x) = (x/2) * sum_k (-x^2/4)^k / (k! (k+1)!)
    const double q = -0.25 * ax * ax;
    double term = 0.5 * ax;
    double sum = term;
    for (int k = 1; k < 80; ++k) {
      term *= q / (static_cast<double>(k) * (k + 1));
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    r = sum;
  } else {
    // J1(x) ~ sqrt(2/(pi x)) [P(x) cos(chi) - Q(x) sin(chi)], chi = x - 3pi/4.
    // c_k = prod_{j=1..k} (mu - (2j-1)^2) / (j * 8 * x), mu = 4.
    const double mu = 4.0;
    double c[12];
    c[0] = 1.0;
    for (int k = 1; k < 12; ++k) {
      const double odd = 2.0 * k - 1.0;
      c[k] = c[k - 1] * (mu - odd * odd) / (8.0 * k * ax);
    }
    double p = 0.0, q = 0.0;
    for (int k = 0; k < 12; k += 2) p += (k % 4 == 0 ? c[k] : -c[k]);
    for (int k = 1; k < 12; k += 2) q += ((k - 1) % 4 == 0 ? c[k] : -c[k]);
    const double chi = ax - 0.75 * kPi;
    r = std::sqrt(2.0 / (kPi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
  }
  return x < 0.0 ? -r : r;
}

}  // namespace ntnsim
