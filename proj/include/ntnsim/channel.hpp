#pragma once

// Propagation models: urban macro for ground users, the aerial extension for
// UAVs, and the satellite link budget with elevation-dependent LoS
// probability and clutter loss.  Tabulated constants live in
// ChannelConstants and can be loaded from a text file.

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntnsim/math.hpp"

namespace ntnsim::channel {

enum class Los { los, nlos };

// Defaults follow TR 38.901 (UMa), TR 36.777 (UMa-AV) and TR 38.811
// (S-band urban) at 2 GHz.
struct ChannelConstants {
  double fc_ghz = 2.0;

  double uma_sigma_los_db = 4.0;
  double uma_sigma_nlos_db = 6.0;
  double aerial_sigma_nlos_db = 6.0;

  // Satellite tables indexed by elevation bucket 10, 20, ..., 90 degrees.
  std::array<double, 9> ntn_los_prob_pct{24.6, 38.6, 49.3, 61.3, 72.6,
                                         80.5, 91.9, 96.8, 99.2};
  std::array<double, 9> ntn_clutter_loss_db{34.3, 30.9, 29.0, 27.7, 26.8,
                                            26.2, 25.8, 25.5, 25.5};
  double ntn_sigma_los_db = 4.0;
  double ntn_sigma_nlos_db = 6.0;
  double ntn_atmos_zenith_db = 0.04;  // scaled by cosec(elevation)
  // Tropospheric value near zenith; TR 38.821 treats ionospheric
  // scintillation as negligible for 20-60 deg latitude deployments.
  double ntn_scintillation_db = 0.3;

  // Building entry, low-loss model: 30 % glass, 70 % concrete facade.
  double o2i_glass_fraction = 0.3;
  double o2i_loss_per_m_db = 0.5;
  double o2i_depth_max_m = 25.0;
  double o2i_sigma_db = 4.4;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0))
        throw std::invalid_argument(std::string(name) +
                                    " must be positive, got " +
                                    std::to_string(v));
    };
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0.0))
        throw std::invalid_argument(std::string(name) +
                                    " must be non-negative, got " +
                                    std::to_string(v));
    };
    positive(fc_ghz, "fc_ghz");
    nonneg(uma_sigma_los_db, "uma.sigma_los_db");
    nonneg(uma_sigma_nlos_db, "uma.sigma_nlos_db");
    nonneg(aerial_sigma_nlos_db, "aerial.sigma_nlos_db");
    nonneg(ntn_sigma_los_db, "ntn.sigma_los_db");
    nonneg(ntn_sigma_nlos_db, "ntn.sigma_nlos_db");
    nonneg(ntn_atmos_zenith_db, "ntn.atmos_zenith_db");
    nonneg(ntn_scintillation_db, "ntn.scintillation_db");
    for (double p : ntn_los_prob_pct)
      if (!(p >= 0.0 && p <= 100.0))
        throw std::invalid_argument(
            "ntn.los_prob_pct entries must be in [0, 100], got " +
            std::to_string(p));
    for (double l : ntn_clutter_loss_db) nonneg(l, "ntn.clutter_loss_db");
    if (!(o2i_glass_fraction >= 0.0 && o2i_glass_fraction <= 1.0))
      throw std::invalid_argument("o2i.glass_fraction must be in [0, 1], got " +
                                  std::to_string(o2i_glass_fraction));
    nonneg(o2i_loss_per_m_db, "o2i.loss_per_m_db");
    positive(o2i_depth_max_m, "o2i.depth_max_m");
    nonneg(o2i_sigma_db, "o2i.sigma_db");
  }
};

// ---------------------------------------------------------------------------
// Constants file: `key = value [value ...]`, `#` comments.

namespace detail {

inline double parse_number(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw std::runtime_error(where + ": expected a number, got '" + tok + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ChannelConstants load_channel_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel constants file: " + path);

  ChannelConstants k;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::string where = path + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    std::istringstream vs(line.substr(eq + 1));
    std::vector<double> vals;
    for (std::string tok; vs >> tok;)
      vals.push_back(detail::parse_number(tok, where));
    if (vals.empty()) throw std::runtime_error(where + ": missing value");

    auto scalar = [&](double& dst) {
      if (vals.size() != 1)
        throw std::runtime_error(where + ": key '" + key +
                                 "' takes one value, got " +
                                 std::to_string(vals.size()));
      dst = vals[0];
    };
    auto table9 = [&](std::array<double, 9>& dst) {
      if (vals.size() != 9)
        throw std::runtime_error(where + ": key '" + key +
                                 "' takes 9 values, got " +
                                 std::to_string(vals.size()));
      for (std::size_t i = 0; i < 9; ++i) dst[i] = vals[i];
    };

    if (key == "fc_ghz") scalar(k.fc_ghz);
    else if (key == "uma.sigma_los_db") scalar(k.uma_sigma_los_db);
    else if (key == "uma.sigma_nlos_db") scalar(k.uma_sigma_nlos_db);
    else if (key == "aerial.sigma_nlos_db") scalar(k.aerial_sigma_nlos_db);
    else if (key == "ntn.los_prob_pct") table9(k.ntn_los_prob_pct);
    else if (key == "ntn.clutter_loss_db") table9(k.ntn_clutter_loss_db);
    else if (key == "ntn.sigma_los_db") scalar(k.ntn_sigma_los_db);
    else if (key == "ntn.sigma_nlos_db") scalar(k.ntn_sigma_nlos_db);
    else if (key == "ntn.atmos_zenith_db") scalar(k.ntn_atmos_zenith_db);
    else if (key == "ntn.scintillation_db") scalar(k.ntn_scintillation_db);
    else if (key == "o2i.glass_fraction") scalar(k.o2i_glass_fraction);
    else if (key == "o2i.loss_per_m_db") scalar(k.o2i_loss_per_m_db);
    else if (key == "o2i.depth_max_m") scalar(k.o2i_depth_max_m);
    else if (key == "o2i.sigma_db") scalar(k.o2i_sigma_db);
    else throw std::runtime_error(where + ": unknown key '" + key + "'");
  }
  k.validate();
  return k;
}

inline void save_channel_constants(const ChannelConstants& k,
                                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write channel constants file: " + path);
  out.precision(17);
  out << "# Channel model constants, 2 GHz urban deployment.\n";
  out << "fc_ghz = " << k.fc_ghz << "\n\n";
  out << "# Urban macro shadow fading (TR 38.901)\n";
  out << "uma.sigma_los_db = " << k.uma_sigma_los_db << "\n";
  out << "uma.sigma_nlos_db = " << k.uma_sigma_nlos_db << "\n\n";
  out << "# Aerial users (TR 36.777); LoS sigma is height dependent\n";
  out << "aerial.sigma_nlos_db = " << k.aerial_sigma_nlos_db << "\n\n";
  out << "# Satellite link, S-band urban (TR 38.811), elevation 10..90 deg\n";
  out << "ntn.los_prob_pct =";
  for (double v : k.ntn_los_prob_pct) out << " " << v;
  out << "\nntn.clutter_loss_db =";
  for (double v : k.ntn_clutter_loss_db) out << " " << v;
  out << "\nntn.sigma_los_db = " << k.ntn_sigma_los_db << "\n";
  out << "ntn.sigma_nlos_db = " << k.ntn_sigma_nlos_db << "\n";
  out << "ntn.atmos_zenith_db = " << k.ntn_atmos_zenith_db << "\n";
  out << "ntn.scintillation_db = " << k.ntn_scintillation_db << "\n\n";
  out << "# Building entry, low-loss model (TR 38.901)\n";
  out << "o2i.glass_fraction = " << k.o2i_glass_fraction << "\n";
  out << "o2i.loss_per_m_db = " << k.o2i_loss_per_m_db << "\n";
  out << "o2i.depth_max_m = " << k.o2i_depth_max_m << "\n";
  out << "o2i.sigma_db = " << k.o2i_sigma_db << "\n";
}

// ---------------------------------------------------------------------------
// Line-of-sight probability

inline double uma_los_probability(double d2d_m, double h_ut_m) {
  if (d2d_m <= 18.0) return 1.0;
  double p = 18.0 / d2d_m +
             std::exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m);
  if (h_ut_m > 13.0) {
    const double h = std::min(h_ut_m, 23.0);
    const double c = std::pow((h - 13.0) / 10.0, 1.5);
    p *= 1.0 + c * 1.25 * std::pow(d2d_m / 100.0, 3) * std::exp(-d2d_m / 150.0);
  }
  return std::min(p, 1.0);
}

inline double aerial_los_probability(double d2d_m, double h_ut_m) {
  if (h_ut_m > 100.0) return 1.0;
  const double lh = std::log10(h_ut_m);
  const double d1 = std::max(460.0 * lh - 700.0, 18.0);
  const double p1 = 4300.0 * lh - 3800.0;
  if (d2d_m <= d1) return 1.0;
  return d1 / d2d_m + std::exp(-d2d_m / p1) * (1.0 - d1 / d2d_m);
}

// ---------------------------------------------------------------------------
// Terrestrial path loss

inline double breakpoint_distance_m(double h_bs_m, double h_ut_m,
                                    double fc_ghz) {
  // effective environment height 1 m
  return 4.0 * (h_bs_m - 1.0) * (h_ut_m - 1.0) * fc_ghz * 1e9 / kSpeedOfLight;
}

// Urban macro, UE height 1.5..22.5 m.  d2D below 10 m is clamped to the
// model floor; distances beyond 5 km extrapolate the 38.901 curves.
inline double uma_path_loss_db(double d2d_m, double h_bs_m, double h_ut_m,
                               Los los, double fc_ghz) {
  if (!(h_ut_m >= 1.5 && h_ut_m <= 22.5))
    throw std::invalid_argument("uma_path_loss_db: h_ut_m must be in "
                                "[1.5, 22.5], got " + std::to_string(h_ut_m));
  const double d2d = std::max(d2d_m, 10.0);
  const double d3d = std::hypot(d2d, h_bs_m - h_ut_m);
  const double dbp = breakpoint_distance_m(h_bs_m, h_ut_m, fc_ghz);
  double pl_los;
  if (d2d <= dbp) {
    pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
             9.0 * std::log10(dbp * dbp + (h_bs_m - h_ut_m) * (h_bs_m - h_ut_m));
  }
  if (los == Los::los) return pl_los;
  const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) +
                         20.0 * std::log10(fc_ghz) - 0.6 * (h_ut_m - 1.5);
  return std::max(pl_los, pl_nlos);
}

// Aerial extension, UE height 22.5..300 m.
inline double aerial_path_loss_db(double d2d_m, double h_bs_m, double h_ut_m,
                                  Los los, double fc_ghz) {
  if (!(h_ut_m > 22.5 && h_ut_m <= 300.0))
    throw std::invalid_argument("aerial_path_loss_db: h_ut_m must be in "
                                "(22.5, 300], got " + std::to_string(h_ut_m));
  const double d3d = std::max(std::hypot(d2d_m, h_bs_m - h_ut_m), 10.0);
  const double lh = std::log10(h_ut_m);
  const double pl_los =
      30.9 + (22.25 - 0.5 * lh) * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  if (los == Los::los) return pl_los;
  const double pl_nlos =
      32.4 + (43.2 - 7.6 * lh) * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  return std::max(pl_los, pl_nlos);
}

inline double tn_shadow_sigma_db(bool aerial, double h_ut_m, Los los,
                                 const ChannelConstants& k) {
  if (!aerial)
    return los == Los::los ? k.uma_sigma_los_db : k.uma_sigma_nlos_db;
  if (los == Los::los) return 4.64 * std::exp(-0.0066 * h_ut_m);
  return k.aerial_sigma_nlos_db;
}

// ---------------------------------------------------------------------------
// Satellite path loss

inline double fspl_db(double d_m, double fc_ghz) {
  return 32.45 + 20.0 * std::log10(fc_ghz) + 20.0 * std::log10(d_m);
}

// Nearest tabulated elevation, 10..90 degrees.
inline int elevation_bucket(double elevation_deg) {
  const int idx = static_cast<int>(std::lround(elevation_deg / 10.0));
  return std::clamp(idx, 1, 9) - 1;
}

inline double ntn_los_probability(double elevation_deg,
                                  const ChannelConstants& k) {
  return k.ntn_los_prob_pct[static_cast<std::size_t>(
             elevation_bucket(elevation_deg))] / 100.0;
}

inline double ntn_path_loss_db(double slant_m, double elevation_deg, Los los,
                               const ChannelConstants& k) {
  if (!(slant_m > 0.0))
    throw std::invalid_argument("ntn_path_loss_db: slant_m must be positive");
  double pl = fspl_db(slant_m, k.fc_ghz);
  pl += k.ntn_atmos_zenith_db / std::sin(deg2rad(std::clamp(elevation_deg, 1.0, 90.0)));
  pl += k.ntn_scintillation_db;
  if (los == Los::nlos)
    pl += k.ntn_clutter_loss_db[static_cast<std::size_t>(
        elevation_bucket(elevation_deg))];
  return pl;
}

inline double ntn_shadow_sigma_db(Los los, const ChannelConstants& k) {
  return los == Los::los ? k.ntn_sigma_los_db : k.ntn_sigma_nlos_db;
}

// ---------------------------------------------------------------------------
// Building entry

// Low-loss facade: loss through 30 % glass / 70 % concrete at fc, plus
// indoor depth and a lognormal term.  One draw applies to every link of an
// indoor user.
inline double o2i_facade_loss_db(const ChannelConstants& k) {
  const double glass_db = 2.0 + 0.2 * k.fc_ghz;
  const double concrete_db = 5.0 + 4.0 * k.fc_ghz;
  return 5.0 - 10.0 * std::log10(
                   k.o2i_glass_fraction * std::pow(10.0, -glass_db / 10.0) +
                   (1.0 - k.o2i_glass_fraction) *
                       std::pow(10.0, -concrete_db / 10.0));
}

inline double o2i_entry_loss_db(const ChannelConstants& k, double depth_m,
                                double gauss_z) {
  return o2i_facade_loss_db(k) + k.o2i_loss_per_m_db * depth_m +
         k.o2i_sigma_db * gauss_z;
}

}  // namespace ntnsim::channel
