#pragma once

// Scenario configuration: presets for the studied cases, a dotted-key
// config-file format, validation, and a flattened echo used for result
// metadata.

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ntnsim/channel.hpp"
#include "ntnsim/geometry.hpp"
#include "ntnsim/radio.hpp"

namespace ntnsim::config {

enum class Mode { standalone, relief, partition, offload };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::standalone: return "standalone";
    case Mode::relief: return "relief";
    case Mode::partition: return "partition";
    case Mode::offload: return "offload";
  }
  return "standalone";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "standalone") return Mode::standalone;
  if (s == "relief") return Mode::relief;
  if (s == "partition") return Mode::partition;
  if (s == "offload") return Mode::offload;
  throw std::invalid_argument(
      "unknown mode '" + s +
      "' (expected standalone, relief, partition or offload)");
}

struct ScenarioConfig {
  std::string name = "custom";
  Mode mode = Mode::standalone;
  std::uint64_t seed = 1;
  int drops = 100;

  // deployment
  double isd_m = 500.0;
  double area_m2 = 52.0e6;
  double bs_height_m = 25.0;
  double orbit_altitude_m = 600.0e3;
  double elevation_deg = 90.0;
  double hpbw_deg = 4.41;
  int frf = 1;
  double track_azimuth_deg = 30.0;

  geometry::TrafficMix traffic;
  radio::RadioParams radio;
  channel::ChannelConstants consts;

  double relief_threshold_db = -5.0;
  double partition_target_bps = 100.0e3;
  double outage_threshold_db = -5.0;
  int fading_draws = 50;

  // occupied band per satellite beam
  double ntn_beam_bw_hz() const {
    return radio.ntn_bw_total_hz / static_cast<double>(frf);
  }

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument(msg);
    };
    if (drops < 1) fail("drops must be >= 1, got " + std::to_string(drops));
    if (fading_draws < 1)
      fail("fading.draws must be >= 1, got " + std::to_string(fading_draws));
    if (!(isd_m > 0.0))
      fail("deployment.isd_m must be positive, got " + std::to_string(isd_m));
    if (!(area_m2 > 0.0))
      fail("deployment.area_m2 must be positive, got " + std::to_string(area_m2));
    if (!(bs_height_m > 0.0))
      fail("deployment.bs_height_m must be positive, got " +
           std::to_string(bs_height_m));
    if (!(orbit_altitude_m > 0.0))
      fail("deployment.orbit_altitude_m must be positive, got " +
           std::to_string(orbit_altitude_m));
    if (!(elevation_deg > 0.0) || elevation_deg > 90.0)
      fail("deployment.elevation_deg must be in (0, 90], got " +
           std::to_string(elevation_deg));
    if (!(hpbw_deg > 0.0) || hpbw_deg >= 60.0)
      fail("deployment.hpbw_deg must be in (0, 60), got " +
           std::to_string(hpbw_deg));
    if (frf != 1 && frf != 3)
      fail("deployment.frf must be 1 or 3, got " + std::to_string(frf));
    if (!(traffic.users_per_cell > 0.0))
      fail("traffic.users_per_cell must be positive, got " +
           std::to_string(traffic.users_per_cell));
    if (!(traffic.uav_ratio >= 0.0))
      fail("traffic.uav_ratio must be non-negative, got " +
           std::to_string(traffic.uav_ratio));
    if (!(traffic.indoor_fraction >= 0.0 && traffic.indoor_fraction <= 1.0))
      fail("traffic.indoor_fraction must be in [0, 1], got " +
           std::to_string(traffic.indoor_fraction));
    if (!(traffic.uav_height_m > 22.5 && traffic.uav_height_m <= 300.0))
      fail("traffic.uav_height_m must be in (22.5, 300], got " +
           std::to_string(traffic.uav_height_m));
    if (!(partition_target_bps > 0.0))
      fail("partition.target_bps must be positive, got " +
           std::to_string(partition_target_bps));
    radio.validate();
    consts.validate();
  }
};

// ---------------------------------------------------------------------------
// Presets

inline std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const char* c : {"case2", "case3"})
    for (const char* v :
         {"standalone", "relief", "partition", "offload_90_frf1",
          "offload_90_frf3", "offload_87_frf1", "offload_87_frf3"})
      out.push_back(std::string(c) + "." + v);
  return out;
}

// Case 2 places one UAV per ten TN cells, case 3 one per cell.
inline ScenarioConfig preset(const std::string& name) {
  const auto dot = name.find('.');
  const std::string c = name.substr(0, dot);
  const std::string v = dot == std::string::npos ? "" : name.substr(dot + 1);

  ScenarioConfig cfg;
  cfg.name = name;
  if (c == "case2") cfg.traffic.uav_ratio = 0.0071;
  else if (c == "case3") cfg.traffic.uav_ratio = 0.071;
  else {
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw std::invalid_argument(msg);
  }

  if (v == "standalone") cfg.mode = Mode::standalone;
  else if (v == "relief") cfg.mode = Mode::relief;
  else if (v == "partition") cfg.mode = Mode::partition;
  else if (v == "offload_90_frf1") { cfg.mode = Mode::offload; cfg.elevation_deg = 90.0; cfg.frf = 1; }
  else if (v == "offload_90_frf3") { cfg.mode = Mode::offload; cfg.elevation_deg = 90.0; cfg.frf = 3; }
  else if (v == "offload_87_frf1") { cfg.mode = Mode::offload; cfg.elevation_deg = 87.0; cfg.frf = 1; }
  else if (v == "offload_87_frf3") { cfg.mode = Mode::offload; cfg.elevation_deg = 87.0; cfg.frf = 3; }
  else {
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Config file: `key = value`, `#` comments, later keys override earlier
// ones.  A `preset = name` line is applied before everything else.

namespace detail {

inline std::string unquote(std::string s) {
  s = channel::detail::trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace detail

inline ScenarioConfig parse_config_text(const std::string& text,
                                        const std::string& origin) {
  struct Entry {
    int lineno;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = channel::detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    entries.push_back({lineno, channel::detail::trim(line.substr(0, eq)),
                       detail::unquote(line.substr(eq + 1))});
  }

  ScenarioConfig cfg;
  bool have_preset = false;
  for (const Entry& e : entries) {
    if (e.key != "preset") continue;
    if (have_preset)
      throw std::runtime_error(origin + ":" + std::to_string(e.lineno) +
                               ": duplicate preset key");
    try {
      cfg = preset(e.value);
    } catch (const std::invalid_argument& ex) {
      throw std::runtime_error(origin + ":" + std::to_string(e.lineno) + ": " +
                               ex.what());
    }
    have_preset = true;
  }

  for (const Entry& e : entries) {
    if (e.key == "preset") continue;
    const std::string where = origin + ":" + std::to_string(e.lineno);
    auto num = [&]() { return channel::detail::parse_number(e.value, where); };
    auto integer = [&]() {
      const double d = channel::detail::parse_number(e.value, where);
      return static_cast<long long>(d);
    };
    try {
      if (e.key == "mode") cfg.mode = mode_from_name(e.value);
      else if (e.key == "name") cfg.name = e.value;
      else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(integer());
      else if (e.key == "drops") cfg.drops = static_cast<int>(integer());
      else if (e.key == "deployment.isd_m") cfg.isd_m = num();
      else if (e.key == "deployment.area_m2") cfg.area_m2 = num();
      else if (e.key == "deployment.bs_height_m") cfg.bs_height_m = num();
      else if (e.key == "deployment.orbit_altitude_m") cfg.orbit_altitude_m = num();
      else if (e.key == "deployment.elevation_deg") cfg.elevation_deg = num();
      else if (e.key == "deployment.hpbw_deg") cfg.hpbw_deg = num();
      else if (e.key == "deployment.frf") cfg.frf = static_cast<int>(integer());
      else if (e.key == "deployment.track_azimuth_deg") cfg.track_azimuth_deg = num();
      else if (e.key == "traffic.users_per_cell") cfg.traffic.users_per_cell = num();
      else if (e.key == "traffic.uav_ratio") cfg.traffic.uav_ratio = num();
      else if (e.key == "traffic.indoor_fraction") cfg.traffic.indoor_fraction = num();
      else if (e.key == "traffic.uav_height_m") cfg.traffic.uav_height_m = num();
      else if (e.key == "spectrum.fc_ghz") cfg.consts.fc_ghz = num();
      else if (e.key == "spectrum.tn_bw_dl_hz") cfg.radio.tn_bw_dl_hz = num();
      else if (e.key == "spectrum.tn_bw_ul_hz") cfg.radio.tn_bw_ul_hz = num();
      else if (e.key == "spectrum.ntn_bw_hz") cfg.radio.ntn_bw_total_hz = num();
      else if (e.key == "spectrum.prb_bw_hz") cfg.radio.prb_bw_hz = num();
      else if (e.key == "power.tn_dl_dbm") cfg.radio.tn_dl_power_dbm = num();
      else if (e.key == "power.ntn_eirp_dbw_mhz") cfg.radio.ntn_eirp_density_dbw_mhz = num();
      else if (e.key == "power.ntn_beam_gain_dbi") cfg.radio.ntn_beam_gain_dbi = num();
      else if (e.key == "power.ul_p0_dbm") cfg.radio.ul_p0_dbm = num();
      else if (e.key == "power.ul_alpha") cfg.radio.ul_alpha = num();
      else if (e.key == "power.ul_pmax_dbm") cfg.radio.ul_pmax_dbm = num();
      else if (e.key == "noise.density_dbm_hz") cfg.radio.noise_density_dbm_hz = num();
      else if (e.key == "noise.nf_bs_db") cfg.radio.nf_bs_db = num();
      else if (e.key == "noise.nf_ue_db") cfg.radio.nf_ue_db = num();
      else if (e.key == "noise.ntn_g_over_t_db_k") cfg.radio.ntn_g_over_t_db_k = num();
      else if (e.key == "relief.threshold_db") cfg.relief_threshold_db = num();
      else if (e.key == "partition.target_bps") cfg.partition_target_bps = num();
      else if (e.key == "outage.threshold_db") cfg.outage_threshold_db = num();
      else if (e.key == "fading.draws") cfg.fading_draws = static_cast<int>(integer());
      else if (e.key == "channel_constants")
        cfg.consts = channel::load_channel_constants(e.value);
      else
        throw std::runtime_error(where + ": unknown key '" + e.key + "'");
    } catch (const std::invalid_argument& ex) {
      throw std::runtime_error(where + ": " + ex.what());
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw std::runtime_error(origin + ": " + ex.what());
  }
  return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Echo

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace detail

// Stable key/value view of a config; parsing it back reproduces the run.
inline std::vector<std::pair<std::string, std::string>> flatten(
    const ScenarioConfig& c) {
  using detail::fmt;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("name", c.name);
  kv.emplace_back("mode", mode_name(c.mode));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("drops", std::to_string(c.drops));
  kv.emplace_back("deployment.isd_m", fmt(c.isd_m));
  kv.emplace_back("deployment.area_m2", fmt(c.area_m2));
  kv.emplace_back("deployment.bs_height_m", fmt(c.bs_height_m));
  kv.emplace_back("deployment.orbit_altitude_m", fmt(c.orbit_altitude_m));
  kv.emplace_back("deployment.elevation_deg", fmt(c.elevation_deg));
  kv.emplace_back("deployment.hpbw_deg", fmt(c.hpbw_deg));
  kv.emplace_back("deployment.frf", std::to_string(c.frf));
  kv.emplace_back("deployment.track_azimuth_deg", fmt(c.track_azimuth_deg));
  kv.emplace_back("traffic.users_per_cell", fmt(c.traffic.users_per_cell));
  kv.emplace_back("traffic.uav_ratio", fmt(c.traffic.uav_ratio));
  kv.emplace_back("traffic.indoor_fraction", fmt(c.traffic.indoor_fraction));
  kv.emplace_back("traffic.uav_height_m", fmt(c.traffic.uav_height_m));
  kv.emplace_back("spectrum.fc_ghz", fmt(c.consts.fc_ghz));
  kv.emplace_back("spectrum.tn_bw_dl_hz", fmt(c.radio.tn_bw_dl_hz));
  kv.emplace_back("spectrum.tn_bw_ul_hz", fmt(c.radio.tn_bw_ul_hz));
  kv.emplace_back("spectrum.ntn_bw_hz", fmt(c.radio.ntn_bw_total_hz));
  kv.emplace_back("spectrum.prb_bw_hz", fmt(c.radio.prb_bw_hz));
  kv.emplace_back("power.tn_dl_dbm", fmt(c.radio.tn_dl_power_dbm));
  kv.emplace_back("power.ntn_eirp_dbw_mhz", fmt(c.radio.ntn_eirp_density_dbw_mhz));
  kv.emplace_back("power.ntn_beam_gain_dbi", fmt(c.radio.ntn_beam_gain_dbi));
  kv.emplace_back("power.ul_p0_dbm", fmt(c.radio.ul_p0_dbm));
  kv.emplace_back("power.ul_alpha", fmt(c.radio.ul_alpha));
  kv.emplace_back("power.ul_pmax_dbm", fmt(c.radio.ul_pmax_dbm));
  kv.emplace_back("noise.density_dbm_hz", fmt(c.radio.noise_density_dbm_hz));
  kv.emplace_back("noise.nf_bs_db", fmt(c.radio.nf_bs_db));
  kv.emplace_back("noise.nf_ue_db", fmt(c.radio.nf_ue_db));
  kv.emplace_back("noise.ntn_g_over_t_db_k", fmt(c.radio.ntn_g_over_t_db_k));
  kv.emplace_back("relief.threshold_db", fmt(c.relief_threshold_db));
  kv.emplace_back("partition.target_bps", fmt(c.partition_target_bps));
  kv.emplace_back("outage.threshold_db", fmt(c.outage_threshold_db));
  kv.emplace_back("fading.draws", std::to_string(c.fading_draws));
  return kv;
}

}  // namespace ntnsim::config
