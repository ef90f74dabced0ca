#pragma once

// Radio procedures: association, fractional uplink power control, round
// robin scheduling, per-PRB SINR, achievable rate, and the two terrestrial
// baseline mechanisms (interference relief, UL resource partitioning).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ntnsim/math.hpp"

namespace ntnsim::radio {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

struct RadioParams {
  // terrestrial
  double tn_dl_power_dbm = 46.0;  // per cell, spread over the DL band
  double tn_bw_dl_hz = 10e6;
  double tn_bw_ul_hz = 10e6;
  double prb_bw_hz = 360e3;
  double noise_density_dbm_hz = -174.0;
  double nf_bs_db = 7.0;
  double nf_ue_db = 9.0;
  // fractional UL power control
  double ul_p0_dbm = -85.0;
  double ul_alpha = 0.8;
  double ul_pmax_dbm = 23.0;
  // satellite
  double ntn_eirp_density_dbw_mhz = 34.0;
  double ntn_beam_gain_dbi = 30.0;  // reflector peak, tx and rx
  double ntn_g_over_t_db_k = 1.1;
  double ntn_bw_total_hz = 30e6;  // per direction, split across bands by FRF

  void validate() const {
    if (!(ul_alpha >= 0.0 && ul_alpha <= 1.0))
      throw std::invalid_argument("ul_alpha must be in [0, 1], got " +
                                  std::to_string(ul_alpha));
    for (auto [v, name] : {std::pair{tn_bw_dl_hz, "tn_bw_dl_hz"},
                           {tn_bw_ul_hz, "tn_bw_ul_hz"},
                           {prb_bw_hz, "prb_bw_hz"},
                           {ntn_bw_total_hz, "ntn_bw_total_hz"}})
      if (!(v > 0.0))
        throw std::invalid_argument(std::string(name) +
                                    " must be positive, got " +
                                    std::to_string(v));
    if (prb_bw_hz > tn_bw_ul_hz)
      throw std::invalid_argument("prb_bw_hz exceeds tn_bw_ul_hz");
  }
};

// ---------------------------------------------------------------------------
// Power and noise

// Fractional power control: compensate a fraction alpha of the large-scale
// loss, capped at the power budget.
inline double ul_power_dbm(double serving_gain_db, const RadioParams& p) {
  return std::min(p.ul_pmax_dbm, p.ul_p0_dbm - p.ul_alpha * serving_gain_db);
}

inline double thermal_noise_dbm(double bw_hz, double nf_db,
                                double density_dbm_hz = -174.0) {
  return density_dbm_hz + 10.0 * std::log10(bw_hz) + nf_db;
}

// Satellite UL receiver noise from the G/T figure of merit: the system
// noise temperature is T = 10^((G_rx - G/T)/10).
inline double ntn_ul_noise_dbm(double bw_hz, const RadioParams& p) {
  const double t_sys = std::pow(10.0, (p.ntn_beam_gain_dbi - p.ntn_g_over_t_db_k) / 10.0);
  return mw_to_dbm(kBoltzmann * t_sys * bw_hz * 1e3);
}

// Per-beam transmit power (before antenna gain) from the EIRP density over
// the occupied band.
inline double ntn_dl_tx_power_dbm(double band_hz, const RadioParams& p) {
  if (!(band_hz > 0.0))
    throw std::invalid_argument("band_hz must be positive");
  const double eirp_dbw = p.ntn_eirp_density_dbw_mhz + 10.0 * std::log10(band_hz / 1e6);
  return eirp_dbw + 30.0 - p.ntn_beam_gain_dbi;
}

// ---------------------------------------------------------------------------
// Association

// serving[u] = argmax over cells of tx_power * gain (RSRP); ties go to the
// lowest cell index.  `gain(c, u)` returns the linear large-scale gain.
template <class GainFn>
std::vector<int> associate(std::size_t n_users,
                           const std::vector<double>& tx_power_mw,
                           GainFn&& gain) {
  if (tx_power_mw.empty())
    throw std::invalid_argument("associate: no cells to associate with");
  std::vector<int> serving(n_users, 0);
  for (std::size_t u = 0; u < n_users; ++u) {
    double best = -1.0;
    int arg = 0;
    for (std::size_t c = 0; c < tx_power_mw.size(); ++c) {
      const double rsrp = tx_power_mw[c] * gain(c, u);
      if (rsrp > best) {
        best = rsrp;
        arg = static_cast<int>(c);
      }
    }
    serving[u] = arg;
  }
  return serving;
}

// ---------------------------------------------------------------------------
// Scheduling

// Round robin over the users of one cell.  DL: every associated user gets
// the whole band for a 1/|U| time share.  UL: users take one PRB each,
// min(floor(B/B_prb), |U|) at a time.
struct CellSchedule {
  std::vector<int> users;  // randomized round-robin order

  double dl_eta() const {
    return users.empty() ? 0.0 : 1.0 / static_cast<double>(users.size());
  }
  int n_ul(double bw_ul_hz, double prb_bw_hz) const {
    const auto prbs = static_cast<std::size_t>(std::floor(bw_ul_hz / prb_bw_hz));
    return static_cast<int>(std::min(prbs, users.size()));
  }
  double ul_eta(double bw_ul_hz, double prb_bw_hz) const {
    if (users.empty()) return 0.0;
    return static_cast<double>(n_ul(bw_ul_hz, prb_bw_hz)) /
           static_cast<double>(users.size());
  }
};

// ---------------------------------------------------------------------------
// SINR and rate

inline double sinr_linear(double signal_mw, double interference_mw,
                          double noise_mw) {
  if (!(noise_mw > 0.0))
    throw std::invalid_argument("sinr_linear: noise must be positive");
  if (interference_mw < 0.0)
    throw std::invalid_argument("sinr_linear: negative interference");
  return signal_mw / (interference_mw + noise_mw);
}

inline double rate_bps(double eta, double bw_hz,
                       double mean_log2_one_plus_sinr) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("rate_bps: eta must be in [0, 1], got " +
                                std::to_string(eta));
  if (!(bw_hz > 0.0))
    throw std::invalid_argument("rate_bps: bw_hz must be positive");
  return eta * bw_hz * mean_log2_one_plus_sinr;
}

// ---------------------------------------------------------------------------
// Terrestrial baselines

struct ReliefResult {
  std::vector<int> muted;  // interferer ids, in muting order
  double sinr;             // linear, after muting
};

// Greedily silences the strongest interferers until the victim's SINR
// clears the threshold.  May mute everything.
inline ReliefResult tn_interference_relief(
    double signal_mw, std::vector<std::pair<int, double>> interferers,
    double noise_mw, double threshold_db = -5.0) {
  std::sort(interferers.begin(), interferers.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  double itotal = 0.0;
  for (const auto& [id, p] : interferers) itotal += p;

  const double threshold = db_to_lin(threshold_db);
  ReliefResult out;
  out.sinr = sinr_linear(signal_mw, itotal, noise_mw);
  for (const auto& [id, p] : interferers) {
    if (out.sinr >= threshold) break;
    itotal = std::max(0.0, itotal - p);
    out.muted.push_back(id);
    out.sinr = sinr_linear(signal_mw, itotal, noise_mw);
  }
  return out;
}

struct PartitionResult {
  double reserved_fraction = 0.0;  // of the cell's UL resources, for UAVs
  bool saturated = false;          // target infeasible within the band
};

// Minimal share of a cell's UL resources reserved for its UAVs so each one
// sustains the target rate; rates are linear in the assigned share at fixed
// per-PRB SINR.
inline PartitionResult ul_resource_partition(
    const std::vector<double>& uav_fullband_rate_bps, double target_bps) {
  if (!(target_bps > 0.0))
    throw std::invalid_argument("ul_resource_partition: target must be positive");
  PartitionResult out;
  for (double r : uav_fullband_rate_bps) {
    if (r <= 0.0) {
      out.saturated = true;
      out.reserved_fraction = 1.0;
      return out;
    }
    out.reserved_fraction += target_bps / r;
  }
  if (out.reserved_fraction > 1.0) {
    out.reserved_fraction = 1.0;
    out.saturated = true;
  }
  return out;
}

}  // namespace ntnsim::radio
