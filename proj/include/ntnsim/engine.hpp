#pragma once

// Drop engine: builds the deployment once, then runs Monte Carlo drops.
// Every random quantity is drawn from a keyed stream derived from
// (master seed, drop index, role, entity indices), so any drop is
// reproducible in isolation and campaigns are independent of the worker
// count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ntnsim/antenna.hpp"
#include "ntnsim/channel.hpp"
#include "ntnsim/config.hpp"
#include "ntnsim/geometry.hpp"
#include "ntnsim/math.hpp"
#include "ntnsim/metrics.hpp"
#include "ntnsim/radio.hpp"
#include "ntnsim/rng.hpp"

namespace ntnsim::engine {

namespace role {
inline constexpr std::uint64_t users = 1;
inline constexpr std::uint64_t o2i = 2;
inline constexpr std::uint64_t tn_link = 3;
inline constexpr std::uint64_t ntn_link = 4;
inline constexpr std::uint64_t sched = 5;
inline constexpr std::uint64_t ul_align = 6;
inline constexpr std::uint64_t fading_dl = 7;
inline constexpr std::uint64_t fading_ul = 8;
}  // namespace role

// Interferers beyond this many strongest terms enter Eq. 6's fading average
// through their mean power (unit-mean fading), which is exact for them in
// expectation and keeps the per-drop cost bounded.
inline constexpr int kMaxFadedInterferers = 24;

struct Context {
  config::ScenarioConfig cfg;
  geometry::EarthModel earth;
  geometry::TnLayout layout;
  geometry::BeamGrid grid;
  antenna::SectorPattern sector;
  antenna::ReflectorPattern refl;

  double tn_dl_power_mw = 0;
  double ntn_dl_power_mw = 0;  // per beam over its occupied band
  double ul_pmax_mw = 0;
  double tn_dl_noise_mw = 0;   // UE receiver over the TN DL band
  double ntn_dl_noise_mw = 0;  // UE receiver over the beam band
  double tn_ul_noise_mw = 0;   // BS receiver per PRB
  double ntn_ul_noise_mw = 0;  // satellite receiver per PRB, from G/T

  explicit Context(config::ScenarioConfig c) : cfg(std::move(c)) {
    cfg.validate();
    earth.orbit_altitude_m = cfg.orbit_altitude_m;
    layout = geometry::build_tn_layout(cfg.isd_m, cfg.area_m2, cfg.bs_height_m);
    grid = geometry::build_beam_grid(cfg.elevation_deg, cfg.hpbw_deg, cfg.frf,
                                     earth, cfg.track_azimuth_deg);
    refl = antenna::ReflectorPattern(cfg.radio.ntn_beam_gain_dbi, cfg.hpbw_deg);

    const auto& r = cfg.radio;
    tn_dl_power_mw = dbm_to_mw(r.tn_dl_power_dbm);
    ntn_dl_power_mw = dbm_to_mw(radio::ntn_dl_tx_power_dbm(cfg.ntn_beam_bw_hz(), r));
    ul_pmax_mw = dbm_to_mw(r.ul_pmax_dbm);
    tn_dl_noise_mw = dbm_to_mw(
        radio::thermal_noise_dbm(r.tn_bw_dl_hz, r.nf_ue_db, r.noise_density_dbm_hz));
    ntn_dl_noise_mw = dbm_to_mw(radio::thermal_noise_dbm(
        cfg.ntn_beam_bw_hz(), r.nf_ue_db, r.noise_density_dbm_hz));
    tn_ul_noise_mw = dbm_to_mw(
        radio::thermal_noise_dbm(r.prb_bw_hz, r.nf_bs_db, r.noise_density_dbm_hz));
    ntn_ul_noise_mw = dbm_to_mw(radio::ntn_ul_noise_dbm(r.prb_bw_hz, r));
  }
};

// Per-user trace of one drop, filled on request; meant for small test
// configurations (it copies the gain matrix).
struct DropDebug {
  std::vector<geometry::User> users;
  std::vector<double> tn_gain;   // [cell * n_users + user], linear
  std::vector<double> ntn_gain;  // [beam * n_users + user], linear
  std::vector<int> serving;
  std::vector<char> on_ntn;
  std::vector<double> ul_power_mw;
  std::vector<std::vector<int>> cell_users, beam_users;
  // drawn UL interferers per victim: (cell or beam, user), ordered by source
  std::vector<std::vector<std::pair<int, int>>> ul_draws;
  std::vector<double> dl_sinr, ul_sinr;  // linear, large-scale
  std::vector<double> dl_rate_bps, ul_rate_bps;
};

namespace detail {

// E[log2(1 + SINR)] over small-scale fading.  `interf` holds
// (mean power, fades) pairs; the strongest kMaxFadedInterferers fading
// terms are redrawn per realization, the rest contribute their mean.
inline double mean_log2_sinr(double signal_mw, bool signal_fades,
                             std::vector<std::pair<double, bool>>& interf,
                             double noise_mw, int draws, Stream& fs) {
  double const_mw = 0.0;
  std::vector<double> faded;
  faded.reserve(interf.size());
  for (const auto& [p, fades] : interf) (fades ? faded.push_back(p) : void(const_mw += p));

  if (faded.size() > static_cast<std::size_t>(kMaxFadedInterferers)) {
    std::nth_element(faded.begin(), faded.begin() + kMaxFadedInterferers,
                     faded.end(), std::greater<>());
    for (std::size_t i = kMaxFadedInterferers; i < faded.size(); ++i)
      const_mw += faded[i];  // unit-mean tail
    faded.resize(kMaxFadedInterferers);
  }

  if (!signal_fades && faded.empty())
    return std::log2(1.0 + signal_mw / (const_mw + noise_mw));

  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double hs = signal_fades ? fs.exponential() : 1.0;
    double denom = const_mw + noise_mw;
    for (double p : faded) denom += p * fs.exponential();
    acc += std::log2(1.0 + signal_mw * hs / denom);
  }
  return acc / static_cast<double>(draws);
}

inline std::size_t pick_index(std::uint64_t key, std::size_t size) {
  return static_cast<std::size_t>(uniform_at(key) * static_cast<double>(size));
}

}  // namespace detail

inline metrics::Summary run_drop(const Context& ctx, int drop,
                                 DropDebug* dbg = nullptr) {
  const auto& cfg = ctx.cfg;
  const auto& layout = ctx.layout;
  const std::size_t n_cells = layout.cells.size();
  const bool offload = cfg.mode == config::Mode::offload;
  const bool relief = cfg.mode == config::Mode::relief;
  const bool partition = cfg.mode == config::Mode::partition;

  metrics::Summary sum;
  sum.n_drops = 1;
  sum.n_cells = n_cells;

  // -- users ----------------------------------------------------------------
  Stream user_stream(derive(cfg.seed, static_cast<std::uint64_t>(drop), role::users));
  const std::vector<geometry::User> users =
      geometry::drop_users(layout, cfg.traffic, user_stream);
  const std::size_t n = users.size();
  sum.n_users = n;
  for (const auto& u : users)
    if (u.kind == geometry::UserKind::uav) ++sum.n_uavs;
  if (n == 0) return sum;

  // -- building entry, one draw per indoor user ------------------------------
  Stream o2i_stream(derive(cfg.seed, static_cast<std::uint64_t>(drop), role::o2i));
  std::vector<double> o2i_db(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    if (!users[u].indoor) continue;
    const double depth = o2i_stream.uniform() * cfg.consts.o2i_depth_max_m;
    const double z = o2i_stream.gauss();
    o2i_db[u] = channel::o2i_entry_loss_db(cfg.consts, depth, z);
  }

  // -- terrestrial gain matrix ------------------------------------------------
  // LoS state and shadowing are drawn per (site, user); the three sectors of
  // a site share the propagation path and differ by antenna response only.
  std::vector<double> tn_gain(n_cells * n);
  const std::uint64_t link_root =
      derive(cfg.seed, static_cast<std::uint64_t>(drop), role::tn_link);
  {
    std::vector<double> base_db(n);
    for (std::size_t s = 0; s < layout.sites.size(); ++s) {
      const Vec3 bs = layout.sites[s];
      for (std::size_t u = 0; u < n; ++u) {
        const auto& usr = users[u];
        const double d2d = std::hypot(usr.pos.x - bs.x, usr.pos.y - bs.y);
        const bool aerial = usr.kind == geometry::UserKind::uav;
        const std::uint64_t key = derive(link_root, s, u);
        const double p_los =
            aerial ? channel::aerial_los_probability(d2d, usr.pos.z)
                   : channel::uma_los_probability(d2d, usr.pos.z);
        const auto los = uniform_at(derive(key, 1)) < p_los
                             ? channel::Los::los
                             : channel::Los::nlos;
        const double pl =
            aerial ? channel::aerial_path_loss_db(d2d, bs.z, usr.pos.z, los,
                                                  cfg.consts.fc_ghz)
                   : channel::uma_path_loss_db(d2d, bs.z, usr.pos.z, los,
                                               cfg.consts.fc_ghz);
        const double sigma =
            channel::tn_shadow_sigma_db(aerial, usr.pos.z, los, cfg.consts);
        base_db[u] = -pl + sigma * gauss_at(derive(key, 2)) - o2i_db[u];
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t c = 3 * s + k;
        const double az = layout.cells[c].azimuth_deg;
        double* row = tn_gain.data() + c * n;
        for (std::size_t u = 0; u < n; ++u)
          row[u] = db_to_lin(
              antenna::sector_gain_dbi(ctx.sector, bs, az, users[u].pos) +
              base_db[u]);
      }
    }
  }

  // -- satellite gains (offload only, UAVs only) ------------------------------
  // One LoS state and one shadowing draw per (satellite, user), common to
  // the seven beams of the same satellite.
  std::vector<double> ntn_gain;
  if (offload) {
    ntn_gain.assign(7 * n, 0.0);
    const std::uint64_t sat_root =
        derive(cfg.seed, static_cast<std::uint64_t>(drop), role::ntn_link);
    for (std::size_t u = 0; u < n; ++u) {
      if (users[u].kind != geometry::UserKind::uav) continue;
      const double elev = geometry::elevation_deg_at(ctx.grid, users[u].pos, ctx.earth);
      const double slant = norm(ctx.grid.sat_pos - users[u].pos);
      const std::uint64_t key = derive(sat_root, u);
      const auto los =
          uniform_at(derive(key, 1)) < channel::ntn_los_probability(elev, cfg.consts)
              ? channel::Los::los
              : channel::Los::nlos;
      const double pl = channel::ntn_path_loss_db(slant, elev, los, cfg.consts);
      const double shadow = channel::ntn_shadow_sigma_db(los, cfg.consts) *
                            gauss_at(derive(key, 2));
      for (int b = 0; b < 7; ++b) {
        const double ant =
            ctx.refl.gain_dbi(geometry::off_boresight_angle_deg(ctx.grid, b, users[u].pos));
        ntn_gain[static_cast<std::size_t>(b) * n + u] = db_to_lin(ant - pl + shadow);
      }
    }
  }

  // -- association -------------------------------------------------------------
  // Best TN cell by RSRP for everyone; offloaded UAVs take the best beam.
  std::vector<int> serving(n, 0);
  std::vector<char> on_ntn(n, 0);
  {
    std::vector<double> best(n, -1.0);
    for (std::size_t c = 0; c < n_cells; ++c) {
      const double* row = tn_gain.data() + c * n;
      for (std::size_t u = 0; u < n; ++u) {
        if (row[u] > best[u]) {
          best[u] = row[u];
          serving[u] = static_cast<int>(c);
        }
      }
    }
    if (offload) {
      for (std::size_t u = 0; u < n; ++u) {
        if (users[u].kind != geometry::UserKind::uav) continue;
        double best_b = -1.0;
        int arg = 0;
        for (int b = 0; b < 7; ++b) {
          const double g = ntn_gain[static_cast<std::size_t>(b) * n + u];
          if (g > best_b) {
            best_b = g;
            arg = b;
          }
        }
        serving[u] = arg;
        on_ntn[u] = 1;
      }
    }
  }

  // -- schedules ----------------------------------------------------------------
  std::vector<std::vector<int>> cell_users(n_cells), beam_users(7);
  for (std::size_t u = 0; u < n; ++u)
    (on_ntn[u] ? beam_users[static_cast<std::size_t>(serving[u])]
               : cell_users[static_cast<std::size_t>(serving[u])])
        .push_back(static_cast<int>(u));
  {
    Stream shuffle_stream(derive(cfg.seed, static_cast<std::uint64_t>(drop), role::sched));
    auto shuffle = [&](std::vector<int>& v) {
      for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[shuffle_stream.uniform_int(i)]);
    };
    for (auto& v : cell_users) shuffle(v);
    for (auto& v : beam_users) shuffle(v);
  }

  // Partition mode schedules GUEs and UAVs of a cell on disjoint resources.
  std::vector<std::vector<int>> cell_gues, cell_uavs;
  if (partition) {
    cell_gues.assign(n_cells, {});
    cell_uavs.assign(n_cells, {});
    for (std::size_t c = 0; c < n_cells; ++c)
      for (int u : cell_users[c])
        (users[static_cast<std::size_t>(u)].kind == geometry::UserKind::uav
             ? cell_uavs[c]
             : cell_gues[c])
            .push_back(u);
  }

  // -- uplink transmit power -------------------------------------------------
  std::vector<double> ul_power_mw(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (on_ntn[u]) {
      ul_power_mw[u] = ctx.ul_pmax_mw;
    } else {
      const double g_db =
          lin_to_db(tn_gain[static_cast<std::size_t>(serving[u]) * n + u]);
      ul_power_mw[u] = dbm_to_mw(radio::ul_power_dbm(g_db, cfg.radio));
    }
  }

  if (dbg) {
    dbg->users = users;
    dbg->tn_gain = tn_gain;
    dbg->ntn_gain = ntn_gain;
    dbg->serving = serving;
    dbg->on_ntn = on_ntn;
    dbg->ul_power_mw = ul_power_mw;
    dbg->cell_users = cell_users;
    dbg->beam_users = beam_users;
    dbg->ul_draws.assign(n, {});
    dbg->dl_sinr.assign(n, 0.0);
    dbg->ul_sinr.assign(n, 0.0);
    dbg->dl_rate_bps.assign(n, 0.0);
    dbg->ul_rate_bps.assign(n, 0.0);
  }

  const double outage_margin_lin = db_to_lin(cfg.relief_threshold_db);

  // -- downlink ----------------------------------------------------------------
  // Column sums and per-user strongest interferers come from one row sweep.
  std::vector<double> colsum(n, 0.0);
  const int top_k = kMaxFadedInterferers + 1;  // serving may rank inside
  std::vector<double> top_val(n * static_cast<std::size_t>(top_k), 0.0);
  std::vector<int> top_cell(n * static_cast<std::size_t>(top_k), -1);
  {
    for (std::size_t c = 0; c < n_cells; ++c) {
      const double* row = tn_gain.data() + c * n;
      for (std::size_t u = 0; u < n; ++u) {
        colsum[u] += row[u];
        double* tv = top_val.data() + u * static_cast<std::size_t>(top_k);
        int* tc = top_cell.data() + u * static_cast<std::size_t>(top_k);
        // replace the current minimum if this cell is stronger
        int arg_min = 0;
        for (int k = 1; k < top_k; ++k)
          if (tv[k] < tv[arg_min]) arg_min = k;
        if (row[u] > tv[arg_min]) {
          tv[arg_min] = row[u];
          tc[arg_min] = static_cast<int>(c);
        }
      }
    }
  }

  const std::uint64_t fade_dl_root =
      derive(cfg.seed, static_cast<std::uint64_t>(drop), role::fading_dl);
  std::vector<std::pair<double, bool>> interf;
  interf.reserve(n_cells);

  for (std::size_t u = 0; u < n; ++u) {
    const auto& usr = users[u];
    const bool is_uav = usr.kind == geometry::UserKind::uav;
    double sinr, eta, bw;

    if (on_ntn[u]) {
      const int b = serving[u];
      const double s = ctx.ntn_dl_power_mw * ntn_gain[static_cast<std::size_t>(b) * n + u];
      double i_mw = 0.0;
      for (int nb : geometry::co_band_beams(ctx.grid, b))
        i_mw += ctx.ntn_dl_power_mw * ntn_gain[static_cast<std::size_t>(nb) * n + u];
      sinr = radio::sinr_linear(s, i_mw, ctx.ntn_dl_noise_mw);
      const auto& peers = beam_users[static_cast<std::size_t>(b)];
      eta = 1.0 / static_cast<double>(peers.size());
      bw = cfg.ntn_beam_bw_hz();
    } else {
      const int t = serving[u];
      const double g_t = tn_gain[static_cast<std::size_t>(t) * n + u];
      const double s = ctx.tn_dl_power_mw * g_t;
      double i_mw = ctx.tn_dl_power_mw * (colsum[u] - g_t);
      if (i_mw < 0.0) i_mw = 0.0;
      sinr = radio::sinr_linear(s, i_mw, ctx.tn_dl_noise_mw);

      if (relief && is_uav) {
        if (sinr < outage_margin_lin) {
          std::vector<std::pair<int, double>> terms;
          terms.reserve(n_cells - 1);
          for (std::size_t c = 0; c < n_cells; ++c)
            if (static_cast<int>(c) != t)
              terms.emplace_back(static_cast<int>(c),
                                 ctx.tn_dl_power_mw * tn_gain[c * n + u]);
          const auto rr = radio::tn_interference_relief(
              s, std::move(terms), ctx.tn_dl_noise_mw, cfg.relief_threshold_db);
          sum.relief_muted_counts.push_back(static_cast<double>(rr.muted.size()));
          sinr = rr.sinr;
        }
        sum.relief_sinr_db.push_back(lin_to_db(sinr));
      }
      eta = 1.0 / static_cast<double>(
                      cell_users[static_cast<std::size_t>(t)].size());
      bw = cfg.radio.tn_bw_dl_hz;
    }

    // rate: TN links of ground users fade (Rayleigh); UAV and satellite
    // links are deterministic
    double rate;
    if (!on_ntn[u] && !is_uav) {
      const int t = serving[u];
      const double g_t = tn_gain[static_cast<std::size_t>(t) * n + u];
      interf.clear();
      const double* tv = top_val.data() + u * static_cast<std::size_t>(top_k);
      const int* tc = top_cell.data() + u * static_cast<std::size_t>(top_k);
      double top_sum = 0.0;
      for (int k = 0; k < top_k; ++k) {
        if (tc[k] < 0 || tc[k] == t) continue;
        interf.emplace_back(ctx.tn_dl_power_mw * tv[k], true);
        top_sum += tv[k];
      }
      // keep at most kMaxFadedInterferers faded terms
      if (interf.size() > static_cast<std::size_t>(kMaxFadedInterferers)) {
        std::sort(interf.begin(), interf.end(), std::greater<>());
        top_sum -= interf.back().first / ctx.tn_dl_power_mw;
        interf.pop_back();
      }
      const double tail = std::max(0.0, colsum[u] - g_t - top_sum);
      if (tail > 0.0) interf.emplace_back(ctx.tn_dl_power_mw * tail, false);
      Stream fs(derive(fade_dl_root, u));
      const double m = detail::mean_log2_sinr(ctx.tn_dl_power_mw * g_t, true,
                                              interf, ctx.tn_dl_noise_mw,
                                              cfg.fading_draws, fs);
      rate = radio::rate_bps(eta, bw, m);
    } else {
      rate = radio::rate_bps(eta, bw, std::log2(1.0 + sinr));
    }

    auto& pool = is_uav ? sum.uav_dl : sum.gue_dl;
    pool.sinr_db.push_back(lin_to_db(sinr));
    pool.rate_bps.push_back(rate);
    if (dbg) {
      dbg->dl_sinr[u] = sinr;
      dbg->dl_rate_bps[u] = rate;
    }
  }

  // -- uplink -------------------------------------------------------------------
  const std::uint64_t align_root =
      derive(cfg.seed, static_cast<std::uint64_t>(drop), role::ul_align);
  const std::uint64_t fade_ul_root =
      derive(cfg.seed, static_cast<std::uint64_t>(drop), role::fading_ul);

  // Partition pass: full-band UAV rates fix each cell's reserved share.
  std::vector<double> reserved(n_cells, 0.0);
  std::vector<double> demand(n_cells, 0.0);  // unclamped share sum
  std::vector<double> uav_fullband_sinr(partition ? n : 0, 0.0);
  if (partition) {
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (cell_uavs[c].empty()) continue;
      std::vector<double> fullband_rates;
      for (int ui : cell_uavs[c]) {
        const auto u = static_cast<std::size_t>(ui);
        double i_mw = 0.0;
        for (std::size_t oc = 0; oc < n_cells; ++oc) {
          if (oc == c || cell_uavs[oc].empty()) continue;
          const auto j = static_cast<std::size_t>(
              cell_uavs[oc][detail::pick_index(derive(align_root, u, oc),
                                               cell_uavs[oc].size())]);
          i_mw += ul_power_mw[j] * tn_gain[c * n + j];
          if (dbg)
            dbg->ul_draws[u].emplace_back(static_cast<int>(oc),
                                          static_cast<int>(j));
        }
        const double s = ul_power_mw[u] * tn_gain[c * n + u];
        const double sinr = radio::sinr_linear(s, i_mw, ctx.tn_ul_noise_mw);
        uav_fullband_sinr[u] = sinr;
        const double r = radio::rate_bps(1.0, cfg.radio.tn_bw_ul_hz,
                                         std::log2(1.0 + sinr));
        fullband_rates.push_back(r);
        demand[c] += r > 0.0 ? cfg.partition_target_bps / r
                             : std::numeric_limits<double>::infinity();
      }
      const auto pr =
          radio::ul_resource_partition(fullband_rates, cfg.partition_target_bps);
      reserved[c] = pr.reserved_fraction;
      sum.partition_reserved_fraction.push_back(pr.reserved_fraction);
      if (pr.saturated) ++sum.partition_saturated_cells;
    }
  }

  std::vector<std::pair<double, bool>> ul_interf;
  ul_interf.reserve(n_cells);
  for (std::size_t t = 0; t < n_cells; ++t) {
    const radio::CellSchedule cell_sched{cell_users[t]};
    const radio::CellSchedule gue_sched{partition ? cell_gues[t]
                                                  : std::vector<int>{}};
    for (int ui : cell_users[t]) {
      const auto u = static_cast<std::size_t>(ui);
      const auto& usr = users[u];
      const bool is_uav = usr.kind == geometry::UserKind::uav;
      const double* row = tn_gain.data() + t * n;
      double sinr, eta, rate;

      if (partition) {
        const double f = reserved[t];
        if (is_uav) {
          sinr = uav_fullband_sinr[u];
          // every UAV of the cell sustains the target unless saturated,
          // in which case the shortfall is shared proportionally
          rate = cfg.partition_target_bps / std::max(demand[t], 1.0);
        } else {
          double i_mw = 0.0;
          ul_interf.clear();
          for (std::size_t oc = 0; oc < n_cells; ++oc) {
            if (oc == t || cell_gues[oc].empty()) continue;
            const auto j = static_cast<std::size_t>(
                cell_gues[oc][detail::pick_index(derive(align_root, u, oc),
                                                 cell_gues[oc].size())]);
            const double p = ul_power_mw[j] * row[j];
            i_mw += p;
            ul_interf.emplace_back(p, true);
            if (dbg)
              dbg->ul_draws[u].emplace_back(static_cast<int>(oc),
                                            static_cast<int>(j));
          }
          const double s = ul_power_mw[u] * row[u];
          sinr = radio::sinr_linear(s, i_mw, ctx.tn_ul_noise_mw);
          eta = (1.0 - f) *
                gue_sched.ul_eta(cfg.radio.tn_bw_ul_hz, cfg.radio.prb_bw_hz);
          Stream fs(derive(fade_ul_root, u));
          const double m = detail::mean_log2_sinr(s, true, ul_interf,
                                                  ctx.tn_ul_noise_mw,
                                                  cfg.fading_draws, fs);
          rate = radio::rate_bps(eta, cfg.radio.prb_bw_hz, m);
        }
      } else {
        double i_mw = 0.0;
        ul_interf.clear();
        for (std::size_t oc = 0; oc < n_cells; ++oc) {
          if (oc == t || cell_users[oc].empty()) continue;
          const auto j = static_cast<std::size_t>(
              cell_users[oc][detail::pick_index(derive(align_root, u, oc),
                                                cell_users[oc].size())]);
          const double p = ul_power_mw[j] * row[j];
          i_mw += p;
          ul_interf.emplace_back(
              p, users[j].kind == geometry::UserKind::gue);
          if (dbg)
            dbg->ul_draws[u].emplace_back(static_cast<int>(oc),
                                          static_cast<int>(j));
        }
        const double s = ul_power_mw[u] * row[u];
        sinr = radio::sinr_linear(s, i_mw, ctx.tn_ul_noise_mw);
        eta = cell_sched.ul_eta(cfg.radio.tn_bw_ul_hz, cfg.radio.prb_bw_hz);
        const bool any_fading =
            !is_uav || std::any_of(ul_interf.begin(), ul_interf.end(),
                                   [](const auto& x) { return x.second; });
        if (any_fading) {
          Stream fs(derive(fade_ul_root, u));
          const double m = detail::mean_log2_sinr(s, !is_uav, ul_interf,
                                                  ctx.tn_ul_noise_mw,
                                                  cfg.fading_draws, fs);
          rate = radio::rate_bps(eta, cfg.radio.prb_bw_hz, m);
        } else {
          rate = radio::rate_bps(eta, cfg.radio.prb_bw_hz,
                                 std::log2(1.0 + sinr));
        }
      }

      auto& pool = is_uav ? sum.uav_ul : sum.gue_ul;
      pool.sinr_db.push_back(lin_to_db(sinr));
      pool.rate_bps.push_back(rate);
      if (dbg) {
        dbg->ul_sinr[u] = sinr;
        dbg->ul_rate_bps[u] = rate;
      }
    }
  }

  // offloaded UAVs transmit at full power in the satellite band
  if (offload) {
    for (int b = 0; b < 7; ++b) {
      const double* row = ntn_gain.data() + static_cast<std::size_t>(b) * n;
      const radio::CellSchedule beam_sched{beam_users[static_cast<std::size_t>(b)]};
      for (int ui : beam_users[static_cast<std::size_t>(b)]) {
        const auto u = static_cast<std::size_t>(ui);
        double i_mw = 0.0;
        for (int nb : geometry::co_band_beams(ctx.grid, b)) {
          const auto& peers = beam_users[static_cast<std::size_t>(nb)];
          if (peers.empty()) continue;
          const auto j = static_cast<std::size_t>(
              peers[detail::pick_index(
                  derive(align_root, u, static_cast<std::uint64_t>(nb) + n_cells),
                  peers.size())]);
          i_mw += ul_power_mw[j] * row[j];
          if (dbg)
            dbg->ul_draws[u].emplace_back(nb, static_cast<int>(j));
        }
        const double s = ul_power_mw[u] * row[u];
        const double sinr = radio::sinr_linear(s, i_mw, ctx.ntn_ul_noise_mw);
        const double eta =
            beam_sched.ul_eta(cfg.ntn_beam_bw_hz(), cfg.radio.prb_bw_hz);
        const double rate =
            radio::rate_bps(eta, cfg.radio.prb_bw_hz, std::log2(1.0 + sinr));
        sum.uav_ul.sinr_db.push_back(lin_to_db(sinr));
        sum.uav_ul.rate_bps.push_back(rate);
        if (dbg) {
          dbg->ul_sinr[u] = sinr;
          dbg->ul_rate_bps[u] = rate;
        }
      }
    }
  }

  return sum;
}

// Runs all drops, optionally on several workers.  Results are merged in
// drop order, so the outcome does not depend on the worker count.
inline metrics::Summary run_campaign(const Context& ctx, int workers = 1) {
  const int drops = ctx.cfg.drops;
  std::vector<metrics::Summary> per_drop(static_cast<std::size_t>(drops));

  auto run_one = [&](int d) {
    try {
      per_drop[static_cast<std::size_t>(d)] = run_drop(ctx, d);
    } catch (const std::exception& e) {
      throw std::runtime_error("drop " + std::to_string(d) + ": " + e.what());
    }
  };

  if (workers <= 1) {
    for (int d = 0; d < drops; ++d) run_one(d);
  } else {
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (int d = next.fetch_add(1); d < drops; d = next.fetch_add(1)) {
        try {
          run_one(d);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(workers, drops);
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  metrics::Summary total;
  for (const auto& d : per_drop) total.merge(d);
  total.sort_pools();
  return total;
}

inline metrics::Summary run_campaign(const config::ScenarioConfig& cfg,
                                     int workers = 1) {
  return run_campaign(Context(cfg), workers);
}

}  // namespace ntnsim::engine
