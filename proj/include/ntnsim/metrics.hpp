#pragma once

// Campaign statistics: per population/direction sample pools and the
// summary scalars computed from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntnsim/math.hpp"

namespace ntnsim::metrics {

struct SamplePool {
  std::vector<double> sinr_db;
  std::vector<double> rate_bps;

  void merge(const SamplePool& o) {
    sinr_db.insert(sinr_db.end(), o.sinr_db.begin(), o.sinr_db.end());
    rate_bps.insert(rate_bps.end(), o.rate_bps.begin(), o.rate_bps.end());
  }
  void sort() {
    std::sort(sinr_db.begin(), sinr_db.end());
    std::sort(rate_bps.begin(), rate_bps.end());
  }
};

struct Summary {
  SamplePool gue_dl, gue_ul, uav_dl, uav_ul;

  // interference relief (per relieved UAV)
  std::vector<double> relief_muted_counts;
  std::vector<double> relief_sinr_db;  // post-relief, every TN UAV

  // UL resource partition (per cell holding UAVs)
  std::vector<double> partition_reserved_fraction;
  std::size_t partition_saturated_cells = 0;

  std::size_t n_drops = 0;
  std::size_t n_cells = 0;
  std::size_t n_users = 0;
  std::size_t n_uavs = 0;

  void merge(const Summary& o) {
    gue_dl.merge(o.gue_dl);
    gue_ul.merge(o.gue_ul);
    uav_dl.merge(o.uav_dl);
    uav_ul.merge(o.uav_ul);
    relief_muted_counts.insert(relief_muted_counts.end(),
                               o.relief_muted_counts.begin(),
                               o.relief_muted_counts.end());
    relief_sinr_db.insert(relief_sinr_db.end(), o.relief_sinr_db.begin(),
                          o.relief_sinr_db.end());
    partition_reserved_fraction.insert(partition_reserved_fraction.end(),
                                       o.partition_reserved_fraction.begin(),
                                       o.partition_reserved_fraction.end());
    partition_saturated_cells += o.partition_saturated_cells;
    n_drops += o.n_drops;
    n_cells = std::max(n_cells, o.n_cells);
    n_users += o.n_users;
    n_uavs += o.n_uavs;
  }

  void sort_pools() {
    gue_dl.sort();
    gue_ul.sort();
    uav_dl.sort();
    uav_ul.sort();
    std::sort(relief_muted_counts.begin(), relief_muted_counts.end());
    std::sort(relief_sinr_db.begin(), relief_sinr_db.end());
    std::sort(partition_reserved_fraction.begin(),
              partition_reserved_fraction.end());
  }
};

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Fraction of samples strictly below the threshold.
inline double outage(const std::vector<double>& sinr_db,
                     double threshold_db = -5.0) {
  if (sinr_db.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t below = 0;
  for (double s : sinr_db)
    if (s < threshold_db) ++below;
  return static_cast<double>(below) / static_cast<double>(sinr_db.size());
}

// Nearest-rank percentile on a sorted ascending array.
inline double percentile(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(pct >= 0.0 && pct <= 100.0))
    throw std::invalid_argument("percentile must be in [0, 100], got " +
                                std::to_string(pct));
  if (pct == 0.0) return sorted.front();
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  return sorted[std::min(rank, sorted.size()) - 1];
}

inline double median(const std::vector<double>& sorted) {
  return percentile(sorted, 50.0);
}

// Two-sample Kolmogorov distance, inputs sorted ascending.
inline double ks_distance(const std::vector<double>& a,
                          const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample set");
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace ntnsim::metrics
