#pragma once

// Result serialization: a JSON report with the config echo and summary
// statistics, a flat CSV of the same metrics, and an optional long-format
// CSV with every recorded sample.  Output is deterministic for a given
// summary; doubles survive a round trip bit-exactly.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ntnsim/config.hpp"
#include "ntnsim/metrics.hpp"

namespace ntnsim::results {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<double>& percentile_grid() {
  static const std::vector<double> grid = {1, 5, 10, 25, 50, 75, 90, 95, 99};
  return grid;
}

struct DistStats {
  double mean = 0.0;
  std::vector<std::pair<double, double>> percentiles;  // (pct, value)
};

struct PoolReport {
  std::size_t count = 0;
  double outage = 0.0;  // SINR below the configured threshold
  DistStats sinr_db;
  DistStats rate_bps;
};

struct ReliefReport {
  std::size_t victims = 0;       // aerial users below threshold before relief
  std::size_t population = 0;    // all aerial users considered
  double mean_muted = 0.0;
  double max_muted = 0.0;
  double min_sinr_db = 0.0;      // after relief
};

struct PartitionReport {
  std::size_t cells = 0;  // cells with aerial traffic
  std::size_t saturated = 0;
  double mean_reserved = 0.0;
  double max_reserved = 0.0;
};

struct Report {
  std::string version = kVersion;
  std::vector<std::pair<std::string, std::string>> config;
  std::size_t n_drops = 0, n_cells = 0, n_users = 0, n_uavs = 0;
  // keyed by (population, direction), e.g. ("gue", "dl")
  std::map<std::pair<std::string, std::string>, PoolReport> pools;
  std::optional<ReliefReport> relief;
  std::optional<PartitionReport> partition;
};

namespace detail {

inline DistStats dist_stats(const std::vector<double>& sorted) {
  DistStats d;
  d.mean = metrics::mean(sorted);
  for (double p : percentile_grid())
    d.percentiles.emplace_back(p, metrics::percentile(sorted, p));
  return d;
}

inline PoolReport pool_report(const metrics::SamplePool& pool,
                              double outage_threshold_db) {
  PoolReport r;
  r.count = pool.sinr_db.size();
  if (r.count == 0) return r;
  r.outage = metrics::outage(pool.sinr_db, outage_threshold_db);
  r.sinr_db = dist_stats(pool.sinr_db);
  r.rate_bps = dist_stats(pool.rate_bps);
  return r;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Report build_report(const config::ScenarioConfig& cfg,
                           const metrics::Summary& s) {
  Report r;
  r.config = config::flatten(cfg);
  r.n_drops = s.n_drops;
  r.n_cells = s.n_cells;
  r.n_users = s.n_users;
  r.n_uavs = s.n_uavs;
  r.pools[{"gue", "dl"}] = detail::pool_report(s.gue_dl, cfg.outage_threshold_db);
  r.pools[{"gue", "ul"}] = detail::pool_report(s.gue_ul, cfg.outage_threshold_db);
  r.pools[{"uav", "dl"}] = detail::pool_report(s.uav_dl, cfg.outage_threshold_db);
  r.pools[{"uav", "ul"}] = detail::pool_report(s.uav_ul, cfg.outage_threshold_db);
  if (!s.relief_sinr_db.empty()) {
    ReliefReport rr;
    rr.victims = s.relief_muted_counts.size();
    rr.population = s.relief_sinr_db.size();
    rr.mean_muted = s.relief_muted_counts.empty()
                        ? 0.0
                        : metrics::mean(s.relief_muted_counts);
    rr.max_muted = s.relief_muted_counts.empty()
                       ? 0.0
                       : *std::max_element(s.relief_muted_counts.begin(),
                                           s.relief_muted_counts.end());
    rr.min_sinr_db = *std::min_element(s.relief_sinr_db.begin(),
                                       s.relief_sinr_db.end());
    r.relief = rr;
  }
  if (!s.partition_reserved_fraction.empty()) {
    PartitionReport pr;
    pr.cells = s.partition_reserved_fraction.size();
    pr.saturated = s.partition_saturated_cells;
    pr.mean_reserved = metrics::mean(s.partition_reserved_fraction);
    pr.max_reserved = *std::max_element(s.partition_reserved_fraction.begin(),
                                        s.partition_reserved_fraction.end());
    r.partition = pr;
  }
  return r;
}

// -- JSON ---------------------------------------------------------------------

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["version"] = r.version;
  j["config"] = nlohmann::json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["run"] = {{"n_drops", r.n_drops},
              {"n_cells", r.n_cells},
              {"n_users", r.n_users},
              {"n_uavs", r.n_uavs}};

  auto dist = [](const DistStats& d) {
    nlohmann::json out;
    out["mean"] = d.mean;
    out["percentiles"] = nlohmann::json::object();
    for (const auto& [p, v] : d.percentiles)
      out["percentiles"][detail::fmt_double(p)] = v;
    return out;
  };

  j["populations"] = nlohmann::json::object();
  for (const auto& [key, pool] : r.pools) {
    nlohmann::json p;
    p["count"] = pool.count;
    if (pool.count > 0) {
      p["outage"] = pool.outage;
      p["sinr_db"] = dist(pool.sinr_db);
      p["rate_bps"] = dist(pool.rate_bps);
    }
    j["populations"][key.first][key.second] = std::move(p);
  }

  if (r.relief) {
    j["relief"] = {{"victims", r.relief->victims},
                   {"population", r.relief->population},
                   {"mean_muted", r.relief->mean_muted},
                   {"max_muted", r.relief->max_muted},
                   {"min_sinr_db", r.relief->min_sinr_db}};
  }
  if (r.partition) {
    j["partition"] = {{"cells", r.partition->cells},
                      {"saturated", r.partition->saturated},
                      {"mean_reserved", r.partition->mean_reserved},
                      {"max_reserved", r.partition->max_reserved}};
  }
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.version = j.at("version").get<std::string>();
  for (const auto& [k, v] : j.at("config").items())
    r.config.emplace_back(k, v.get<std::string>());
  r.n_drops = j.at("run").at("n_drops").get<std::size_t>();
  r.n_cells = j.at("run").at("n_cells").get<std::size_t>();
  r.n_users = j.at("run").at("n_users").get<std::size_t>();
  r.n_uavs = j.at("run").at("n_uavs").get<std::size_t>();

  auto dist = [](const nlohmann::json& d) {
    DistStats out;
    out.mean = d.at("mean").get<double>();
    for (const auto& [p, v] : d.at("percentiles").items())
      out.percentiles.emplace_back(std::stod(p), v.get<double>());
    std::sort(out.percentiles.begin(), out.percentiles.end());
    return out;
  };

  for (const auto& [pop, dirs] : j.at("populations").items()) {
    for (const auto& [dir, p] : dirs.items()) {
      PoolReport pr;
      pr.count = p.at("count").get<std::size_t>();
      if (pr.count > 0) {
        pr.outage = p.at("outage").get<double>();
        pr.sinr_db = dist(p.at("sinr_db"));
        pr.rate_bps = dist(p.at("rate_bps"));
      }
      r.pools[{pop, dir}] = std::move(pr);
    }
  }

  if (j.contains("relief")) {
    ReliefReport rr;
    rr.victims = j["relief"].at("victims").get<std::size_t>();
    rr.population = j["relief"].at("population").get<std::size_t>();
    rr.mean_muted = j["relief"].at("mean_muted").get<double>();
    rr.max_muted = j["relief"].at("max_muted").get<double>();
    rr.min_sinr_db = j["relief"].at("min_sinr_db").get<double>();
    r.relief = rr;
  }
  if (j.contains("partition")) {
    PartitionReport pr;
    pr.cells = j["partition"].at("cells").get<std::size_t>();
    pr.saturated = j["partition"].at("saturated").get<std::size_t>();
    pr.mean_reserved = j["partition"].at("mean_reserved").get<double>();
    pr.max_reserved = j["partition"].at("max_reserved").get<double>();
    r.partition = pr;
  }
  return r;
}

inline void write_json(std::ostream& os, const Report& r) {
  os << to_json(r).dump(2) << '\n';
}

// -- CSV ----------------------------------------------------------------------

// One metric per row: population,direction,metric,value
inline void write_metrics_csv(std::ostream& os, const Report& r) {
  os << "population,direction,metric,value\n";
  os << "run,all,n_drops," << r.n_drops << '\n';
  os << "run,all,n_cells," << r.n_cells << '\n';
  os << "run,all,n_users," << r.n_users << '\n';
  os << "run,all,n_uavs," << r.n_uavs << '\n';

  auto dist_rows = [&](const std::string& pop, const std::string& dir,
                       const std::string& name, const DistStats& d) {
    os << pop << ',' << dir << ',' << name << "_mean,"
       << detail::fmt_double(d.mean) << '\n';
    for (const auto& [p, v] : d.percentiles)
      os << pop << ',' << dir << ',' << name << "_p"
         << detail::fmt_double(p) << ',' << detail::fmt_double(v) << '\n';
  };

  for (const auto& [key, pool] : r.pools) {
    const auto& [pop, dir] = key;
    os << pop << ',' << dir << ",count," << pool.count << '\n';
    if (pool.count == 0) continue;
    os << pop << ',' << dir << ",outage," << detail::fmt_double(pool.outage)
       << '\n';
    dist_rows(pop, dir, "sinr_db", pool.sinr_db);
    dist_rows(pop, dir, "rate_bps", pool.rate_bps);
  }

  if (r.relief) {
    os << "uav,dl,relief_victims," << r.relief->victims << '\n';
    os << "uav,dl,relief_population," << r.relief->population << '\n';
    os << "uav,dl,relief_mean_muted,"
       << detail::fmt_double(r.relief->mean_muted) << '\n';
    os << "uav,dl,relief_max_muted," << detail::fmt_double(r.relief->max_muted)
       << '\n';
    os << "uav,dl,relief_min_sinr_db,"
       << detail::fmt_double(r.relief->min_sinr_db) << '\n';
  }
  if (r.partition) {
    os << "cell,ul,partition_cells," << r.partition->cells << '\n';
    os << "cell,ul,partition_saturated," << r.partition->saturated << '\n';
    os << "cell,ul,partition_mean_reserved,"
       << detail::fmt_double(r.partition->mean_reserved) << '\n';
    os << "cell,ul,partition_max_reserved,"
       << detail::fmt_double(r.partition->max_reserved) << '\n';
  }
}

// Every sample in long format: population,direction,kind,value
inline void write_samples_csv(std::ostream& os, const metrics::Summary& s) {
  os << "population,direction,kind,value\n";
  auto rows = [&](const std::string& pop, const std::string& dir,
                  const metrics::SamplePool& pool) {
    for (double v : pool.sinr_db)
      os << pop << ',' << dir << ",sinr_db," << detail::fmt_double(v) << '\n';
    for (double v : pool.rate_bps)
      os << pop << ',' << dir << ",rate_bps," << detail::fmt_double(v) << '\n';
  };
  rows("gue", "dl", s.gue_dl);
  rows("gue", "ul", s.gue_ul);
  rows("uav", "dl", s.uav_dl);
  rows("uav", "ul", s.uav_ul);
  for (double v : s.relief_muted_counts)
    os << "uav,dl,relief_muted," << detail::fmt_double(v) << '\n';
  for (double v : s.relief_sinr_db)
    os << "uav,dl,relief_sinr_db," << detail::fmt_double(v) << '\n';
  for (double v : s.partition_reserved_fraction)
    os << "cell,ul,reserved_fraction," << detail::fmt_double(v) << '\n';
}

// Reads a samples CSV back into (population.direction.kind -> values).
inline std::map<std::string, std::vector<double>> read_samples_csv(
    std::istream& is) {
  std::map<std::string, std::vector<double>> out;
  std::string line;
  if (!std::getline(is, line) || line != "population,direction,kind,value")
    throw std::runtime_error("samples csv: bad header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t p1 = line.find(','), p2, p3;
    if (p1 == std::string::npos ||
        (p2 = line.find(',', p1 + 1)) == std::string::npos ||
        (p3 = line.find(',', p2 + 1)) == std::string::npos)
      throw std::runtime_error("samples csv:" + std::to_string(lineno) +
                               ": expected 4 fields");
    const std::string key = line.substr(0, p1) + "." +
                            line.substr(p1 + 1, p2 - p1 - 1) + "." +
                            line.substr(p2 + 1, p3 - p2 - 1);
    out[key].push_back(
        channel::detail::parse_number(line.substr(p3 + 1),
                                      "samples csv:" + std::to_string(lineno)));
  }
  return out;
}

// -- file helpers ---------------------------------------------------------------

inline void write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  writer(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace ntnsim::results
