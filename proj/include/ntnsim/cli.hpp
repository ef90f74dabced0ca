#pragma once

// Command-line front end: run | sweep | presets | validate.  The entry
// point takes explicit streams so the whole surface is testable in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ntnsim/config.hpp"
#include "ntnsim/engine.hpp"
#include "ntnsim/results_io.hpp"

namespace ntnsim::cli {

namespace detail {

struct ConfigArgs {
  std::string config_path;
  std::string preset_name;
  std::vector<std::string> sets;  // key=value overrides, applied last
};

inline void add_config_options(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("-c,--config", a.config_path, "scenario config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("-p,--preset", a.preset_name,
                  "start from a named preset (see `ntnsim presets`)");
  cmd->add_option("-s,--set", a.sets,
                  "override a config key, e.g. --set drops=50");
}

// Assembles one config text from preset, file, and overrides; later lines
// win, so overrides are appended last.
inline config::ScenarioConfig build_config(const ConfigArgs& a) {
  std::string text;
  std::string origin = "cli";
  if (!a.preset_name.empty()) text += "preset = " + a.preset_name + "\n";
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in)
      throw std::runtime_error("cannot open config file: " + a.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text += ss.str();
    if (!text.empty() && text.back() != '\n') text += '\n';
    origin = a.config_path;
  }
  for (const auto& s : a.sets) {
    if (s.find('=') == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + s + "'");
    text += s + "\n";
  }
  return config::parse_config_text(text, origin);
}

inline int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("NTNSIM_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void print_headline(std::ostream& out, const results::Report& r) {
  out << "drops=" << r.n_drops << " cells=" << r.n_cells
      << " users=" << r.n_users << " uavs=" << r.n_uavs << "\n";
  for (const auto& [key, pool] : r.pools) {
    out << key.first << " " << key.second << ": ";
    if (pool.count == 0) {
      out << "no samples\n";
      continue;
    }
    double sinr_p50 = 0, rate_p50 = 0;
    for (const auto& [p, v] : pool.sinr_db.percentiles)
      if (p == 50) sinr_p50 = v;
    for (const auto& [p, v] : pool.rate_bps.percentiles)
      if (p == 50) rate_p50 = v;
    out << "n=" << pool.count << " outage=" << fixed(100.0 * pool.outage, 2)
        << "% sinr_p50=" << fixed(sinr_p50, 2)
        << "dB rate_p50=" << fixed(rate_p50 / 1e3, 1) << "kbps\n";
  }
  if (r.relief) {
    out << "relief: victims=" << r.relief->victims << "/"
        << r.relief->population
        << " mean_muted=" << fixed(r.relief->mean_muted, 2)
        << " min_sinr=" << fixed(r.relief->min_sinr_db, 2) << "dB\n";
  }
  if (r.partition) {
    out << "partition: cells=" << r.partition->cells
        << " saturated=" << r.partition->saturated
        << " mean_reserved=" << fixed(r.partition->mean_reserved, 4) << "\n";
  }
}

inline void write_outputs(const std::string& out_dir,
                          const results::Report& report,
                          const metrics::Summary& summary, bool samples,
                          std::ostream& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const char* f) { return (fs::path(out_dir) / f).string(); };
  results::write_file(path("summary.json"), [&](std::ostream& os) {
    results::write_json(os, report);
  });
  results::write_file(path("metrics.csv"), [&](std::ostream& os) {
    results::write_metrics_csv(os, report);
  });
  if (samples)
    results::write_file(path("samples.csv"), [&](std::ostream& os) {
      results::write_samples_csv(os, summary);
    });
  out << "wrote " << path("summary.json") << "\n";
  out << "wrote " << path("metrics.csv") << "\n";
  if (samples) out << "wrote " << path("samples.csv") << "\n";
}

// Splits "key=v1,v2,v3" into (key, values).
inline std::pair<std::string, std::vector<std::string>> parse_vary(
    const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
    throw std::runtime_error("--vary expects key=v1,v2,..., got '" + spec +
                             "'");
  std::pair<std::string, std::vector<std::string>> out;
  out.first = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  std::size_t pos = 0;
  while (true) {
    const auto comma = rest.find(',', pos);
    out.second.push_back(rest.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (const auto& v : out.second)
    if (v.empty())
      throw std::runtime_error("--vary has an empty value in '" + spec + "'");
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Monte Carlo simulator of an integrated terrestrial and "
               "satellite network serving ground and aerial users"};
  app.name("ntnsim");
  app.set_version_flag("--version", std::string(results::kVersion));
  app.require_subcommand(1);

  detail::ConfigArgs run_cfg, sweep_cfg, val_cfg;
  std::string run_out, sweep_out;
  bool run_samples = false;
  int run_workers = 0, sweep_workers = 0;
  std::vector<std::string> vary_specs;

  auto* cmd_run = app.add_subcommand("run", "run one scenario");
  detail::add_config_options(cmd_run, run_cfg);
  cmd_run->add_option("-o,--out", run_out,
                      "directory for summary.json and metrics.csv");
  cmd_run->add_flag("--samples", run_samples,
                    "also write every sample to samples.csv");
  cmd_run->add_option("-w,--workers", run_workers,
                      "worker threads (default: NTNSIM_WORKERS or 1)");

  auto* cmd_sweep =
      app.add_subcommand("sweep", "run a cartesian sweep over config keys");
  detail::add_config_options(cmd_sweep, sweep_cfg);
  cmd_sweep->add_option("-o,--out", sweep_out, "root output directory")
      ->required();
  cmd_sweep
      ->add_option("--vary", vary_specs,
                   "key=v1,v2,... (repeat for a cartesian product)")
      ->required();
  cmd_sweep->add_option("-w,--workers", sweep_workers,
                        "worker threads (default: NTNSIM_WORKERS or 1)");

  auto* cmd_presets = app.add_subcommand("presets", "list scenario presets");

  auto* cmd_validate =
      app.add_subcommand("validate", "parse and validate a config");
  detail::add_config_options(cmd_validate, val_cfg);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ntnsim");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (*cmd_presets) {
      for (const auto& n : config::preset_names()) out << n << "\n";
      return 0;
    }

    if (*cmd_validate) {
      const auto cfg = detail::build_config(val_cfg);
      out << "ok: " << cfg.name << " (" << config::mode_name(cfg.mode) << ", "
          << cfg.drops << " drops)\n";
      return 0;
    }

    if (*cmd_run) {
      const auto cfg = detail::build_config(run_cfg);
      const auto summary =
          engine::run_campaign(cfg, detail::resolve_workers(run_workers));
      const auto report = results::build_report(cfg, summary);
      detail::print_headline(out, report);
      if (!run_out.empty())
        detail::write_outputs(run_out, report, summary, run_samples, out);
      return 0;
    }

    // sweep
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    axes.reserve(vary_specs.size());
    for (const auto& spec : vary_specs) axes.push_back(detail::parse_vary(spec));

    namespace fs = std::filesystem;
    fs::create_directories(sweep_out);
    nlohmann::json index = nlohmann::json::array();

    std::vector<std::size_t> idx(axes.size(), 0);
    const int workers = detail::resolve_workers(sweep_workers);
    while (true) {
      auto combo_cfg = sweep_cfg;
      std::string dir_name;
      nlohmann::json overrides = nlohmann::json::object();
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& [key, values] = axes[a];
        const auto& v = values[idx[a]];
        combo_cfg.sets.push_back(key + "=" + v);
        if (!dir_name.empty()) dir_name += ",";
        dir_name += key + "=" + v;
        overrides[key] = v;
      }

      const auto cfg = detail::build_config(combo_cfg);
      const auto summary = engine::run_campaign(cfg, workers);
      const auto report = results::build_report(cfg, summary);
      const auto dir = (fs::path(sweep_out) / dir_name).string();
      detail::write_outputs(dir, report, summary, false, out);
      index.push_back({{"dir", dir_name}, {"overrides", overrides}});

      std::size_t a = 0;
      for (; a < axes.size(); ++a) {
        if (++idx[a] < axes[a].second.size()) break;
        idx[a] = 0;
      }
      if (a == axes.size()) break;
    }

    results::write_file((fs::path(sweep_out) / "sweep.json").string(),
                        [&](std::ostream& os) { os << index.dump(2) << "\n"; });
    out << "wrote " << (fs::path(sweep_out) / "sweep.json").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ntnsim::cli
