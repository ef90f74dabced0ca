#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ntnsim/cli.hpp"

using namespace ntnsim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// a 3-cell, 2-drop scenario that finishes in well under a second
const std::vector<std::string> kTinySets = {
    "--set", "deployment.area_m2=0.2e6", "--set", "traffic.users_per_cell=6",
    "--set", "traffic.uav_ratio=0.4",    "--set", "drops=2",
    "--set", "fading.draws=4",           "--set", "seed=11",
};

std::vector<std::string> with_tiny(std::vector<std::string> args) {
  args.insert(args.end(), kTinySets.begin(), kTinySets.end());
  return args;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("ntnsim_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("presets subcommand lists the catalogue") {
  const auto r = call({"presets"});
  REQUIRE(r.code == 0);
  REQUIRE(r.err.empty());
  std::istringstream is(r.out);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  REQUIRE(lines == config::preset_names());
}

TEST_CASE("version and help") {
  REQUIRE(call({"--version"}).out.find(results::kVersion) != std::string::npos);
  const auto help = call({"--help"});
  REQUIRE(help.code == 0);
  REQUIRE(help.out.find("run") != std::string::npos);
  REQUIRE(help.out.find("sweep") != std::string::npos);
  REQUIRE(help.out.find("validate") != std::string::npos);
}

TEST_CASE("usage errors exit 2 with a synopsis") {
  const auto r = call({"frobnicate"});
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("error:") != std::string::npos);
  REQUIRE(r.err.find("Usage") != std::string::npos);

  const auto missing = call({"sweep"});  // --out and --vary required
  REQUIRE(missing.code == 2);
  REQUIRE(missing.err.find("--out") != std::string::npos);

  const auto none = call({});
  REQUIRE(none.code == 2);
}

TEST_CASE("validate subcommand") {
  SECTION("accepts a preset") {
    const auto r = call({"validate", "--preset", "case3.offload_87_frf1"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("ok: case3.offload_87_frf1 (offload, 100 drops)") !=
            std::string::npos);
  }

  SECTION("rejects a bad override with a reason") {
    const auto r =
        call({"validate", "--set", "deployment.elevation_deg=95"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("elevation_deg must be in (0, 90]") !=
            std::string::npos);
  }

  SECTION("rejects malformed --set") {
    const auto r = call({"validate", "--set", "dropstypo"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("--set expects key=value") != std::string::npos);
  }

  SECTION("rejects a missing config file") {
    const auto r = call({"validate", "--config", "/tmp/no_such_file.cfg"});
    REQUIRE(r.code == 2);  // CLI11 ExistingFile check
  }
}

TEST_CASE("run subcommand") {
  SECTION("prints a headline without --out") {
    const auto r = call(with_tiny({"run"}));
    REQUIRE(r.code == 0);
    REQUIRE(r.err.empty());
    REQUIRE(r.out.find("drops=2") != std::string::npos);
    REQUIRE(r.out.find("gue dl:") != std::string::npos);
    REQUIRE(r.out.find("uav ul:") != std::string::npos);
    REQUIRE(r.out.find("sinr_p50=") != std::string::npos);
  }

  SECTION("writes summary.json, metrics.csv, and samples.csv") {
    TempDir tmp("run");
    const auto r = call(with_tiny(
        {"run", "--out", tmp.path.string(), "--samples"}));
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(tmp.path / "summary.json"));
    REQUIRE(fs::exists(tmp.path / "metrics.csv"));
    REQUIRE(fs::exists(tmp.path / "samples.csv"));

    const auto j = nlohmann::json::parse(slurp(tmp.path / "summary.json"));
    REQUIRE(j["run"]["n_drops"] == 2);
    REQUIRE(j["config"]["deployment.area_m2"] == "200000");
    const auto report = results::report_from_json(j);
    REQUIRE(report.pools.at({"gue", "dl"}).count > 0);

    std::istringstream is(slurp(tmp.path / "samples.csv"));
    const auto samples = results::read_samples_csv(is);
    REQUIRE(samples.at("gue.dl.sinr_db").size() ==
            report.pools.at({"gue", "dl"}).count);
  }

  SECTION("same seed gives byte-identical outputs, any worker count") {
    TempDir a("wa"), b("wb");
    REQUIRE(call(with_tiny({"run", "--out", a.path.string(), "--workers", "1"}))
                .code == 0);
    REQUIRE(call(with_tiny({"run", "--out", b.path.string(), "--workers", "3"}))
                .code == 0);
    REQUIRE(slurp(a.path / "summary.json") == slurp(b.path / "summary.json"));
    REQUIRE(slurp(a.path / "metrics.csv") == slurp(b.path / "metrics.csv"));
  }

  SECTION("NTNSIM_WORKERS env is honoured") {
    TempDir a("we");
    ::setenv("NTNSIM_WORKERS", "2", 1);
    const auto r = call(with_tiny({"run", "--out", a.path.string()}));
    ::unsetenv("NTNSIM_WORKERS");
    REQUIRE(r.code == 0);

    TempDir b("wf");
    REQUIRE(call(with_tiny({"run", "--out", b.path.string()})).code == 0);
    REQUIRE(slurp(a.path / "summary.json") == slurp(b.path / "summary.json"));
  }

  SECTION("a config file combines with overrides") {
    TempDir tmp("cfgfile");
    fs::create_directories(tmp.path);
    const auto cfg_path = (tmp.path / "scenario.cfg").string();
    {
      std::ofstream os(cfg_path);
      os << "preset = case3.relief\n"
            "deployment.area_m2 = 1.2e6\n"
            "traffic.users_per_cell = 5\n"
            "drops = 2\n"
            "fading.draws = 4\n";
    }
    const auto r = call({"run", "--config", cfg_path, "--set", "seed=5"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("relief:") != std::string::npos);
  }

  SECTION("runtime failures exit 1") {
    // preset conflicts with a preset line inside the config file
    TempDir tmp("dup");
    fs::create_directories(tmp.path);
    const auto cfg_path = (tmp.path / "p.cfg").string();
    {
      std::ofstream os(cfg_path);
      os << "preset = case2.standalone\n";
    }
    const auto r = call(
        {"run", "--config", cfg_path, "--preset", "case3.standalone"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("duplicate preset") != std::string::npos);
  }
}

TEST_CASE("sweep subcommand") {
  TempDir tmp("sweep");
  auto args = with_tiny({"sweep", "--out", tmp.path.string(), "--vary",
                         "seed=1,2", "--vary", "deployment.frf=1,3"});
  const auto r = call(args);
  REQUIRE(r.code == 0);

  const std::vector<std::string> dirs = {
      "seed=1,deployment.frf=1", "seed=2,deployment.frf=1",
      "seed=1,deployment.frf=3", "seed=2,deployment.frf=3"};
  for (const auto& d : dirs) {
    REQUIRE(fs::exists(tmp.path / d / "summary.json"));
    REQUIRE(fs::exists(tmp.path / d / "metrics.csv"));
  }

  const auto index = nlohmann::json::parse(slurp(tmp.path / "sweep.json"));
  REQUIRE(index.size() == 4);
  REQUIRE(index[0]["overrides"]["seed"] == "1");

  // the varied key lands in each combo's config echo
  const auto j =
      nlohmann::json::parse(slurp(tmp.path / dirs[3] / "summary.json"));
  REQUIRE(j["config"]["deployment.frf"] == "3");
  REQUIRE(j["config"]["seed"] == "2");

  SECTION("bad vary specs") {
    REQUIRE(call({"sweep", "--out", tmp.path.string(), "--vary", "seed"})
                .code == 1);
    REQUIRE(call({"sweep", "--out", tmp.path.string(), "--vary", "seed=1,,2"})
                .code == 1);
  }
}
