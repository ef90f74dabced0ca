#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ntnsim/radio.hpp"

using namespace ntnsim;
using namespace ntnsim::radio;
using Catch::Approx;

TEST_CASE("fractional power control") {
  RadioParams p;

  SECTION("frozen points") {
    p.ul_alpha = 0.0;
    REQUIRE(ul_power_dbm(-100.0, p) == -85.0);
    p.ul_alpha = 0.8;
    REQUIRE(ul_power_dbm(-100.0, p) == Approx(-5.0));
    REQUIRE(ul_power_dbm(-140.0, p) == 23.0);  // capped
  }
  SECTION("never exceeds the budget") {
    for (double g = -180.0; g <= 0.0; g += 2.5)
      REQUIRE(ul_power_dbm(g, p) <= p.ul_pmax_dbm);
  }
  SECTION("full compensation inverts the channel below the cap") {
    p.ul_alpha = 1.0;
    for (double g : {-60.0, -80.0, -100.0}) {
      const double tx = ul_power_dbm(g, p);
      if (tx < p.ul_pmax_dbm) REQUIRE(tx + g == Approx(p.ul_p0_dbm));
    }
  }
  SECTION("rejects alpha outside [0, 1]") {
    p.ul_alpha = 1.2;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  }
}

TEST_CASE("noise budgets") {
  RadioParams p;
  REQUIRE(thermal_noise_dbm(360e3, 7.0) == Approx(-111.43697499232712));
  REQUIRE(thermal_noise_dbm(10e6, 9.0) == Approx(-95.0));
  REQUIRE(thermal_noise_dbm(30e6, 9.0) == Approx(-90.22878745280337));
  // G/T = 1.1 dB/K with a 30 dBi receive antenna: T about 776 K
  REQUIRE(ntn_ul_noise_dbm(360e3, p) == Approx(-114.1361421655448));
}

TEST_CASE("satellite transmit power from EIRP density") {
  RadioParams p;
  REQUIRE(ntn_dl_tx_power_dbm(30e6, p) == Approx(48.771212547196626));
  REQUIRE(ntn_dl_tx_power_dbm(10e6, p) == Approx(44.0));
  // the per-MHz EIRP is what stays fixed across occupied bands
  REQUIRE(ntn_dl_tx_power_dbm(30e6, p) - ntn_dl_tx_power_dbm(10e6, p) ==
          Approx(10.0 * std::log10(3.0)));
  REQUIRE_THROWS_AS(ntn_dl_tx_power_dbm(0.0, p), std::invalid_argument);
}

TEST_CASE("association by RSRP") {
  // gains[c][u]
  const std::vector<std::vector<double>> g{
      {1.0, 1e-3, 0.5}, {1e-2, 1e-2, 0.5}, {1e-9, 1e-4, 0.4}};
  auto gain = [&](std::size_t c, std::size_t u) { return g[c][u]; };
  const std::vector<double> equal_p{1.0, 1.0, 1.0};

  SECTION("argmax with ties to the lowest index") {
    const auto s = associate(3, equal_p, gain);
    REQUIRE(s == std::vector<int>{0, 1, 0});
  }
  SECTION("scaling every power leaves the argmax unchanged") {
    const auto s1 = associate(3, equal_p, gain);
    const auto s2 = associate(3, {7.0, 7.0, 7.0}, gain);
    REQUIRE(s1 == s2);
  }
  SECTION("unequal powers shift the decision") {
    // cell 1 transmits 30 dB above the others and wins every user
    const auto s = associate(3, {1.0, 1000.0, 1.0}, gain);
    REQUIRE(s == std::vector<int>{1, 1, 1});
    // 10 dB is not enough to overcome user 0's 20 dB gain margin
    const auto t = associate(3, {1.0, 10.0, 1.0}, gain);
    REQUIRE(t[0] == 0);
  }
  SECTION("single cell takes everyone") {
    const auto s = associate(3, {1.0}, [](std::size_t, std::size_t) { return 1.0; });
    REQUIRE(s == std::vector<int>{0, 0, 0});
  }
  SECTION("no cells is an error") {
    REQUIRE_THROWS_AS(associate(1, {}, gain), std::invalid_argument);
  }
}

TEST_CASE("round robin schedule") {
  CellSchedule cell;

  SECTION("fifteen users fit the UL band together") {
    cell.users.assign(15, 0);
    REQUIRE(cell.n_ul(10e6, 360e3) == 15);
    REQUIRE(cell.ul_eta(10e6, 360e3) == 1.0);
    REQUIRE(cell.dl_eta() == Approx(1.0 / 15.0));
  }
  SECTION("forty users rotate through 27 PRBs") {
    cell.users.assign(40, 0);
    REQUIRE(cell.n_ul(10e6, 360e3) == 27);
    REQUIRE(cell.ul_eta(10e6, 360e3) == Approx(27.0 / 40.0));
  }
  SECTION("single user gets everything") {
    cell.users.assign(1, 0);
    REQUIRE(cell.dl_eta() == 1.0);
    REQUIRE(cell.ul_eta(10e6, 360e3) == 1.0);
  }
  SECTION("empty cell schedules nothing") {
    REQUIRE(cell.dl_eta() == 0.0);
    REQUIRE(cell.ul_eta(10e6, 360e3) == 0.0);
  }
  SECTION("UL time share never exceeds one") {
    for (std::size_t n : {1u, 5u, 27u, 28u, 100u}) {
      cell.users.assign(n, 0);
      REQUIRE(cell.ul_eta(10e6, 360e3) <= 1.0);
    }
  }
}

TEST_CASE("per-PRB SINR") {
  SECTION("no interference reduces to SNR") {
    REQUIRE(sinr_linear(2.0, 0.0, 0.5) == Approx(4.0));
  }
  SECTION("two identical cells, equal gains") {
    const double pg = 3.7e-6, noise = 1e-7;
    REQUIRE(sinr_linear(pg, pg, noise) == Approx(pg / (pg + noise)));
    REQUIRE(sinr_linear(pg, pg, noise) < 1.0);
  }
  SECTION("monotone in interference") {
    REQUIRE(sinr_linear(1.0, 2.0, 0.1) > sinr_linear(1.0, 3.0, 0.1));
  }
  SECTION("guards") {
    REQUIRE_THROWS_AS(sinr_linear(1.0, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sinr_linear(1.0, -1.0, 0.1), std::invalid_argument);
  }
}

TEST_CASE("achievable rate") {
  SECTION("0 dB over the full band") {
    REQUIRE(rate_bps(1.0, 10e6, std::log2(2.0)) == Approx(10e6));
  }
  SECTION("one of fifteen users on 30 MHz at 15 dB") {
    const double mean = std::log2(1.0 + std::pow(10.0, 1.5));
    REQUIRE(rate_bps(1.0 / 15.0, 30e6, mean) == Approx(10055615.346701039));
  }
  SECTION("guards") {
    REQUIRE_THROWS_AS(rate_bps(1.5, 10e6, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(rate_bps(0.5, 0.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("interference relief") {
  const double noise = 0.5;

  SECTION("mutes strongest first until the threshold clears") {
    const auto r = tn_interference_relief(
        1.0, {{7, 0.1}, {3, 10.0}, {5, 5.0}}, noise, -5.0);
    REQUIRE(r.muted == std::vector<int>{3, 5});
    REQUIRE(r.sinr == Approx(1.0 / 0.6));
    REQUIRE(lin_to_db(r.sinr) >= -5.0);
  }
  SECTION("already above threshold mutes nothing") {
    const auto r = tn_interference_relief(1.0, {{0, 0.1}}, noise, -5.0);
    REQUIRE(r.muted.empty());
    REQUIRE(r.sinr == Approx(1.0 / 0.6));
  }
  SECTION("may mute everything and still sit below threshold") {
    const auto r = tn_interference_relief(1e-6, {{0, 1.0}, {1, 2.0}}, noise, -5.0);
    REQUIRE(r.muted.size() == 2);
    REQUIRE(r.sinr == Approx(1e-6 / noise));
    REQUIRE(lin_to_db(r.sinr) < -5.0);
  }
  SECTION("muting is monotone in SINR") {
    std::vector<std::pair<int, double>> interf{{0, 4.0}, {1, 2.0}, {2, 1.0}};
    double prev = sinr_linear(1.0, 7.0, noise);
    double itotal = 7.0;
    for (const auto& [id, p] : interf) {
      itotal -= p;
      const double s = sinr_linear(1.0, itotal, noise);
      REQUIRE(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("UL resource partition") {
  SECTION("no UAVs, nothing reserved") {
    const auto r = ul_resource_partition({}, 100e3);
    REQUIRE(r.reserved_fraction == 0.0);
    REQUIRE_FALSE(r.saturated);
  }
  SECTION("a 200 kbps UAV needs half the resources for 100 kbps") {
    const auto r = ul_resource_partition({200e3}, 100e3);
    REQUIRE(r.reserved_fraction == Approx(0.5));
    REQUIRE_FALSE(r.saturated);
  }
  SECTION("shares add across UAVs") {
    const auto r = ul_resource_partition({200e3, 400e3}, 100e3);
    REQUIRE(r.reserved_fraction == Approx(0.75));
  }
  SECTION("infeasible targets saturate the cell") {
    const auto r = ul_resource_partition({120e3, 150e3}, 100e3);
    REQUIRE(r.saturated);
    REQUIRE(r.reserved_fraction == 1.0);
    const auto z = ul_resource_partition({0.0}, 100e3);
    REQUIRE(z.saturated);
  }
  SECTION("rejects non-positive targets") {
    REQUIRE_THROWS_AS(ul_resource_partition({1e5}, 0.0), std::invalid_argument);
  }
}
