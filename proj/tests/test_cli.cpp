#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hqm/commands.hpp"

using namespace hqm;
using namespace hqm::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json summary(const fs::path& dir, const std::string& command) {
  return nlohmann::json::parse(slurp(dir / (command + "_summary.json")));
}

// Data rows of one of our CSV files, split into cells.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hqm_cli_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunContext context(const fs::path& out) {
  RunContext ctx;
  ctx.out_dir = out;
  ctx.cfg.set("integrator.workers", "1");
  return ctx;
}

}  // namespace

TEST_CASE("couplings command") {
  TempDir dir("couplings");
  auto ctx = context(dir.path);
  CHECK(cmd_couplings(ctx) == 0);
  CHECK(fs::exists(dir.path / "couplings.csv"));
  CHECK(fs::exists(dir.path / "config.ini"));
  const auto s = summary(dir.path, "couplings");
  CHECK(s["site_count"].get<double>() == doctest::Approx(1.6e6).epsilon(0.05));
  CHECK(s["checks"].contains("g_eff_in_0.1_1.5_MHz"));
  const auto text = slurp(dir.path / "couplings.csv");
  CHECK(text.find("quantity,rad_per_s,hz\r\n") != std::string::npos);
  CHECK(text.find("# config:") != std::string::npos);

  ctx.cfg.set("geometry.fq_persistent_current_a", "0");
  CHECK(cmd_couplings(ctx) == 0);
  const auto z = summary(dir.path, "couplings");
  CHECK(z["g_FY_hz"].get<double>() == 0.0);
  CHECK(z["g_minus_hz"].get<double>() == 0.0);
  CHECK(z["g_plus_hz"].get<double>() == 0.0);
}

TEST_CASE("transfer command") {
  TempDir dir("transfer");
  auto ctx = context(dir.path);
  CHECK(cmd_transfer(ctx) == 0);
  const auto rows = csv_rows(dir.path / "transfer.csv");
  REQUIRE(rows.size() > 100);
  // columns: time, field, p_0F_0N, p_0F_m1N, p_0F_p1N, p_1F_0N, ...
  CHECK(std::stod(rows.front()[5]) == doctest::Approx(0.5));
  CHECK(std::stod(rows.front()[3]) == doctest::Approx(0.0));
  CHECK(std::stod(rows.back()[0]) == doctest::Approx(0.357e-6).epsilon(1e-3));
  CHECK(std::stod(rows.back()[5]) < 0.02);
  CHECK(std::stod(rows.back()[3]) == doctest::Approx(0.5).epsilon(0.1));
  const auto s = summary(dir.path, "transfer");
  CHECK(s["max_leakage_0F_p1N"].get<double>() > 1e-8);
  CHECK(s["max_leakage_0F_p1N"].get<double>() < 1e-6);
  CHECK(csv_rows(dir.path / "transfer_leakage.csv").size() == rows.size() - 1);
  CHECK(fs::exists(dir.path / "transfer_populations.svg"));
  CHECK(fs::exists(dir.path / "transfer_leakage.svg"));

  ctx.cfg.set("model.g_minus_hz", "0");
  ctx.cfg.set("protocol.transfer_hold_s", "0.357e-6");
  CHECK(cmd_transfer(ctx) == 0);
  // without coupling the FQ excitation only decays in place
  double previous = 0.5;
  for (const auto& r : csv_rows(dir.path / "transfer.csv")) {
    CHECK(std::stod(r[5]) <= previous + 1e-12);
    CHECK(std::stod(r[3]) == 0.0);
    previous = std::stod(r[5]);
  }
}

TEST_CASE("memory command is deterministic and reproducible from its config snapshot") {
  TempDir a("memory_a");
  TempDir b("memory_b");
  auto ctx = context(a.path);
  CHECK(cmd_memory(ctx) == 0);
  const auto s = summary(a.path, "memory");
  CHECK(s["checks"]["monotone_degradation"].get<bool>());
  CHECK(s["f_transfer"].get<double>() == doctest::Approx(0.9689).epsilon(0.01));
  const auto first = slurp(a.path / "memory_trajectory.csv");
  CHECK(cmd_memory(ctx) == 0);
  CHECK(slurp(a.path / "memory_trajectory.csv") == first);

  RunContext again;
  again.cfg = config::Config::load((a.path / "config.ini").string());
  again.out_dir = b.path;
  CHECK(cmd_memory(again) == 0);
  CHECK(slurp(b.path / "memory_trajectory.csv") == first);
  CHECK(slurp(b.path / "memory_stages.csv") == slurp(a.path / "memory_stages.csv"));
}

TEST_CASE("ramp-plot command") {
  TempDir dir("ramp");
  auto ctx = context(dir.path);
  CHECK(cmd_ramp_plot(ctx) == 0);
  const auto rows = csv_rows(dir.path / "ramp_profile.csv");
  REQUIRE(rows.size() == 201);
  CHECK(std::stod(rows.back()[0]) == doctest::Approx(4e-9));
  CHECK(std::stod(rows.front()[1]) == 0.0);
  CHECK(std::stod(rows[100][1]) == doctest::Approx(40e-4));
  CHECK(std::stod(rows.back()[1]) == doctest::Approx(80e-4));
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(80e-4));
  CHECK(std::stod(rows[100][2]) > 40e-4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) >= std::stod(rows[i - 1][1]));
}

TEST_CASE("table 1 command gates on tolerance") {
  TempDir dir("table1");
  auto ctx = context(dir.path);
  CHECK(cmd_table(ctx, 1) == 0);
  const auto rows = csv_rows(dir.path / "table1.csv");
  CHECK(rows.size() == 8);
  CHECK(summary(dir.path, "table1")["checks"]["values_within_tolerance"].get<bool>());

  ctx.cfg.set("rates.fq_t2_s", "2e-6");
  CHECK(cmd_table(ctx, 1) == 1);
  CHECK_FALSE(summary(dir.path, "table1")["checks"]["values_within_tolerance"].get<bool>());
}

TEST_CASE("oracle command") {
  TempDir dir("oracle");
  auto ctx = context(dir.path);
  CHECK(cmd_oracle(ctx) == 0);
  const auto s = summary(dir.path, "oracle");
  CHECK(s["max_trace_distance"].get<double>() < 5e-2);
  CHECK(csv_rows(dir.path / "oracle.csv").size() >= 200);
}

TEST_CASE("sweep values") {
  CHECK(sweep_values("1, 2,3e-6", 0, 0, 0) == std::vector<double>{1, 2, 3e-6});
  CHECK(sweep_values("", 0.0, 1.0, 3) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(sweep_values("", 2.0, 5.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(sweep_values("1,x", 0, 0, 0), config::ConfigError);
  CHECK_THROWS_AS(sweep_values("", 0, 1, 0), config::ConfigError);
}

TEST_CASE("sweeps") {
  TempDir dir("sweep");
  auto ctx = context(dir.path);

  CHECK(cmd_sweep(ctx, {"rates.fq_t2_s", {40e-6, 10e-6, 20e-6}}) == 0);
  auto rows = csv_rows(dir.path / "sweep.csv");
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[0][0]) == 10e-6);
  CHECK(std::stod(rows[1][3]) > std::stod(rows[0][3]));
  CHECK(std::stod(rows[2][3]) > std::stod(rows[1][3]));

  ctx.cfg.set("protocol.ramp_shape", "exponential");
  CHECK(cmd_sweep(ctx, {"protocol.rise_time_s", {0.0, 4e-9, 10e-9}}) == 0);
  rows = csv_rows(dir.path / "sweep.csv");
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][1]) <= std::stod(rows[0][1]));
  CHECK(std::stod(rows[2][1]) <= std::stod(rows[1][1]));

  auto base = context(dir.path);
  CHECK(cmd_sweep(base, {"rates.nv_t2_s", {90e-6}}) == 0);
  const auto single = csv_rows(dir.path / "sweep.csv");
  CHECK(cmd_memory(base) == 0);
  const auto mem = summary(dir.path, "memory");
  CHECK(std::stod(single[0][1]) == mem["f_transfer"].get<double>());
  CHECK(std::stod(single[0][3]) == mem["f_retrieval"].get<double>());

  CHECK_THROWS_AS(cmd_sweep(base, {"rates.bogus", {1.0}}), config::ConfigError);
  CHECK_THROWS_AS(cmd_sweep(base, {"rates.nv_t2_s", {}}), config::ConfigError);
}
