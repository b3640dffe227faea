#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "hqm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Flux-qubit / YIG / NV hybrid quantum-memory simulator"};
  app.set_version_flag("--version", std::string(hqm::cli::version));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool drop_counter_rotating = false;
  bool calibrate = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "configuration file (defaults apply to omitted keys)")
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", out_dir, "output directory (default: $HQM_OUT_DIR, else ./hqm-out)");
  app.add_option("--set", overrides, "override a key, e.g. --set protocol.rise_time_s=4e-9");
  app.add_flag("--drop-counter-rotating", drop_counter_rotating, "drop the fast g_(+1) term");
  app.add_flag("--calibrate", calibrate, "optimize the transfer hold before running");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  app.add_subcommand("couplings", "lattice sums, shifts and effective couplings");
  app.add_subcommand("transfer", "populations during the transfer stage");
  app.add_subcommand("memory", "full write / store / read protocol");
  app.add_subcommand("table1", "stage fidelities for the step-ramp grid");
  app.add_subcommand("table2", "transfer fidelities for ramped fields");
  app.add_subcommand("oracle", "full-model check of the effective Hamiltonian");
  app.add_subcommand("ramp-plot", "linear and exponential field ramps");
  auto* sweep = app.add_subcommand("sweep", "memory protocol over a grid of one config key");
  std::string axis;
  std::string values;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 0;
  sweep->add_option("--axis", axis, "config key, e.g. rates.fq_t2_s")->required();
  sweep->add_option("--values", values, "comma-separated values");
  sweep->add_option("--from", from, "first value");
  sweep->add_option("--to", to, "last value");
  sweep->add_option("--points", points, "number of evenly spaced values");

  CLI11_PARSE(app, argc, argv);

  try {
    hqm::cli::RunContext ctx;
    if (!config_path.empty()) ctx.cfg = hqm::config::Config::load(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw hqm::config::ConfigError("--set expects key=value, got '" + o + "'");
      ctx.cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (drop_counter_rotating) ctx.cfg.set("protocol.drop_counter_rotating", "true");
    if (calibrate) ctx.cfg.set("protocol.calibrate", "true");
    if (!out_dir.empty())
      ctx.out_dir = out_dir;
    else if (const char* env = std::getenv("HQM_OUT_DIR"); env && *env)
      ctx.out_dir = env;
    ctx.log = quiet ? nullptr : &std::cout;

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "couplings") return hqm::cli::cmd_couplings(ctx);
    if (cmd == "transfer") return hqm::cli::cmd_transfer(ctx);
    if (cmd == "memory") return hqm::cli::cmd_memory(ctx);
    if (cmd == "table1") return hqm::cli::cmd_table(ctx, 1);
    if (cmd == "table2") return hqm::cli::cmd_table(ctx, 2);
    if (cmd == "oracle") return hqm::cli::cmd_oracle(ctx);
    if (cmd == "ramp-plot") return hqm::cli::cmd_ramp_plot(ctx);
    if (cmd == "sweep") {
      hqm::cli::SweepSpec spec{axis, hqm::cli::sweep_values(values, from, to, points)};
      return hqm::cli::cmd_sweep(ctx, spec);
    }
  } catch (const hqm::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
