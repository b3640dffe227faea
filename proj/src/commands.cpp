#include "hqm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hqm/geometry.hpp"
#include "hqm/output.hpp"
#include "hqm/parallel.hpp"
#include "hqm/units.hpp"

namespace hqm::cli {

namespace {

using json = nlohmann::ordered_json;
using output::CsvTable;
using output::format_number;
using units::rad_to_hz;

struct Prepared {
  config::Device device;
  protocol::MemoryProtocol proto;
  protocol::InitialState init;
  std::optional<protocol::CalibrationResult> calibration;
};

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

std::size_t workers(const RunContext& ctx) {
  const long w = ctx.cfg.integer("integrator.workers");
  return w > 0 ? static_cast<std::size_t>(w) : default_worker_count();
}

Prepared prepare(const RunContext& ctx, bool allow_calibration = true) {
  Prepared p{config::build_device(ctx.cfg), {}, config::build_initial_state(ctx.cfg), std::nullopt};
  p.proto = config::build_protocol(ctx.cfg, p.device);
  if (allow_calibration && ctx.cfg.flag("protocol.calibrate")) {
    p.calibration =
        protocol::calibrate_transfer_time(p.init, p.proto, ctx.cfg.number("protocol.calibration_window"));
    p.proto.transfer_hold = p.calibration->hold;
    p.proto.retrieval_hold = p.calibration->hold;
  }
  return p;
}

void stamp(CsvTable& t, const RunContext& ctx, const std::string& command, const Prepared* p) {
  t.meta("generator", std::string("hqm ") + version);
  t.meta("command", command);
  if (p) {
    t.meta("B_res_T", format_number(p->proto.effective.B_res));
    t.meta("B_off_T", format_number(p->proto.b_off));
    t.meta("g_minus_hz", format_number(rad_to_hz(p->proto.effective.g_minus)));
    t.meta("g_plus_hz", format_number(rad_to_hz(p->proto.effective.g_plus)));
    t.meta("transfer_hold_s", format_number(p->proto.transfer_hold));
    t.meta("retrieval_hold_s", format_number(p->proto.retrieval_hold));
    t.meta("dt_s", format_number(p->proto.integrator.dt));
    t.meta("initial_state", p->init.label);
  }
  t.meta("units", "time s, field T, frequencies Hz, phases rad");
  t.meta_block("config:", ctx.cfg.dump());
}

void finish(const RunContext& ctx, const std::string& command, const json& summary) {
  std::filesystem::create_directories(ctx.out_dir);
  output::write_text(ctx.out_dir / "config.ini", ctx.cfg.dump());
  output::write_text(ctx.out_dir / (command + "_summary.json"), summary.dump(2) + "\n");
}

json protocol_json(const Prepared& p) {
  json j;
  j["initial_state"] = p.init.label;
  j["theta_rad"] = p.init.theta;
  j["phi_rad"] = p.init.phi;
  j["B_res_T"] = p.proto.effective.B_res;
  j["B_off_T"] = p.proto.b_off;
  j["g_minus_hz"] = rad_to_hz(p.proto.effective.g_minus);
  j["g_plus_hz"] = rad_to_hz(p.proto.effective.g_plus);
  j["transfer_hold_s"] = p.proto.transfer_hold;
  j["retrieval_hold_s"] = p.proto.retrieval_hold;
  j["rate_convention"] = dynamics::to_string(p.proto.convention);
  if (p.calibration) {
    j["calibration"] = {{"hold_s", p.calibration->hold},
                        {"fidelity", p.calibration->fidelity},
                        {"nominal_fidelity", p.calibration->nominal_fidelity},
                        {"at_boundary", p.calibration->at_boundary},
                        {"evaluations", p.calibration->evaluations}};
  }
  return j;
}

const std::vector<std::string>& basis_labels() {
  static const std::vector<std::string> labels{"0F_0N", "0F_m1N", "0F_p1N", "1F_0N", "1F_m1N", "1F_p1N"};
  return labels;
}

std::vector<std::string> trajectory_columns() {
  std::vector<std::string> cols{"time_s", "field_T"};
  for (const auto& l : basis_labels()) cols.push_back("p_" + l);
  for (const auto* c : {"re_rho_0F0N_0Fm1N", "im_rho_0F0N_0Fm1N", "re_rho_1F0N_0F0N", "im_rho_1F0N_0F0N"})
    cols.emplace_back(c);
  cols.emplace_back("fidelity_vs_target");
  return cols;
}

std::vector<double> trajectory_row(double t, double field, const ComplexMatrix& rho, const ComplexVector& target) {
  std::vector<double> row{t, field};
  for (Eigen::Index i = 0; i < 6; ++i) row.push_back(rho(i, i).real());
  row.push_back(rho(0, 1).real());
  row.push_back(rho(0, 1).imag());
  row.push_back(rho(3, 0).real());
  row.push_back(rho(3, 0).imag());
  row.push_back(dynamics::fidelity(rho, target));
  return row;
}

output::Chart population_chart(const std::string& title, const std::vector<double>& t_us,
                               const std::vector<std::vector<double>>& pops) {
  output::Chart chart;
  chart.title = title;
  chart.x_label = "time (us)";
  chart.y_label = "population";
  for (std::size_t k = 0; k < 6; ++k) chart.series.push_back({basis_labels()[k], t_us, pops[k]});
  return chart;
}

}  // namespace

int cmd_couplings(const RunContext& ctx) {
  const auto device = config::build_device(ctx.cfg);
  const auto& p = device.params;
  const auto& e = device.effective;
  const auto shifts = model::effective_shifts(p.at_field(e.B_res));

  CsvTable table({"quantity", "rad_per_s", "hz"});
  stamp(table, ctx, "couplings", nullptr);
  table.meta("site_count", std::to_string(device.site_count));
  table.meta("continuum_site_count", format_number(device.sphere.continuum_site_count()));
  auto row = [&](const std::string& name, double rad) {
    table.add_row({name, format_number(rad), format_number(rad_to_hz(rad))});
  };
  row("g_FY", p.g_FY);
  row("g_YN", p.g_YN);
  row("delta_YN", p.delta_YN);
  row("omega_F", p.omega_F);
  row("omega_K_at_B_res", p.at_field(e.B_res).omega_K);
  row("delta_F", shifts.delta_F);
  row("delta_N_minus", shifts.delta_N_minus);
  row("delta_N_plus", shifts.delta_N_plus);
  row("omega_F_eff", e.omega_F_eff);
  row("omega_N_eff_minus", e.omega_N_eff_minus);
  row("omega_N_eff_plus", e.omega_N_eff_plus);
  row("g_minus", e.g_minus);
  row("g_plus", e.g_plus);
  std::filesystem::create_directories(ctx.out_dir);
  table.write(ctx.out_dir / "couplings.csv");

  const double g_eff_hz = std::abs(rad_to_hz(e.g_minus));
  json s;
  s["command"] = "couplings";
  s["site_count"] = device.site_count;
  s["g_FY_hz"] = rad_to_hz(p.g_FY);
  s["g_YN_hz"] = rad_to_hz(p.g_YN);
  s["delta_YN_hz"] = rad_to_hz(p.delta_YN);
  s["delta_F_hz"] = rad_to_hz(shifts.delta_F);
  s["delta_N_minus_hz"] = rad_to_hz(shifts.delta_N_minus);
  s["delta_N_plus_hz"] = rad_to_hz(shifts.delta_N_plus);
  s["g_minus_hz"] = rad_to_hz(e.g_minus);
  s["g_plus_hz"] = rad_to_hz(e.g_plus);
  s["B_res_T"] = e.B_res;
  s["B_L_T"] = p.B_L;
  s["virtual_coupling_regime"] = p.virtual_coupling_regime();
  s["checks"] = {{"g_eff_in_0.1_1.5_MHz", g_eff_hz >= 0.1e6 && g_eff_hz <= 1.5e6}};
  finish(ctx, "couplings", s);

  std::ostringstream msg;
  msg << "N = " << device.site_count << ", g_FY/2pi = " << format_number(rad_to_hz(p.g_FY))
      << " Hz, g_YN/2pi = " << format_number(rad_to_hz(p.g_YN)) << " Hz, g_(-1)/2pi = " << format_number(g_eff_hz)
      << " Hz, B_res = " << format_number(e.B_res) << " T";
  say(ctx, msg.str());
  return 0;
}

int cmd_transfer(const RunContext& ctx) {
  const auto prep = prepare(ctx);
  auto proto = prep.proto;

  std::vector<std::pair<double, double>> leakage;
  proto.integrator.observer = [&leakage](double t, const ComplexMatrix& rho) {
    leakage.emplace_back(t, rho(2, 2).real());
  };
  const auto report = protocol::run_protocol(prep.init, proto, {.transfer_only = true, .record = true});

  const auto sched = proto.schedule();
  const double fall_end = sched.segment_end(static_cast<std::size_t>(protocol::Segment::fall_1));
  const double hold_end = sched.segment_end(static_cast<std::size_t>(protocol::Segment::transfer_hold));
  const auto target =
      protocol::transfer_target(prep.init, protocol::detuning_phase(proto, hold_end, fall_end));

  CsvTable traj(trajectory_columns());
  stamp(traj, ctx, "transfer", &prep);
  traj.meta("fidelity_target", "transfer target at the end of the transfer stage");
  std::vector<double> t_us;
  std::vector<std::vector<double>> pops(6);
  for (std::size_t i = 0; i < report.trajectory.times.size(); ++i) {
    const double t = report.trajectory.times[i];
    const auto& rho = report.trajectory.states[i];
    traj.add_row(trajectory_row(t, sched.field(t), rho, target));
    t_us.push_back(t / units::micro);
    for (Eigen::Index k = 0; k < 6; ++k) pops[static_cast<std::size_t>(k)].push_back(rho(k, k).real());
  }
  std::filesystem::create_directories(ctx.out_dir);
  traj.write(ctx.out_dir / "transfer.csv");

  CsvTable leak({"time_s", "p_0F_p1N"});
  stamp(leak, ctx, "transfer", &prep);
  leak.meta("resolution", "every integrator step");
  output::Series leak_series{"p_0F_p1N", {}, {}};
  for (const auto& [t, v] : leakage) {
    leak.add_row(std::vector<double>{t, v});
    leak_series.x.push_back(t / units::micro);
    leak_series.y.push_back(v);
  }
  leak.write(ctx.out_dir / "transfer_leakage.csv");

  output::write_text(ctx.out_dir / "transfer_populations.svg",
                     output::render_svg(population_chart("Transfer stage populations", t_us, pops)));
  output::Chart leak_chart;
  leak_chart.title = "Population of |0_F, +1_N>";
  leak_chart.x_label = "time (us)";
  leak_chart.y_label = "population";
  leak_chart.log_y = true;
  leak_chart.series.push_back(leak_series);
  output::write_text(ctx.out_dir / "transfer_leakage.svg", output::render_svg(leak_chart));

  json s;
  s["command"] = "transfer";
  s["protocol"] = protocol_json(prep);
  s["f_transfer"] = report.f_transfer;
  s["max_leakage_0F_p1N"] = report.max_leakage;
  s["final_populations"] = json::object();
  const auto& last = report.trajectory.states.back();
  for (Eigen::Index k = 0; k < 6; ++k) s["final_populations"][basis_labels()[static_cast<std::size_t>(k)]] = last(k, k).real();
  finish(ctx, "transfer", s);
  say(ctx, "F(FQ->NV) = " + format_number(report.f_transfer) + ", max p(0F,+1N) = " + format_number(report.max_leakage));
  return 0;
}

int cmd_memory(const RunContext& ctx) {
  const auto prep = prepare(ctx);
  const auto report = protocol::run_protocol(prep.init, prep.proto, {.record = true});
  const auto sched = prep.proto.schedule();

  CsvTable stages({"stage", "start_s", "duration_s"});
  stamp(stages, ctx, "memory", &prep);
  stages.meta("f_transfer", format_number(report.f_transfer));
  stages.meta("f_storage", format_number(report.f_storage));
  stages.meta("f_retrieval", format_number(report.f_retrieval));
  stages.meta("phi_s_rad", format_number(report.phi_s.raw));
  stages.meta("phi_s_mod_2pi_rad", format_number(report.phi_s.wrapped));
  for (const auto& t : report.timing)
    stages.add_row({t.name, format_number(t.start), format_number(t.duration)});

  CsvTable fid({"checkpoint", "fidelity"});
  stamp(fid, ctx, "memory", &prep);
  fid.add_row({"FQ_to_NV", format_number(report.f_transfer)});
  fid.add_row({"storage", format_number(report.f_storage)});
  fid.add_row({"NV_to_FQ", format_number(report.f_retrieval)});

  CsvTable traj(trajectory_columns());
  stamp(traj, ctx, "memory", &prep);
  traj.meta("fidelity_target", "retrieval target with phi_s applied");
  const auto target = protocol::retrieval_target(prep.init, report.phi_s.raw);
  std::vector<double> t_us;
  std::vector<std::vector<double>> pops(6);
  for (std::size_t i = 0; i < report.trajectory.times.size(); ++i) {
    const double t = report.trajectory.times[i];
    const auto& rho = report.trajectory.states[i];
    traj.add_row(trajectory_row(t, sched.field(t), rho, target));
    t_us.push_back(t / units::micro);
    for (Eigen::Index k = 0; k < 6; ++k) pops[static_cast<std::size_t>(k)].push_back(rho(k, k).real());
  }

  std::filesystem::create_directories(ctx.out_dir);
  stages.write(ctx.out_dir / "memory_stages.csv");
  fid.write(ctx.out_dir / "memory_fidelity.csv");
  traj.write(ctx.out_dir / "memory_trajectory.csv");
  output::write_text(ctx.out_dir / "memory_populations.svg",
                     output::render_svg(population_chart("Memory protocol populations", t_us, pops)));

  json s;
  s["command"] = "memory";
  s["protocol"] = protocol_json(prep);
  s["f_transfer"] = report.f_transfer;
  s["f_storage"] = report.f_storage;
  s["f_retrieval"] = report.f_retrieval;
  s["phi_s_rad"] = report.phi_s.raw;
  s["phi_s_mod_2pi_rad"] = report.phi_s.wrapped;
  s["max_leakage_0F_p1N"] = report.max_leakage;
  s["checks"] = {{"monotone_degradation",
                  report.f_transfer >= report.f_storage && report.f_storage >= report.f_retrieval}};
  finish(ctx, "memory", s);
  say(ctx, "F(FQ->NV) = " + format_number(report.f_transfer) + ", F(storage) = " + format_number(report.f_storage) +
               ", F(NV->FQ) = " + format_number(report.f_retrieval));
  return 0;
}

int cmd_table(const RunContext& ctx, int which) {
  const auto prep = prepare(ctx, false);
  const protocol::TableOptions options{workers(ctx), ctx.cfg.flag("protocol.calibrate"),
                                       ctx.cfg.number("protocol.calibration_window")};
  const auto cells = protocol::run_table(which, prep.proto, options);
  const std::string name = "table" + std::to_string(which);

  std::vector<std::string> cols{"state", "g_hz", "nv_t2_s"};
  if (which == 1) {
    for (const auto* c : {"f_transfer", "f_storage", "f_retrieval", "ref_transfer", "ref_storage", "ref_retrieval",
                          "dev_transfer", "dev_storage", "dev_retrieval"})
      cols.emplace_back(c);
  } else {
    for (const auto* c : {"ramp", "rise_time_s", "f_transfer", "reference", "deviation"}) cols.emplace_back(c);
  }
  cols.emplace_back("tolerance");
  cols.emplace_back("pass");
  CsvTable table(cols);
  stamp(table, ctx, name, &prep);

  bool all_pass = true;
  double worst = 0.0;
  json rows = json::array();
  for (const auto& c : cells) {
    std::vector<std::string> r{"Phi_" + c.state, format_number(c.g_hz), format_number(c.nv_t2)};
    if (which == 2) {
      r.push_back(dynamics::to_string(c.ramp));
      r.push_back(format_number(c.rise_time));
    }
    for (double v : c.value) r.push_back(format_number(v));
    if (which == 1)
      for (double v : c.reference) r.push_back(format_number(v));
    else
      r.push_back(format_number(c.reference[0]));
    for (std::size_t i = 0; i < c.value.size(); ++i) r.push_back(format_number(c.value[i] - c.reference[i]));
    r.push_back(format_number(c.tolerance));
    r.emplace_back(c.within_tolerance() ? "true" : "false");
    table.add_row(r);
    all_pass = all_pass && c.within_tolerance();
    worst = std::max(worst, c.max_deviation());
    json jr{{"state", "Phi_" + c.state}, {"g_hz", c.g_hz}, {"nv_t2_s", c.nv_t2}};
    if (which == 2) {
      jr["ramp"] = dynamics::to_string(c.ramp);
      jr["rise_time_s"] = c.rise_time;
    }
    jr["value"] = c.value;
    jr["reference"] = c.reference;
    jr["pass"] = c.within_tolerance();
    rows.push_back(jr);
  }

  json s;
  s["command"] = name;
  s["protocol"] = protocol_json(prep);
  s["rows"] = rows;
  s["max_abs_deviation"] = worst;
  s["checks"] = {{"values_within_tolerance", all_pass}};
  if (which == 2) {
    const auto patterns = protocol::check_table2_patterns(cells);
    table.meta("exponential_ge_linear", patterns.exponential_ge_linear ? "true" : "false");
    table.meta("4ns_ge_10ns", patterns.short_ge_long ? "true" : "false");
    s["checks"]["exponential_ge_linear"] = patterns.exponential_ge_linear;
    s["checks"]["4ns_ge_10ns"] = patterns.short_ge_long;
    s["pattern_violations"] = patterns.violations;
    all_pass = all_pass && patterns.ok();
  }
  table.meta("max_abs_deviation", format_number(worst));
  std::filesystem::create_directories(ctx.out_dir);
  table.write(ctx.out_dir / (name + ".csv"));
  finish(ctx, name, s);
  say(ctx, name + ": " + std::to_string(cells.size()) + " rows, max |deviation| = " + format_number(worst) +
               (all_pass ? " (pass)" : " (FAIL)"));
  return all_pass ? 0 : 1;
}

int cmd_oracle(const RunContext& ctx) {
  const auto device = config::build_device(ctx.cfg);
  const auto m = config::build_oracle_model(ctx.cfg, device);
  const double duration = config::oracle_duration(ctx.cfg, m);
  oracle::OracleOptions opts;
  opts.checkpoints = static_cast<std::size_t>(ctx.cfg.integer("oracle.checkpoints"));
  const auto report = oracle::validate_swt(m, duration, ctx.cfg.number("oracle.dt_s"), opts);

  const double ratio = m.params.g_FY / (m.params.omega_F - m.params.omega_K);
  const double magnon_bound = 10.0 * ratio * ratio;

  CsvTable table({"time_s", "trace_distance", "magnon_population", "norm_deviation"});
  stamp(table, ctx, "oracle", nullptr);
  table.meta("n_max", std::to_string(m.n_max));
  table.meta("B_T", format_number(m.params.b_total()));
  table.meta("g_eff_hz", format_number(rad_to_hz(report.effective.g_minus)));
  table.meta("duration_s", format_number(duration));
  table.meta("max_trace_distance", format_number(report.max_trace_distance));
  table.meta("max_magnon_population", format_number(report.max_magnon_population));
  output::Series td{"trace distance", {}, {}};
  output::Series mag{"magnon population", {}, {}};
  for (const auto& smp : report.samples) {
    table.add_row(std::vector<double>{smp.time, smp.trace_distance, smp.magnon_population, smp.norm_deviation});
    td.x.push_back(smp.time / units::micro);
    td.y.push_back(smp.trace_distance);
    mag.x.push_back(smp.time / units::micro);
    mag.y.push_back(smp.magnon_population);
  }
  std::filesystem::create_directories(ctx.out_dir);
  table.write(ctx.out_dir / "oracle.csv");
  output::Chart chart;
  chart.title = "Full model vs effective model";
  chart.x_label = "time (us)";
  chart.y_label = "value";
  chart.series = {td, mag};
  output::write_text(ctx.out_dir / "oracle.svg", output::render_svg(chart));

  json s;
  s["command"] = "oracle";
  s["n_max"] = m.n_max;
  s["duration_s"] = duration;
  s["g_eff_hz"] = rad_to_hz(report.effective.g_minus);
  s["max_trace_distance"] = report.max_trace_distance;
  s["max_magnon_population"] = report.max_magnon_population;
  s["magnon_bound"] = magnon_bound;
  s["max_norm_deviation"] = report.max_norm_deviation;
  s["checks"] = {{"trace_distance_below_5e-2", report.max_trace_distance < 5e-2},
                 {"magnon_population_below_bound", report.max_magnon_population < magnon_bound},
                 {"norm_deviation_below_1e-9", report.max_norm_deviation < 1e-9}};
  finish(ctx, "oracle", s);
  say(ctx, "max trace distance = " + format_number(report.max_trace_distance) +
               ", max magnon population = " + format_number(report.max_magnon_population));
  return 0;
}

int cmd_ramp_plot(const RunContext& ctx) {
  const auto prep = prepare(ctx, false);
  const double rise = prep.proto.rise_time > 0.0 ? prep.proto.rise_time : 4e-9;
  const double b_res = prep.proto.effective.B_res;
  const double b_off = prep.proto.b_off;

  CsvTable table({"time_s", "linear_delta_B_T", "exponential_delta_B_T"});
  stamp(table, ctx, "ramp-plot", &prep);
  table.meta("rise_time_s", format_number(rise));
  dynamics::FieldSegment lin{dynamics::RampProfile::linear, rise, b_off, b_res, prep.proto.tau_fraction};
  dynamics::FieldSegment expo{dynamics::RampProfile::exponential, rise, b_off, b_res, prep.proto.tau_fraction};
  output::Series sl{"linear", {}, {}};
  output::Series se{"exponential", {}, {}};
  constexpr int points = 201;
  for (int i = 0; i < points; ++i) {
    const double t = rise * i / (points - 1);
    const double dl = lin.field(t) - b_off;
    const double de = expo.field(t) - b_off;
    table.add_row(std::vector<double>{t, dl, de});
    sl.x.push_back(t / units::nano);
    sl.y.push_back(dl / units::gauss);
    se.x.push_back(t / units::nano);
    se.y.push_back(de / units::gauss);
  }
  std::filesystem::create_directories(ctx.out_dir);
  table.write(ctx.out_dir / "ramp_profile.csv");
  output::Chart chart;
  chart.title = "Field ramp from the storage field to B_res";
  chart.x_label = "time (ns)";
  chart.y_label = "delta B (G)";
  chart.series = {sl, se};
  output::write_text(ctx.out_dir / "ramp_profile.svg", output::render_svg(chart));

  json s;
  s["command"] = "ramp-plot";
  s["rise_time_s"] = rise;
  s["delta_B_T"] = b_res - b_off;
  s["tau_fraction"] = prep.proto.tau_fraction;
  finish(ctx, "ramp-plot", s);
  say(ctx, "ramp profile over " + format_number(rise) + " s written");
  return 0;
}

std::vector<double> sweep_values(const std::string& list, double from, double to, std::size_t points) {
  std::vector<double> values;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used == 0 || used != item.size()) throw config::ConfigError("invalid sweep value '" + item + "'");
      values.push_back(v);
    }
    return values;
  }
  if (points == 0) throw config::ConfigError("sweep needs --values or --points > 0");
  if (points == 1) return {from};
  for (std::size_t i = 0; i < points; ++i)
    values.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1));
  return values;
}

int cmd_sweep(const RunContext& ctx, const SweepSpec& spec) {
  if (spec.values.empty()) throw config::ConfigError("sweep has no points");
  {
    config::Config probe = ctx.cfg;
    probe.set(spec.axis, format_number(spec.values.front()));  // rejects unknown axes early
  }

  struct Point {
    double value = 0.0;
    protocol::StageReport report;
    double hold = 0.0;
  };
  std::vector<Point> points(spec.values.size());
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        RunContext local{ctx.cfg, ctx.out_dir, nullptr};
        local.cfg.set(spec.axis, format_number(spec.values[i]));
        const auto prep = prepare(local);
        points[i].value = spec.values[i];
        points[i].report = protocol::run_protocol(prep.init, prep.proto);
        points[i].hold = prep.proto.transfer_hold;
      },
      std::min(workers(ctx), points.size()));
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.value < b.value; });

  CsvTable table({spec.axis, "f_transfer", "f_storage", "f_retrieval", "phi_s_mod_2pi_rad", "transfer_hold_s"});
  stamp(table, ctx, "sweep", nullptr);
  table.meta("axis", spec.axis);
  output::Series st{"F(FQ->NV)", {}, {}}, ss{"F(storage)", {}, {}}, sr{"F(NV->FQ)", {}, {}};
  json rows = json::array();
  for (const auto& p : points) {
    table.add_row(std::vector<double>{p.value, p.report.f_transfer, p.report.f_storage, p.report.f_retrieval,
                                      p.report.phi_s.wrapped, p.hold});
    st.x.push_back(p.value);
    st.y.push_back(p.report.f_transfer);
    ss.x.push_back(p.value);
    ss.y.push_back(p.report.f_storage);
    sr.x.push_back(p.value);
    sr.y.push_back(p.report.f_retrieval);
    rows.push_back({{"value", p.value},
                    {"f_transfer", p.report.f_transfer},
                    {"f_storage", p.report.f_storage},
                    {"f_retrieval", p.report.f_retrieval}});
  }
  std::filesystem::create_directories(ctx.out_dir);
  table.write(ctx.out_dir / "sweep.csv");
  output::Chart chart;
  chart.title = "Sweep of " + spec.axis;
  chart.x_label = spec.axis;
  chart.y_label = "fidelity";
  chart.series = {st, ss, sr};
  output::write_text(ctx.out_dir / "sweep.svg", output::render_svg(chart));

  json s;
  s["command"] = "sweep";
  s["axis"] = spec.axis;
  s["rows"] = rows;
  finish(ctx, "sweep", s);
  say(ctx, "sweep over " + spec.axis + ": " + std::to_string(points.size()) + " points");
  return 0;
}

}  // namespace hqm::cli
