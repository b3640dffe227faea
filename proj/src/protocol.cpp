#include "hqm/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hqm/parallel.hpp"
#include "hqm/units.hpp"

namespace hqm::protocol {

using dynamics::RampProfile;
using model::Transition;

ComplexVector InitialState::vector() const {
  return std::cos(theta) * model::basis_state(1, model::nv_zero) +
         std::polar(std::sin(theta), phi) * model::basis_state(0, model::nv_zero);
}

const std::vector<std::string>& InitialState::names() {
  static const std::vector<std::string> all{"1", "1/2", "1/3", "1/4", "1/5", "0"};
  return all;
}

InitialState InitialState::named(const std::string& name) {
  InitialState s;
  s.label = name;
  if (name == "1") s.theta = 0.0;
  else if (name == "0") s.theta = units::pi / 2.0;
  else if (name == "1/2") s.theta = std::asin(std::sqrt(1.0 / 2.0));
  else if (name == "1/3") s.theta = std::asin(std::sqrt(1.0 / 3.0));
  else if (name == "1/4") s.theta = std::asin(std::sqrt(1.0 / 4.0));
  else if (name == "1/5") s.theta = std::asin(std::sqrt(1.0 / 5.0));
  else throw std::invalid_argument("unknown initial state '" + name + "' (expected 1, 1/2, 1/3, 1/4, 1/5 or 0)");
  return s;
}

double MemoryProtocol::nominal_hold() const {
  if (effective.g_minus == 0.0) throw std::invalid_argument("nominal hold undefined for g_(-1) = 0");
  return units::pi / (2.0 * std::abs(effective.g_minus));
}

void MemoryProtocol::set_coupling(double g_minus) {
  if (effective.g_minus != 0.0) effective.g_plus *= g_minus / effective.g_minus;
  effective.g_minus = g_minus;
  if (g_minus == 0.0) return;  // no nominal hold; callers must set one
  transfer_hold = nominal_hold();
  retrieval_hold = transfer_hold;
}

namespace {

dynamics::DecoherenceRates rates_for(const StageLifetimes& l, dynamics::RateConvention c) {
  dynamics::DecoherenceRates r;
  r.fq = dynamics::rates_from_lifetimes(l.fq.t1, l.fq.t2, c);
  r.nv_minus = dynamics::rates_from_lifetimes(l.nv.t1, l.nv.t2, c);
  r.nv_plus = r.nv_minus;
  return r;
}

}  // namespace

dynamics::DecoherenceRates MemoryProtocol::transfer_rates() const { return rates_for(transfer_lifetimes, convention); }
dynamics::DecoherenceRates MemoryProtocol::storage_rates() const { return rates_for(storage_lifetimes, convention); }

dynamics::FieldSchedule MemoryProtocol::schedule() const {
  const double b_res = effective.B_res;
  auto ramp_segment = [&](double from, double to) {
    dynamics::FieldSegment s;
    s.profile = rise_time > 0.0 ? ramp : RampProfile::step;
    s.duration = rise_time > 0.0 ? rise_time : 0.0;
    s.b_start = from;
    s.b_end = to;
    s.tau_fraction = tau_fraction;
    return s;
  };
  auto hold = [](double duration, double b) {
    dynamics::FieldSegment s;
    s.profile = RampProfile::step;
    s.duration = duration;
    s.b_start = b;
    s.b_end = b;
    return s;
  };
  return dynamics::FieldSchedule({ramp_segment(b_off, b_res), hold(transfer_hold, b_res), ramp_segment(b_res, b_off),
                                  hold(storage_time, b_off), ramp_segment(b_off, b_res), hold(retrieval_hold, b_res),
                                  ramp_segment(b_res, b_off)});
}

void MemoryProtocol::validate() const {
  if (!(transfer_hold > 0.0) || !std::isfinite(transfer_hold)) throw std::invalid_argument("transfer hold must be positive");
  if (!(retrieval_hold > 0.0) || !std::isfinite(retrieval_hold))
    throw std::invalid_argument("retrieval hold must be positive");
  if (!(storage_time >= 0.0)) throw std::invalid_argument("storage time must be non-negative");
  if (!(rise_time >= 0.0)) throw std::invalid_argument("rise time must be non-negative");
  if (storage_time > 0.0 && effective.g_minus != 0.0) {
    const double detuning = std::abs(effective.field_detuning(Transition::minus, b_off));
    if (detuning < 100.0 * std::abs(effective.g_minus))
      throw std::invalid_argument("storage field is not off-resonant: |delta_B,(-1)| < 100 g_(-1)");
  }
}

double detuning_phase(const MemoryProtocol& proto, double t0, double t1) {
  return proto.effective.gamma_e * proto.schedule().field_integral(t0, t1, proto.effective.B_res);
}

PhaseCorrection phase_correction(const MemoryProtocol& proto) {
  const auto sched = proto.schedule();
  const double from = sched.segment_end(static_cast<std::size_t>(Segment::transfer_hold));
  const double to = sched.segment_start(static_cast<std::size_t>(Segment::retrieval_hold));
  PhaseCorrection p;
  p.raw = proto.effective.gamma_e * sched.field_integral(from, to, proto.effective.B_res);
  p.wrapped = std::fmod(p.raw, units::two_pi);
  if (p.wrapped < 0.0) p.wrapped += units::two_pi;
  return p;
}

ComplexVector transfer_target(const InitialState& init, double phase) {
  const complex minus_i{0.0, -1.0};
  return minus_i * std::polar(std::cos(init.theta), -phase) * model::basis_state(0, model::nv_minus) +
         std::polar(std::sin(init.theta), init.phi) * model::basis_state(0, model::nv_zero);
}

ComplexVector retrieval_target(const InitialState& init, double phi_s) {
  return -std::polar(std::cos(init.theta), -phi_s) * model::basis_state(1, model::nv_zero) +
         std::polar(std::sin(init.theta), init.phi) * model::basis_state(0, model::nv_zero);
}

namespace {

const char* segment_name(std::size_t i) {
  static constexpr std::array<const char*, 7> names{"rise", "transfer_hold", "fall", "storage",
                                                    "rise", "retrieval_hold", "fall"};
  return names.at(i);
}

class Runner {
 public:
  Runner(const InitialState& init, const MemoryProtocol& proto, const RunOptions& options)
      : init_(init), proto_(proto), options_(options), sched_(proto.schedule()) {}

  StageReport run() {
    proto_.validate();
    const auto space = model::memory_space();
    dynamics::DensityMatrix rho = dynamics::DensityMatrix::pure(space, init_.vector());

    report_.transfer_hold = proto_.transfer_hold;
    report_.retrieval_hold = proto_.retrieval_hold;
    for (std::size_t i = 0; i < sched_.segments().size(); ++i)
      report_.timing.push_back({segment_name(i), sched_.segment_start(i), sched_.segments()[i].duration});
    if (options_.record) {
      report_.trajectory.times.push_back(0.0);
      report_.trajectory.states.push_back(rho.matrix());
    }

    const auto transfer_dissipators = proto_.transfer_rates().dissipators();
    const double hold_end = sched_.segment_end(seg(Segment::transfer_hold));

    for (auto s : {Segment::rise_1, Segment::transfer_hold, Segment::fall_1})
      rho = integrate_segment(rho, seg(s), transfer_dissipators, true);
    const double phase_transfer = proto_.effective.gamma_e *
                                  sched_.field_integral(hold_end, sched_.segment_end(seg(Segment::fall_1)),
                                                        proto_.effective.B_res);
    report_.f_transfer = dynamics::fidelity(rho, transfer_target(init_, phase_transfer));
    report_.phi_s = phase_correction(proto_);
    if (options_.transfer_only) return finish();

    rho = store(rho);
    const double phase_storage = proto_.effective.gamma_e *
                                 sched_.field_integral(hold_end, sched_.segment_end(seg(Segment::storage_hold)),
                                                       proto_.effective.B_res);
    report_.f_storage = dynamics::fidelity(rho, transfer_target(init_, phase_storage));

    for (auto s : {Segment::rise_2, Segment::retrieval_hold, Segment::fall_2})
      rho = integrate_segment(rho, seg(s), transfer_dissipators, false);
    report_.f_retrieval = dynamics::fidelity(rho, retrieval_target(init_, report_.phi_s.raw));
    return finish();
  }

 private:
  static std::size_t seg(Segment s) { return static_cast<std::size_t>(s); }

  StageReport finish() {
    report_.physicality.max_trace_drift_per_us =
        integrated_us_ > 0.0 ? max_trace_error_ / integrated_us_ : max_trace_error_;
    return std::move(report_);
  }

  void absorb_stats(const dynamics::Trajectory& traj, double duration) {
    integrated_us_ += duration / units::micro;
    max_trace_error_ = std::max(max_trace_error_, traj.max_trace_error);
    report_.physicality.max_hermiticity_error =
        std::max(report_.physicality.max_hermiticity_error, traj.max_hermiticity_error);
    report_.physicality.min_eigenvalue = std::min(report_.physicality.min_eigenvalue, traj.min_eigenvalue);
  }

  dynamics::DensityMatrix integrate_segment(const dynamics::DensityMatrix& rho, std::size_t index,
                                            const std::vector<Dissipator>& dissipators, bool track_leakage) {
    const auto& segment = sched_.segments()[index];
    if (segment.duration <= 0.0) return rho;
    const double start = sched_.segment_start(index);
    const auto& e = proto_.effective;
    const bool keep = proto_.keep_counter_rotating;
    dynamics::HamiltonianFn h = [&segment, &e, start, keep](double t) {
      const double s = std::clamp(t - start, 0.0, segment.duration);
      return model::build_h_int(t, segment.field(s), e, keep);
    };

    auto opts = proto_.integrator;
    opts.start_time = start;
    opts.store_states = options_.record;
    if (track_leakage) {
      const auto leak_index = static_cast<Eigen::Index>(model::nv_plus);  // |0_F, +1_N>
      auto& leak = report_.max_leakage;
      auto outer = opts.observer;
      opts.observer = [&leak, leak_index, outer](double t, const ComplexMatrix& r) {
        leak = std::max(leak, r(leak_index, leak_index).real());
        if (outer) outer(t, r);
      };
    }
    auto traj = dynamics::integrate(rho, h, dissipators, segment.duration, opts);
    absorb_stats(traj, segment.duration);
    auto out = traj.final_state(rho.space());
    if (options_.record) {
      for (std::size_t i = 1; i < traj.times.size(); ++i) {
        report_.trajectory.times.push_back(traj.times[i]);
        report_.trajectory.states.push_back(std::move(traj.states[i]));
      }
    }
    return out;
  }

  dynamics::DensityMatrix store(const dynamics::DensityMatrix& rho) {
    const std::size_t index = seg(Segment::storage_hold);
    const auto& segment = sched_.segments()[index];
    if (segment.duration <= 0.0) return rho;
    model::EffectiveParams e = proto_.effective;
    if (!proto_.storage_coupling) {
      e.g_minus = 0.0;
      e.g_plus = 0.0;
    }
    // The g_(+1) term is explicitly time dependent and is dropped here.
    const ComplexMatrix h = model::build_h_int(0.0, segment.b_end, e, false);
    auto out = dynamics::propagate_static(rho, h, proto_.storage_rates().dissipators(), segment.duration);
    max_trace_error_ = std::max(max_trace_error_, std::abs(out.trace() - 1.0));
    integrated_us_ += segment.duration / units::micro;
    report_.physicality.min_eigenvalue = std::min(report_.physicality.min_eigenvalue, min_eigenvalue(out.matrix()));
    if (options_.record) {
      report_.trajectory.times.push_back(sched_.segment_end(index));
      report_.trajectory.states.push_back(out.matrix());
    }
    return out;
  }

  const InitialState& init_;
  const MemoryProtocol& proto_;
  RunOptions options_;
  dynamics::FieldSchedule sched_;
  StageReport report_;
  double integrated_us_ = 0.0;
  double max_trace_error_ = 0.0;
};

}  // namespace

StageReport run_protocol(const InitialState& init, const MemoryProtocol& proto, const RunOptions& options) {
  return Runner(init, proto, options).run();
}

CalibrationResult calibrate_transfer_time(const InitialState& init, const MemoryProtocol& proto, double window) {
  if (!(window > 0.0) || window >= 1.0) throw std::invalid_argument("calibration window must lie in (0, 1)");
  constexpr double tolerance = 0.1e-9;
  const double t1 = proto.nominal_hold();

  CalibrationResult result;
  auto objective = [&](double hold) {
    MemoryProtocol p = proto;
    p.transfer_hold = hold;
    ++result.evaluations;
    return run_protocol(init, p, {.transfer_only = true}).f_transfer;
  };

  const double lo = t1 * (1.0 - window);
  const double hi = t1 * (1.0 + window);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  result.hold = fc >= fd ? c : d;
  result.fidelity = std::max(fc, fd);
  result.nominal_fidelity = objective(t1);
  if (result.nominal_fidelity > result.fidelity) {
    result.hold = t1;
    result.fidelity = result.nominal_fidelity;
  }
  result.at_boundary = result.hold - lo < 2.0 * tolerance || hi - result.hold < 2.0 * tolerance;
  return result;
}

double TableCell::max_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < value.size() && i < reference.size(); ++i)
    worst = std::max(worst, std::abs(value[i] - reference[i]));
  return worst;
}

namespace {

struct RowKey {
  const char* state;
  double g_hz;
  double nv_t2;
};

constexpr std::array<RowKey, 8> table_rows{{{"1/2", 700e3, 90e-6},
                                            {"1/2", 700e3, 20e-6},
                                            {"1/2", 350e3, 90e-6},
                                            {"1/2", 350e3, 20e-6},
                                            {"1", 700e3, 90e-6},
                                            {"1", 700e3, 20e-6},
                                            {"1", 350e3, 90e-6},
                                            {"1", 350e3, 20e-6}}};

// Transfer, storage, retrieval.
constexpr std::array<std::array<double, 3>, 8> table1_reference{{{0.9689, 0.9598, 0.9318},
                                                                 {0.9627, 0.9548, 0.9218},
                                                                 {0.9421, 0.9363, 0.8880},
                                                                 {0.9307, 0.9270, 0.8709},
                                                                 {0.9317, 0.9284, 0.8653},
                                                                 {0.9268, 0.9239, 0.8562},
                                                                 {0.8695, 0.8668, 0.7537},
                                                                 {0.8608, 0.8581, 0.7386}}};

// Exponential 4 ns, exponential 10 ns, linear 4 ns, linear 10 ns.
constexpr std::array<std::array<double, 4>, 8> table2_reference{{{0.9677, 0.9647, 0.9672, 0.9639},
                                                                 {0.9613, 0.9581, 0.9608, 0.9573},
                                                                 {0.9412, 0.9395, 0.9410, 0.9392},
                                                                 {0.9296, 0.9278, 0.9295, 0.9275},
                                                                 {0.9294, 0.9241, 0.9288, 0.9228},
                                                                 {0.9246, 0.9193, 0.9240, 0.9180},
                                                                 {0.8678, 0.8648, 0.8677, 0.8646},
                                                                 {0.8591, 0.8561, 0.8590, 0.8559}}};

}  // namespace

std::vector<TableCell> run_table(int which, const MemoryProtocol& base, const TableOptions& options) {
  if (which != 1 && which != 2) throw std::invalid_argument("table must be 1 or 2");
  std::vector<TableCell> cells;
  for (std::size_t r = 0; r < table_rows.size(); ++r) {
    const auto& row = table_rows[r];
    TableCell cell;
    cell.table = which;
    cell.state = row.state;
    cell.g_hz = row.g_hz;
    cell.nv_t2 = row.nv_t2;
    if (which == 1) {
      cell.reference.assign(table1_reference[r].begin(), table1_reference[r].end());
      cell.tolerance = cell.state == "1/2" ? 0.010 : 0.015;
      cells.push_back(cell);
      continue;
    }
    cell.tolerance = 0.010;
    std::size_t k = 0;
    for (auto ramp : {RampProfile::exponential, RampProfile::linear}) {
      for (double rise : {4e-9, 10e-9}) {
        TableCell c = cell;
        c.ramp = ramp;
        c.rise_time = rise;
        c.reference = {table2_reference[r][k++]};
        cells.push_back(c);
      }
    }
  }

  parallel_for(
      cells.size(),
      [&](std::size_t i) {
        auto& cell = cells[i];
        MemoryProtocol p = base;
        p.set_coupling(units::hz_to_rad(cell.g_hz));
        p.transfer_lifetimes.nv.t2 = cell.nv_t2;
        p.ramp = cell.ramp;
        p.rise_time = cell.rise_time;
        const auto init = InitialState::named(cell.state);
        if (options.calibrate) {
          const auto cal = calibrate_transfer_time(init, p, options.calibration_window);
          p.transfer_hold = cal.hold;
          p.retrieval_hold = cal.hold;
        }
        cell.report = run_protocol(init, p, {.transfer_only = which == 2});
        if (which == 1)
          cell.value = {cell.report.f_transfer, cell.report.f_storage, cell.report.f_retrieval};
        else
          cell.value = {cell.report.f_transfer};
      },
      options.workers == 0 ? default_worker_count() : options.workers);
  return cells;
}

PatternCheck check_table2_patterns(const std::vector<TableCell>& cells) {
  PatternCheck check;
  auto find = [&](const TableCell& like, RampProfile ramp, double rise) -> const TableCell* {
    for (const auto& c : cells)
      if (c.table == 2 && c.state == like.state && c.g_hz == like.g_hz && c.nv_t2 == like.nv_t2 && c.ramp == ramp &&
          c.rise_time == rise)
        return &c;
    return nullptr;
  };
  auto describe = [](const TableCell& c) {
    return "Phi_" + c.state + " " + std::to_string(static_cast<int>(c.g_hz / 1e3)) + " kHz " +
           std::to_string(static_cast<int>(std::lround(c.nv_t2 * 1e6))) + " us";
  };
  for (const auto& c : cells) {
    if (c.table != 2 || c.value.empty()) continue;
    if (c.ramp == RampProfile::exponential) {
      const auto* lin = find(c, RampProfile::linear, c.rise_time);
      if (lin && !lin->value.empty() && c.value[0] < lin->value[0]) {
        check.exponential_ge_linear = false;
        check.violations.push_back(describe(c) + ": exponential < linear at " +
                                   std::to_string(static_cast<int>(std::lround(c.rise_time * 1e9))) + " ns");
      }
    }
    if (c.rise_time == 4e-9) {
      const auto* slow = find(c, c.ramp, 10e-9);
      if (slow && !slow->value.empty() && c.value[0] < slow->value[0]) {
        check.short_ge_long = false;
        check.violations.push_back(describe(c) + ": 4 ns < 10 ns for " + dynamics::to_string(c.ramp));
      }
    }
  }
  return check;
}

}  // namespace hqm::protocol
