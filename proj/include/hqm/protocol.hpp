#pragma once

// Write / store / read protocol on the FQ (x) NV effective model.
//
// Seven field segments: rise, transfer hold, fall, storage hold, rise,
// retrieval hold, fall. Ramped and held segments are integrated with RK4 in
// the interaction picture; the storage hold is propagated in closed form.

#include <optional>
#include <string>
#include <vector>

#include "hqm/dynamics.hpp"
#include "hqm/effective_model.hpp"

namespace hqm::protocol {

/// cos(theta)|1_F> + e^{i phi} sin(theta)|0_F>, joined with |0_N>.
struct InitialState {
  double theta = 0.0;
  double phi = 0.0;
  std::string label;

  ComplexVector vector() const;

  /// "1", "1/2", "1/3", "1/4", "1/5", "0": Phi_x carries weight x on
  /// |0_F, 0_N>, except Phi_1 = |1_F, 0_N>.
  static InitialState named(const std::string& name);
  static const std::vector<std::string>& names();
};

struct Lifetimes {
  double t1 = 0.0;  // s
  double t2 = 0.0;  // s
};

struct StageLifetimes {
  Lifetimes fq;
  Lifetimes nv;  // applied to both |+-1> transitions
};

struct MemoryProtocol {
  model::EffectiveParams effective;
  double b_off = 0.0;  // storage field, T

  dynamics::RampProfile ramp = dynamics::RampProfile::step;
  double rise_time = 0.0;  // s, each ramp
  double tau_fraction = 1.0 / 3.0;

  double transfer_hold = 0.0;   // s
  double retrieval_hold = 0.0;  // s
  double storage_time = 10e-3;  // s

  bool storage_coupling = false;  // keep the flip-flop terms on during storage
  bool keep_counter_rotating = true;

  dynamics::RateConvention convention = dynamics::RateConvention::cyclic;
  StageLifetimes transfer_lifetimes{{10e-6, 10e-6}, {6e-3, 90e-6}};
  StageLifetimes storage_lifetimes{{10e-6, 10e-6}, {10.0, 0.6}};

  dynamics::IntegratorOptions integrator{};

  /// pi / (2 g_(-1)).
  double nominal_hold() const;
  /// Sets g_(-1) (rad/s), scales g_(+1) by the same factor and resets both
  /// holds to the nominal value (holds are left alone for g_(-1) = 0).
  void set_coupling(double g_minus);

  dynamics::DecoherenceRates transfer_rates() const;
  dynamics::DecoherenceRates storage_rates() const;

  dynamics::FieldSchedule schedule() const;
  void validate() const;
};

enum class Segment : std::size_t {
  rise_1 = 0,
  transfer_hold,
  fall_1,
  storage_hold,
  rise_2,
  retrieval_hold,
  fall_2,
};

/// Integral of delta_B,(-1)(t) = gamma_e (B(t) - B_res) between two
/// schedule times.
double detuning_phase(const MemoryProtocol& proto, double t0, double t1);

struct PhaseCorrection {
  double raw = 0.0;         // rad
  double wrapped = 0.0;     // rad, in [0, 2 pi)
};

/// phi_s accumulated from the end of the transfer hold to the start of the
/// retrieval hold (fall, storage, rise).
PhaseCorrection phase_correction(const MemoryProtocol& proto);

struct StageTiming {
  std::string name;
  double start = 0.0;
  double duration = 0.0;
};

struct PhysicalityStats {
  double max_trace_drift_per_us = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
};

struct StageReport {
  double f_transfer = 0.0;
  double f_storage = 0.0;
  double f_retrieval = 0.0;
  PhaseCorrection phi_s;
  double max_leakage = 0.0;  // max population of |0_F, +1_N> during the transfer stage
  double transfer_hold = 0.0;
  double retrieval_hold = 0.0;
  std::vector<StageTiming> timing;
  PhysicalityStats physicality;
  dynamics::Trajectory trajectory;  // filled when RunOptions::record is set
};

struct RunOptions {
  bool transfer_only = false;  // stop after the first fall
  bool record = false;         // keep every stride-th state of the integrated segments
};

StageReport run_protocol(const InitialState& init, const MemoryProtocol& proto, const RunOptions& options = {});

/// Interaction-picture target after the transfer stage, with the |-1_N>
/// amplitude rotated by exp(-i phase).
ComplexVector transfer_target(const InitialState& init, double phase);
/// Target after retrieval, with the known storage phase applied.
ComplexVector retrieval_target(const InitialState& init, double phi_s);

struct CalibrationResult {
  double hold = 0.0;
  double fidelity = 0.0;
  double nominal_fidelity = 0.0;
  bool at_boundary = false;
  int evaluations = 0;
};

/// Golden-section maximization of the transfer fidelity over the hold time in
/// [t1 (1 - window), t1 (1 + window)], tolerance 0.1 ns.
CalibrationResult calibrate_transfer_time(const InitialState& init, const MemoryProtocol& proto, double window);

struct TableCell {
  int table = 1;
  std::string state;
  double g_hz = 0.0;
  double nv_t2 = 0.0;
  dynamics::RampProfile ramp = dynamics::RampProfile::step;
  double rise_time = 0.0;
  /// Table 1: transfer, storage, retrieval. Table 2: transfer only.
  std::vector<double> value;
  std::vector<double> reference;
  double tolerance = 0.0;
  StageReport report;

  double max_deviation() const;
  bool within_tolerance() const { return max_deviation() <= tolerance; }
};

struct TableOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  bool calibrate = false;   // optimize each cell's hold time first
  double calibration_window = 0.05;
};

/// Table 1: {Phi_1/2, Phi_1} x {700, 350 kHz} x {90, 20 us}, step ramps.
/// Table 2: same grid x {exponential, linear} x {4, 10 ns}, transfer only.
/// Cells run in parallel; output order is fixed.
std::vector<TableCell> run_table(int which, const MemoryProtocol& base, const TableOptions& options = {});

struct PatternCheck {
  bool exponential_ge_linear = true;
  bool short_ge_long = true;
  std::vector<std::string> violations;

  bool ok() const { return exponential_ge_linear && short_ge_long; }
};

/// Table 2 orderings: exponential >= linear at equal rise time, and
/// 4 ns >= 10 ns at equal ramp shape, for every matched row.
PatternCheck check_table2_patterns(const std::vector<TableCell>& cells);

}  // namespace hqm::protocol
