#pragma once

// Brute-force check of the effective model: the full FQ (x) Kittel-mode
// (x) NV Hamiltonian on a truncated Fock space, evolved unitarily and
// compared, after tracing out the magnon, with the 6-level effective model.
//
// Full-space basis index = (fq * (n_max + 1) + n) * 3 + nv.

#include <optional>
#include <vector>

#include "hqm/effective_model.hpp"
#include "hqm/linalg.hpp"

namespace hqm::oracle {

struct FullModel {
  std::size_t n_max = 3;
  model::PhysicalParams params;

  HilbertSpace space() const;  // [2, n_max + 1, 3]
  void validate() const;       // n_max >= 2
};

/// 1/2 omega_F sz + omega_K a^+a + sum_j (omega_(j) + delta_YN)|j><j|
///  - g_FY (s+ a + h.c.) - g_YN (a^+ S-(-1) + a^+ S-(+1) + h.c.)
ComplexMatrix build_full_hamiltonian(const FullModel& m);

ComplexMatrix magnon_number(const FullModel& m);
/// FQ excitation + magnon number + NV excitation (|+-1> count as one).
ComplexMatrix full_excitation_number(const FullModel& m);

/// psi_mem (6-dim FQ (x) NV) joined with the magnon vacuum.
ComplexVector embed_memory_state(const FullModel& m, const ComplexVector& psi_mem);

struct OracleSample {
  double time = 0.0;
  double trace_distance = 0.0;
  double magnon_population = 0.0;
  double norm_deviation = 0.0;
};

struct OracleReport {
  double max_trace_distance = 0.0;
  double max_magnon_population = 0.0;
  double max_norm_deviation = 0.0;
  double max_phase_per_step = 0.0;  // dt * max |eigenvalue of H|
  model::EffectiveParams effective;
  std::vector<OracleSample> samples;
};

struct OracleOptions {
  std::size_t checkpoints = 200;
  /// Initial FQ (x) NV state; defaults to |1_F, 0_N>.
  std::optional<ComplexVector> initial_state;
};

/// Evolves both models in the lab frame and returns the largest trace
/// distance between the reduced full state and the effective state over
/// evenly spaced checkpoints. Throws std::invalid_argument when
/// dt * max|eigenvalue| > 0.1.
OracleReport validate_swt(const FullModel& m, double duration, double dt, const OracleOptions& options = {});

}  // namespace hqm::oracle
