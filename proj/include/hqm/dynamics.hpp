#pragma once

// Lindblad master-equation engine: fixed-step RK4 for time-dependent
// Hamiltonians, Liouvillian exponentiation for static intervals, and the
// state fidelity F = sqrt(<psi|rho|psi>).

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqm/linalg.hpp"

namespace hqm::dynamics {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateTolerances {
  double hermiticity = 1e-9;
  double trace = 1e-9;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
 public:
  /// Throws std::invalid_argument unless the matrix is Hermitian, unit-trace
  /// and positive semidefinite within `tol`.
  DensityMatrix(HilbertSpace space, ComplexMatrix matrix, StateTolerances tol = {});

  static DensityMatrix pure(HilbertSpace space, const ComplexVector& psi);
  static DensityMatrix maximally_mixed(HilbertSpace space);

  const HilbertSpace& space() const { return space_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }
  double purity() const { return (matrix_ * matrix_).trace().real(); }
  double population(std::size_t index) const {
    return matrix_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)).real();
  }

 private:
  HilbertSpace space_;
  ComplexMatrix matrix_;
};

/// Spontaneous decay and pure dephasing of one two-level channel.
/// Populations relax at `decay`; the coherence decays at decay / 2 + dephasing.
struct QubitRates {
  double decay = 0.0;      // gamma^(s), 1/s
  double dephasing = 0.0;  // gamma^(p), 1/s

  double t1() const;
  double t2() const;
};

/// How quoted (T1, T2) lifetimes become dissipator rates.
///  exact:  populations relax at 1/T1 and coherences at 1/T2.
///  cyclic: the lifetimes are read as cyclic frequencies, i.e. decay rate
///          2 pi / T1 on the lowering operator and 2 pi / T2 on the
///          excited-state projector (coherence decay pi / T1 + pi / T2).
enum class RateConvention { exact, cyclic };

RateConvention parse_rate_convention(const std::string& name);
std::string to_string(RateConvention c);

/// Exact conversion: gamma^(s) = 1 / T1, gamma^(p) = 1 / T2 - 1 / (2 T1).
/// Requires 0 < T2 <= 2 T1 (T1 may be +infinity).
QubitRates rates_from_t1_t2(double t1, double t2);

/// Lifetimes that reproduce `convention` under the exact conversion.
std::pair<double, double> effective_lifetimes(double t1, double t2, RateConvention convention);
QubitRates rates_from_lifetimes(double t1, double t2, RateConvention convention);

/// Dissipators of a standalone two-level system (|0> ground, |1> excited).
std::vector<Dissipator> qubit_dissipators(const QubitRates& r);

struct RateChannel {
  std::string tag;
  double rate = 0.0;
};

/// Channels of the FQ (x) NV memory model.
struct DecoherenceRates {
  QubitRates fq;
  QubitRates nv_minus;
  QubitRates nv_plus;

  std::vector<Dissipator> dissipators() const;
  std::vector<RateChannel> channels() const;
};

enum class RampProfile { step, linear, exponential };

RampProfile parse_ramp_profile(const std::string& name);
std::string to_string(RampProfile p);

struct FieldSegment {
  RampProfile profile = RampProfile::step;
  double duration = 0.0;  // s
  double b_start = 0.0;   // T
  double b_end = 0.0;     // T
  /// Exponential time constant as a fraction of the segment duration.
  double tau_fraction = 1.0 / 3.0;

  /// Field at offset s in [0, duration].
  double field(double s) const;
  /// Integral of the field over [0, s].
  double field_integral(double s) const;
};

/// Piecewise B(t). Exponential segments are normalized to land exactly on
/// b_end, so linear and exponential ramps are continuous at both ends.
class FieldSchedule {
 public:
  FieldSchedule() = default;
  explicit FieldSchedule(std::vector<FieldSegment> segments);

  const std::vector<FieldSegment>& segments() const { return segments_; }
  double total_duration() const;
  double segment_start(std::size_t index) const;
  double segment_end(std::size_t index) const { return segment_start(index) + segments_.at(index).duration; }
  double field(double t) const;
  /// Integral of (B(t') - b_ref) over [t0, t1].
  double field_integral(double t0, double t1, double b_ref) const;

 private:
  std::vector<FieldSegment> segments_;
};

using HamiltonianFn = std::function<ComplexMatrix(double t)>;
using Observer = std::function<void(double t, const ComplexMatrix& rho)>;

struct IntegratorOptions {
  double dt = 0.05e-9;
  std::size_t stride = 1;  // store every `stride`-th step (the final state always)
  double start_time = 0.0; // absolute time of rho0, passed to the Hamiltonian
  bool check_invariants = true;
  StateTolerances tolerances{};
  double max_phase_per_step = 0.3;  // dt * (spread of H eigenvalues)
  bool store_states = true;         // false keeps only the final state
  Observer observer;                // called after every step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
  double dt = 0.0;
  // Measured at every stride sample when invariant checks are on.
  double max_hermiticity_error = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;

  DensityMatrix final_state(const HilbertSpace& space) const;
};

Trajectory integrate(const DensityMatrix& rho0, const HamiltonianFn& h, const std::vector<Dissipator>& dissipators,
                     double duration, const IntegratorOptions& options);

/// exp(L duration) applied to vec(rho0).
DensityMatrix propagate_static(const DensityMatrix& rho0, const ComplexMatrix& h,
                               const std::vector<Dissipator>& dissipators, double duration);

/// F = sqrt(<psi|rho|psi>); throws if psi is not normalized.
double fidelity(const DensityMatrix& rho, const ComplexVector& target);
double fidelity(const ComplexMatrix& rho, const ComplexVector& target);

}  // namespace hqm::dynamics
