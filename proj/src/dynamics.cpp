#include "hqm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hqm/effective_model.hpp"
#include "hqm/units.hpp"

namespace hqm::dynamics {

namespace {

void check_state(const ComplexMatrix& m, const StateTolerances& tol, const char* context) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(context) + ": density matrix must be square");
  const double herm = hermiticity_error(m);
  if (herm > tol.hermiticity)
    throw std::invalid_argument(std::string(context) + ": not Hermitian (error " + std::to_string(herm) + ")");
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw std::invalid_argument(std::string(context) + ": trace " + std::to_string(tr) + " != 1");
  const double lmin = min_eigenvalue(m);
  if (lmin < tol.min_eigenvalue)
    throw std::invalid_argument(std::string(context) + ": negative eigenvalue " + std::to_string(lmin));
}

}  // namespace

DensityMatrix::DensityMatrix(HilbertSpace space, ComplexMatrix matrix, StateTolerances tol)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw DimensionError("density matrix dimension does not match its space");
  check_state(matrix_, tol, "DensityMatrix");
}

DensityMatrix DensityMatrix::pure(HilbertSpace space, const ComplexVector& psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("pure state is not normalized");
  return DensityMatrix(std::move(space), psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(HilbertSpace space) {
  const auto d = space.total_dim();
  return DensityMatrix(std::move(space), identity(d) / static_cast<double>(d));
}

double QubitRates::t1() const {
  return decay > 0.0 ? 1.0 / decay : std::numeric_limits<double>::infinity();
}

double QubitRates::t2() const {
  const double c = 0.5 * decay + dephasing;
  return c > 0.0 ? 1.0 / c : std::numeric_limits<double>::infinity();
}

RateConvention parse_rate_convention(const std::string& name) {
  if (name == "exact") return RateConvention::exact;
  if (name == "cyclic") return RateConvention::cyclic;
  throw std::invalid_argument("unknown rate convention '" + name + "' (expected exact|cyclic)");
}

std::string to_string(RateConvention c) { return c == RateConvention::exact ? "exact" : "cyclic"; }

QubitRates rates_from_t1_t2(double t1, double t2) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("T1 and T2 must be positive");
  if (t2 > 2.0 * t1) throw std::invalid_argument("unphysical lifetimes: T2 > 2 T1");
  QubitRates r;
  r.decay = std::isinf(t1) ? 0.0 : 1.0 / t1;
  r.dephasing = 1.0 / t2 - 0.5 * r.decay;
  if (r.dephasing < 0.0) r.dephasing = 0.0;  // T2 == 2 T1 up to rounding
  return r;
}

std::pair<double, double> effective_lifetimes(double t1, double t2, RateConvention convention) {
  if (convention == RateConvention::exact) return {t1, t2};
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("T1 and T2 must be positive");
  const double decay = std::isinf(t1) ? 0.0 : units::two_pi / t1;
  const double coherence = 0.5 * decay + units::pi / t2;
  const double t1_eff = decay > 0.0 ? 1.0 / decay : std::numeric_limits<double>::infinity();
  return {t1_eff, 1.0 / coherence};
}

QubitRates rates_from_lifetimes(double t1, double t2, RateConvention convention) {
  const auto [t1_eff, t2_eff] = effective_lifetimes(t1, t2, convention);
  return rates_from_t1_t2(t1_eff, t2_eff);
}

std::vector<Dissipator> qubit_dissipators(const QubitRates& r) {
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  // D[P] with rate 2 gamma^(p) damps the coherence at gamma^(p).
  return {{lower, r.decay}, {excited, 2.0 * r.dephasing}};
}

std::vector<Dissipator> DecoherenceRates::dissipators() const {
  using namespace model;
  const auto space = memory_space();
  std::vector<Dissipator> out;
  out.push_back({embed(fq_raising().adjoint(), space, 0), fq.decay});
  out.push_back({embed(fq_raising() * fq_raising().adjoint(), space, 0), 2.0 * fq.dephasing});
  for (auto [j, r] : {std::pair{Transition::minus, nv_minus}, std::pair{Transition::plus, nv_plus}}) {
    out.push_back({embed(nv_lowering(j), space, 1), r.decay});
    out.push_back({embed(nv_projector(nv_index(j)), space, 1), 2.0 * r.dephasing});
  }
  return out;
}

std::vector<RateChannel> DecoherenceRates::channels() const {
  return {{"fq_decay", fq.decay},           {"fq_dephasing", fq.dephasing},
          {"nv_minus_decay", nv_minus.decay}, {"nv_minus_dephasing", nv_minus.dephasing},
          {"nv_plus_decay", nv_plus.decay},   {"nv_plus_dephasing", nv_plus.dephasing}};
}

RampProfile parse_ramp_profile(const std::string& name) {
  if (name == "step") return RampProfile::step;
  if (name == "linear") return RampProfile::linear;
  if (name == "exponential") return RampProfile::exponential;
  throw std::invalid_argument("unknown ramp profile '" + name + "' (expected step|linear|exponential)");
}

std::string to_string(RampProfile p) {
  switch (p) {
    case RampProfile::step: return "step";
    case RampProfile::linear: return "linear";
    case RampProfile::exponential: return "exponential";
  }
  return "step";
}

double FieldSegment::field(double s) const {
  switch (profile) {
    case RampProfile::step: return b_end;
    case RampProfile::linear: return duration > 0.0 ? b_start + (b_end - b_start) * s / duration : b_end;
    case RampProfile::exponential: {
      if (duration <= 0.0) return b_end;
      const double tau = tau_fraction * duration;
      return b_start + (b_end - b_start) * -std::expm1(-s / tau) / -std::expm1(-duration / tau);
    }
  }
  return b_end;
}

double FieldSegment::field_integral(double s) const {
  switch (profile) {
    case RampProfile::step: return b_end * s;
    case RampProfile::linear:
      return duration > 0.0 ? b_start * s + 0.5 * (b_end - b_start) * s * s / duration : b_end * s;
    case RampProfile::exponential: {
      if (duration <= 0.0) return b_end * s;
      const double tau = tau_fraction * duration;
      const double norm = -std::expm1(-duration / tau);
      return b_start * s + (b_end - b_start) / norm * (s + tau * std::expm1(-s / tau));
    }
  }
  return b_end * s;
}

FieldSchedule::FieldSchedule(std::vector<FieldSegment> segments) : segments_(std::move(segments)) {
  double total = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    if (!(seg.duration >= 0.0)) throw std::invalid_argument("segment durations must be non-negative");
    if (seg.profile == RampProfile::exponential && !(seg.tau_fraction > 0.0))
      throw std::invalid_argument("exponential ramp needs a positive time-constant fraction");
    if (i > 0 && seg.profile != RampProfile::step) {
      const double prev = segments_[i - 1].b_end;
      if (std::abs(seg.b_start - prev) > 1e-12)
        throw std::invalid_argument("ramp segment " + std::to_string(i) + " does not start where the previous ends");
    }
    total += seg.duration;
  }
  if (!(total > 0.0)) throw std::invalid_argument("field schedule must have positive total duration");
}

double FieldSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.duration;
  return total;
}

double FieldSchedule::segment_start(std::size_t index) const {
  double t = 0.0;
  for (std::size_t i = 0; i < index && i < segments_.size(); ++i) t += segments_[i].duration;
  return t;
}

double FieldSchedule::field(double t) const {
  double start = 0.0;
  for (const auto& seg : segments_) {
    if (seg.duration > 0.0 && t < start + seg.duration) return seg.field(std::max(0.0, t - start));
    start += seg.duration;
  }
  return segments_.empty() ? 0.0 : segments_.back().field(segments_.back().duration);
}

double FieldSchedule::field_integral(double t0, double t1, double b_ref) const {
  if (t1 < t0) return -field_integral(t1, t0, b_ref);
  double total = 0.0;
  double start = 0.0;
  for (const auto& seg : segments_) {
    const double end = start + seg.duration;
    const double lo = std::max(t0, start);
    const double hi = std::min(t1, end);
    if (hi > lo) total += seg.field_integral(hi - start) - seg.field_integral(lo - start) - b_ref * (hi - lo);
    start = end;
  }
  return total;
}

DensityMatrix Trajectory::final_state(const HilbertSpace& space) const {
  if (states.empty()) throw IntegrationError("empty trajectory");
  return DensityMatrix(space, states.back());
}

namespace {

struct PreparedChannel {
  ComplexMatrix op;
  ComplexMatrix op_adj;
  ComplexMatrix half_odo;
  double rate;
};

double spectral_spread(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

}  // namespace

Trajectory integrate(const DensityMatrix& rho0, const HamiltonianFn& h, const std::vector<Dissipator>& dissipators,
                     double duration, const IntegratorOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("integrator step must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("integration duration must be non-negative");
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  const auto dim = rho0.matrix().rows();

  std::vector<PreparedChannel> channels;
  for (const auto& d : dissipators) {
    if (d.op.rows() != dim || d.op.cols() != dim) throw DimensionError("dissipator dimension mismatch");
    if (!(d.rate >= 0.0)) throw std::invalid_argument("dissipator rates must be non-negative");
    if (d.rate == 0.0) continue;
    channels.push_back({d.op, d.op.adjoint(), 0.5 * d.op.adjoint() * d.op, d.rate});
  }

  const complex minus_i{0.0, -1.0};
  auto rhs = [&](const ComplexMatrix& ham, const ComplexMatrix& rho) {
    ComplexMatrix out = minus_i * (ham * rho - rho * ham);
    for (const auto& c : channels)
      out.noalias() += c.rate * (c.op * rho * c.op_adj - c.half_odo * rho - rho * c.half_odo);
    return out;
  };

  const auto steps = static_cast<std::size_t>(std::ceil(duration / options.dt - 1e-9));
  const double step = steps > 0 ? duration / static_cast<double>(steps) : 0.0;

  auto check_resolution = [&](const ComplexMatrix& ham, double t) {
    if (step * spectral_spread(ham) > options.max_phase_per_step)
      throw IntegrationError("step size does not resolve the Hamiltonian at t = " + std::to_string(t) + " s");
  };
  Trajectory traj;
  auto check_invariants = [&](const ComplexMatrix& rho, double t) {
    if (!options.check_invariants) return;
    const double herm = hermiticity_error(rho);
    const double tr = std::abs(rho.trace().real() - 1.0);
    const double lmin = min_eigenvalue(rho);
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, herm);
    traj.max_trace_error = std::max(traj.max_trace_error, tr);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, lmin);
    const auto& tol = options.tolerances;
    if (herm > tol.hermiticity || tr > tol.trace || lmin < tol.min_eigenvalue) {
      char msg[200];
      std::snprintf(msg, sizeof msg,
                    "density-matrix invariant violated at t = %.4g s (hermiticity %.3g, trace error %.3g, "
                    "min eigenvalue %.3g); reduce the step",
                    t, herm, tr, lmin);
      throw IntegrationError(msg);
    }
  };

  traj.dt = step;
  ComplexMatrix rho = rho0.matrix();
  double t = options.start_time;
  traj.times.push_back(t);
  traj.states.push_back(rho);

  for (std::size_t n = 0; n < steps; ++n) {
    t = options.start_time + static_cast<double>(n) * step;
    const ComplexMatrix h0 = h(t);
    const ComplexMatrix hm = h(t + 0.5 * step);
    const ComplexMatrix h1 = h(t + step);
    if (n == 0 || (n + 1) % stride == 0) check_resolution(hm, t);

    const ComplexMatrix k1 = rhs(h0, rho);
    const ComplexMatrix k2 = rhs(hm, rho + 0.5 * step * k1);
    const ComplexMatrix k3 = rhs(hm, rho + 0.5 * step * k2);
    const ComplexMatrix k4 = rhs(h1, rho + step * k3);
    rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = options.start_time + static_cast<double>(n + 1) * step;
    if (options.observer) options.observer(t_next, rho);
    const bool last = n + 1 == steps;
    if ((n + 1) % stride == 0 || last) {
      check_invariants(rho, t_next);
      if (options.store_states || last) {
        if (!options.store_states) {
          traj.times.clear();
          traj.states.clear();
        }
        traj.times.push_back(t_next);
        traj.states.push_back(rho);
      }
    }
  }
  return traj;
}

DensityMatrix propagate_static(const DensityMatrix& rho0, const ComplexMatrix& h,
                               const std::vector<Dissipator>& dissipators, double duration) {
  if (!(duration >= 0.0)) throw std::invalid_argument("propagation duration must be non-negative");
  if (duration == 0.0) return rho0;
  const auto dim = static_cast<std::size_t>(rho0.matrix().rows());
  const ComplexMatrix l = liouvillian(h, dissipators);
  const ComplexVector out = matrix_exponential(l * duration) * vectorize(rho0.matrix());
  ComplexMatrix rho = unvectorize(out, dim);
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(rho0.space(), rho);
}

double fidelity(const ComplexMatrix& rho, const ComplexVector& target) {
  if (rho.rows() != target.size()) throw DimensionError("fidelity: target dimension mismatch");
  if (std::abs(target.norm() - 1.0) > 1e-9) throw std::invalid_argument("fidelity: target state is not normalized");
  const double overlap = (target.adjoint() * rho * target)(0, 0).real();
  return std::sqrt(std::max(0.0, overlap));
}

double fidelity(const DensityMatrix& rho, const ComplexVector& target) { return fidelity(rho.matrix(), target); }

}  // namespace hqm::dynamics
