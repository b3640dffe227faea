#include "hqm/effective_model.hpp"

#include <cmath>
#include <string>

#include "hqm/units.hpp"

namespace hqm::model {

HilbertSpace memory_space() { return HilbertSpace{fq_dim, nv_dim}; }

ComplexVector basis_state(std::size_t fq, std::size_t nv) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(fq_dim * nv_dim));
  v(static_cast<Eigen::Index>(fq * nv_dim + nv)) = 1.0;
  return v;
}

ComplexMatrix fq_raising() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

ComplexMatrix nv_lowering(Transition j) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(static_cast<Eigen::Index>(nv_zero), static_cast<Eigen::Index>(nv_index(j))) = 1.0;
  return m;
}

ComplexMatrix nv_projector(std::size_t nv) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv)) = 1.0;
  return m;
}

double PhysicalParams::nv_transition(Transition j) const {
  // omega_(+-1) = Delta_ZS -+ gamma_e B
  return j == Transition::plus ? delta_ZS - gamma_e * b_total() : delta_ZS + gamma_e * b_total();
}

PhysicalParams PhysicalParams::at_field(double b) const {
  PhysicalParams out = *this;
  out.omega_K = omega_K + std::abs(gamma_e) * (b - b_total());
  out.deltaB = b - B_L;
  return out;
}

bool PhysicalParams::virtual_coupling_regime() const {
  const double detuning = std::abs(omega_F - omega_K);
  return detuning > 10.0 * std::abs(g_FY) && detuning > 10.0 * std::abs(g_YN);
}

namespace {

double checked_inverse(double denominator, const char* what) {
  if (denominator == 0.0 || !std::isfinite(denominator))
    throw ModelError(std::string("zero detuning denominator: ") + what);
  return 1.0 / denominator;
}

double nv_denominator(const PhysicalParams& p, Transition j) {
  return p.nv_transition(j) + p.delta_YN - p.omega_K;
}

}  // namespace

Shifts effective_shifts(const PhysicalParams& p) {
  Shifts s;
  s.delta_F = p.g_FY * p.g_FY * checked_inverse(p.omega_F - p.omega_K, "omega_F - omega_K");
  s.delta_N_minus =
      p.g_YN * p.g_YN * checked_inverse(nv_denominator(p, Transition::minus), "omega_N(-1) + delta_YN - omega_K");
  s.delta_N_plus =
      p.g_YN * p.g_YN * checked_inverse(nv_denominator(p, Transition::plus), "omega_N(+1) + delta_YN - omega_K");
  return s;
}

double effective_coupling(const PhysicalParams& p, Transition j) {
  const double fq_term = checked_inverse(p.omega_F - p.omega_K, "omega_F - omega_K");
  const double nv_term = checked_inverse(nv_denominator(p, j), "omega_N + delta_YN - omega_K");
  return 0.5 * p.g_FY * p.g_YN * (fq_term + nv_term);
}

namespace {

double resonance_residual(const PhysicalParams& p) {
  const auto s = effective_shifts(p);
  const double nv_eff = p.nv_transition(Transition::minus) + p.delta_YN + s.delta_N_minus;
  const double fq_eff = p.omega_F + s.delta_F;
  return nv_eff - fq_eff;
}

}  // namespace

double resonance_field(const PhysicalParams& p, double critical_field) {
  constexpr double tolerance = units::two_pi * 1.0;  // 1 Hz
  constexpr int max_iterations = 200;
  if (p.gamma_e == 0.0) throw ModelError("gamma_e must be nonzero");

  double b = p.b_total();
  for (int it = 0; it < max_iterations; ++it) {
    const double residual = resonance_residual(p.at_field(b));
    if (std::abs(residual) < tolerance) {
      if (b - p.B_L > critical_field || b < 0.0)
        throw ModelError("no resonance field below the critical field");
      return b;
    }
    // d(omega_N(-1))/dB = gamma_e; the shifts vary far more slowly.
    b -= residual / p.gamma_e;
  }
  throw ModelError("resonance field iteration did not converge");
}

EffectiveParams effective_params_at(const PhysicalParams& p) {
  const auto s = effective_shifts(p);
  EffectiveParams e;
  e.B_res = p.b_total();
  e.gamma_e = p.gamma_e;
  e.delta_F = s.delta_F;
  e.delta_N_minus = s.delta_N_minus;
  e.delta_N_plus = s.delta_N_plus;
  e.omega_F_eff = p.omega_F + s.delta_F;
  e.omega_N_eff_minus = p.nv_transition(Transition::minus) + p.delta_YN + s.delta_N_minus;
  e.omega_N_eff_plus = p.nv_transition(Transition::plus) + p.delta_YN + s.delta_N_plus;
  e.g_minus = effective_coupling(p, Transition::minus);
  e.g_plus = effective_coupling(p, Transition::plus);
  return e;
}

EffectiveParams effective_params(const PhysicalParams& p, double critical_field) {
  return effective_params_at(p.at_field(resonance_field(p, critical_field)));
}

PhysicalParams operating_point(PhysicalParams p, double fq_kittel_detuning, double delta_b_on,
                               double critical_field) {
  if (p.gamma_e == 0.0) throw ModelError("gamma_e must be nonzero");
  double b = (p.delta_ZS + p.delta_YN - p.omega_F) / std::abs(p.gamma_e);
  for (int it = 0; it < 100; ++it) {
    p.B_L = b - delta_b_on;
    p.deltaB = delta_b_on;
    p.omega_K = p.omega_F - fq_kittel_detuning;
    const double next = resonance_field(p, critical_field);
    if (std::abs(next - b) < 1e-15) {
      b = next;
      break;
    }
    b = next;
  }
  p.B_L = b - delta_b_on;
  p.deltaB = delta_b_on;
  p.omega_K = p.omega_F - fq_kittel_detuning;
  return p;
}

double EffectiveParams::omega_N_eff(Transition j, double b) const {
  const double at_res = j == Transition::minus ? omega_N_eff_minus : omega_N_eff_plus;
  const double sign = j == Transition::plus ? -1.0 : 1.0;
  return at_res + sign * gamma_e * (b - B_res);
}

double EffectiveParams::field_detuning(Transition j, double b) const {
  const double sign = j == Transition::plus ? -1.0 : 1.0;
  return sign * gamma_e * (b - B_res);
}

ComplexMatrix build_h_eff_three_level(const EffectiveParams& e, double b) {
  const auto space = memory_space();
  const ComplexMatrix sz = (ComplexMatrix(2, 2) << -1.0, 0.0, 0.0, 1.0).finished();
  ComplexMatrix h = 0.5 * e.omega_F_eff * embed(sz, space, 0);
  for (auto j : {Transition::minus, Transition::plus}) {
    h += e.omega_N_eff(j, b) * embed(nv_projector(nv_index(j)), space, 1);
    const ComplexMatrix flip = kron(fq_raising(), nv_lowering(j));
    h += e.g(j) * (flip + flip.adjoint());
  }
  return h;
}

ComplexMatrix build_h_int(double t, double b, const EffectiveParams& e, bool keep_counter_rotating) {
  const auto space = memory_space();
  ComplexMatrix h = ComplexMatrix::Zero(6, 6);
  for (auto j : {Transition::minus, Transition::plus})
    h += e.field_detuning(j, b) * embed(nv_projector(nv_index(j)), space, 1);

  const ComplexMatrix flip_minus = kron(fq_raising(), nv_lowering(Transition::minus));
  h += e.g_minus * (flip_minus + flip_minus.adjoint());

  if (keep_counter_rotating && e.g_plus != 0.0) {
    const complex phase = std::polar(1.0, 2.0 * t * e.gamma_e * e.B_res);
    const ComplexMatrix flip_plus = phase * kron(fq_raising(), nv_lowering(Transition::plus));
    h += e.g_plus * (flip_plus + flip_plus.adjoint());
  }
  return h;
}

ComplexMatrix excitation_number() {
  const auto space = memory_space();
  return embed(fq_raising() * fq_raising().adjoint(), space, 0) +
         embed(nv_projector(nv_minus) + nv_projector(nv_plus), space, 1);
}

}  // namespace hqm::model
