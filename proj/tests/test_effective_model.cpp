#include <doctest.h>

#include <cmath>

#include "hqm/effective_model.hpp"
#include "hqm/units.hpp"

using namespace hqm;
using namespace hqm::model;
using units::hz_to_rad;

namespace {

// Device with the Kittel mode 170 MHz below a 2.4 GHz flux qubit and 11 MHz couplings.
PhysicalParams sample_params() {
  PhysicalParams p;
  p.omega_F = hz_to_rad(2.40e9);
  p.delta_ZS = hz_to_rad(2.87e9);
  p.gamma_e = units::gamma_e;
  p.B_L = 0.0075;
  p.deltaB = 0.008;
  p.omega_K = p.omega_F - hz_to_rad(170e6);
  p.g_FY = hz_to_rad(11e6);
  p.g_YN = hz_to_rad(11e6);
  p.delta_YN = 0.0;
  return p;
}

}  // namespace

TEST_CASE("NV transition frequencies follow the printed sign convention") {
  auto p = sample_params();
  CHECK(p.nv_transition(Transition::minus) == doctest::Approx(p.delta_ZS + p.gamma_e * p.b_total()));
  CHECK(p.nv_transition(Transition::plus) == doctest::Approx(p.delta_ZS - p.gamma_e * p.b_total()));
  CHECK(p.nv_transition(Transition::minus) < p.delta_ZS);

  const auto moved = p.at_field(p.b_total() + 0.001);
  CHECK(moved.omega_K - p.omega_K == doctest::Approx(std::abs(p.gamma_e) * 0.001));
  CHECK(moved.B_L == p.B_L);
  CHECK(moved.b_total() == doctest::Approx(p.b_total() + 0.001));
}

TEST_CASE("effective shifts") {
  auto p = sample_params();
  const auto s = effective_shifts(p);
  // (11 MHz)^2 / 170 MHz = 0.711765 MHz
  CHECK(units::rad_to_hz(s.delta_F) == doctest::Approx(0.711765e6).epsilon(1e-6));
  CHECK(s.delta_F * (p.omega_F - p.omega_K) >= 0.0);

  auto flipped = p;
  flipped.omega_K = p.omega_F + hz_to_rad(170e6);
  CHECK(effective_shifts(flipped).delta_F == doctest::Approx(-s.delta_F));

  auto no_fy = p;
  no_fy.g_FY = 0.0;
  CHECK(effective_shifts(no_fy).delta_F == 0.0);

  auto degenerate = p;
  degenerate.omega_K = p.omega_F;
  CHECK_THROWS_AS(effective_shifts(degenerate), ModelError);
}

TEST_CASE("effective coupling") {
  auto p = sample_params();
  // choose delta_YN so that the NV denominator equals the FQ detuning
  const double delta = p.omega_F - p.omega_K;
  p.delta_YN = delta + p.omega_K - p.nv_transition(Transition::minus);
  CHECK(effective_coupling(p, Transition::minus) == doctest::Approx(p.g_FY * p.g_YN / delta).epsilon(1e-12));

  auto q = sample_params();
  const double a = q.omega_F - q.omega_K;
  const double b = q.nv_transition(Transition::plus) + q.delta_YN - q.omega_K;
  CHECK(effective_coupling(q, Transition::plus) ==
        doctest::Approx(0.5 * q.g_FY * q.g_YN * (1.0 / b + 1.0 / a)).epsilon(1e-12));

  auto zero = sample_params();
  zero.g_YN = 0.0;
  CHECK(effective_coupling(zero, Transition::minus) == 0.0);
  zero = sample_params();
  zero.g_FY = 0.0;
  CHECK(effective_coupling(zero, Transition::plus) == 0.0);

  auto bad = sample_params();
  bad.omega_K = bad.nv_transition(Transition::minus);
  CHECK_THROWS_AS(effective_coupling(bad, Transition::minus), ModelError);
}

TEST_CASE("resonance field") {
  auto p = sample_params();
  p.g_FY = p.g_YN = 0.0;
  const double closed = (p.delta_ZS - p.omega_F) / std::abs(p.gamma_e);
  CHECK(resonance_field(p, 1.0) == doctest::Approx(closed).epsilon(1e-12));

  auto q = sample_params();
  q.delta_YN = hz_to_rad(-3e6);
  const double b = resonance_field(q, 1.0);
  const auto e = effective_params_at(q.at_field(b));
  CHECK(std::abs(e.omega_N_eff_minus - e.omega_F_eff) < units::two_pi * 1.0);

  auto shifted = q;
  shifted.delta_ZS += hz_to_rad(1e6);
  const double moved = resonance_field(shifted, 1.0) - b;
  // 1 MHz / (|gamma_e| / 2 pi) = 0.357 G
  CHECK(moved / units::gauss == doctest::Approx(0.357).epsilon(0.01));

  CHECK_THROWS_AS(resonance_field(q, 1e-4), ModelError);
}

TEST_CASE("operating point places the Kittel mode at the requested detuning") {
  auto p = sample_params();
  p.delta_YN = hz_to_rad(-36e6);
  const auto op = operating_point(p, hz_to_rad(170e6), 80e-4, 100e-4);
  CHECK(op.deltaB == doctest::Approx(80e-4));
  CHECK(units::rad_to_hz(op.omega_F - op.omega_K) == doctest::Approx(170e6).epsilon(1e-12));
  const auto e = effective_params(op, 100e-4);
  CHECK(e.B_res == doctest::Approx(op.b_total()).epsilon(1e-9));
  CHECK(e.g_minus == doctest::Approx(effective_coupling(op.at_field(e.B_res), Transition::minus)));
  CHECK(op.virtual_coupling_regime());
}

TEST_CASE("three-level effective Hamiltonian") {
  auto e = effective_params_at(sample_params());
  const double b = e.B_res + 0.001;
  const auto h = build_h_eff_three_level(e, b);
  CHECK(hermiticity_error(h) == 0.0);
  CHECK(commutator(h, excitation_number()).norm() < 1e-6);

  e.g_minus = e.g_plus = 0.0;
  const auto diag = build_h_eff_three_level(e, b);
  CHECK((diag - ComplexMatrix(diag.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(diag(0, 0).real() == doctest::Approx(-0.5 * e.omega_F_eff));
  CHECK(diag(4, 4).real() == doctest::Approx(0.5 * e.omega_F_eff + e.omega_N_eff(Transition::minus, b)));
}

TEST_CASE("interaction-picture Hamiltonian") {
  const auto e = effective_params_at(sample_params());
  const auto at_res = build_h_int(0.0, e.B_res, e);
  CHECK(std::abs(at_res(1, 1)) == 0.0);
  CHECK(std::abs(at_res(2, 2)) == 0.0);
  CHECK(at_res(3, 1).real() == doctest::Approx(e.g_minus));
  CHECK(hermiticity_error(build_h_int(1.234e-9, e.B_res - 0.002, e)) == 0.0);

  const double b = e.B_res - 80e-4;
  const auto off = build_h_int(0.0, b, e);
  CHECK(off(1, 1).real() == doctest::Approx(e.field_detuning(Transition::minus, b)));
  CHECK(off(2, 2).real() == doctest::Approx(-off(1, 1).real()));
  // gamma_e < 0, so lowering the field raises the |-1> detuning
  CHECK(off(1, 1).real() > 0.0);
  CHECK(units::rad_to_hz(off(1, 1).real()) == doctest::Approx(224e6).epsilon(0.01));

  const double t = 3.1e-9, dt = 0.07e-9;
  const complex ratio = build_h_int(t + dt, e.B_res, e)(3, 2) / build_h_int(t, e.B_res, e)(3, 2);
  CHECK(std::abs(ratio - std::polar(1.0, 2.0 * e.gamma_e * e.B_res * dt)) < 1e-9);

  const auto dropped = build_h_int(t, e.B_res, e, false);
  CHECK(dropped(3, 2) == complex(0.0));
  CHECK(commutator(dropped, excitation_number()).norm() == 0.0);
}

TEST_CASE("excitation number operator") {
  const auto n = excitation_number();
  CHECK(n(0, 0).real() == 0.0);
  CHECK(n(1, 1).real() == 1.0);
  CHECK(n(2, 2).real() == 1.0);
  CHECK(n(3, 3).real() == 1.0);
  CHECK(n(4, 4).real() == 2.0);
}
