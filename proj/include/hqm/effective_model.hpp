#pragma once

// Second-order (Schrieffer-Wolff) reduction of the FQ-Kittel-mode-NV system
// to an effective FQ (x) NV-triplet model.
//
// Basis of the 6-dimensional FQ (x) NV space, index = 3 * fq + nv:
//   fq: 0 = |0_F> (ground), 1 = |1_F>
//   nv: 0 = |0_N>, 1 = |-1_N>, 2 = |+1_N>
// All frequencies are angular (rad/s); fields are in tesla.

#include <stdexcept>

#include "hqm/linalg.hpp"

namespace hqm::model {

enum class Transition { minus = -1, plus = +1 };

inline constexpr std::size_t fq_dim = 2;
inline constexpr std::size_t nv_dim = 3;
inline constexpr std::size_t nv_zero = 0;
inline constexpr std::size_t nv_minus = 1;
inline constexpr std::size_t nv_plus = 2;

inline std::size_t nv_index(Transition j) { return j == Transition::minus ? nv_minus : nv_plus; }

HilbertSpace memory_space();  // [2, 3]

/// |fq> (x) |nv> as a 6-vector.
ComplexVector basis_state(std::size_t fq, std::size_t nv);

ComplexMatrix fq_raising();                 // |1_F><0_F|
ComplexMatrix nv_lowering(Transition j);    // |0_N><j_N|
ComplexMatrix nv_projector(std::size_t nv); // |nv><nv|

class ModelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PhysicalParams {
  double omega_F = 0.0;   // FQ gap
  double delta_ZS = 0.0;  // NV zero-field splitting
  double gamma_e = -1.76e11;
  double B_L = 0.0;       // micromagnet field, T
  double deltaB = 0.0;    // tunable field, T
  double omega_K = 0.0;   // Kittel frequency at B_L + deltaB
  double g_FY = 0.0;
  double g_YN = 0.0;
  double delta_YN = 0.0;
  double I_p = 0.0;       // A, carried for reporting only

  double b_total() const { return B_L + deltaB; }
  /// Bare NV transition frequency Delta_ZS -+ gamma_e B for |0> <-> |j>.
  double nv_transition(Transition j) const;
  /// Same device moved to a different total field; omega_K follows with slope |gamma_e|.
  PhysicalParams at_field(double b_total) const;
  /// True when the Kittel mode is far detuned from the FQ relative to both couplings.
  bool virtual_coupling_regime() const;
};

struct Shifts {
  double delta_F = 0.0;
  double delta_N_minus = 0.0;
  double delta_N_plus = 0.0;
};

struct EffectiveParams {
  double omega_F_eff = 0.0;
  double omega_N_eff_minus = 0.0;
  double omega_N_eff_plus = 0.0;
  double delta_F = 0.0;
  double delta_N_minus = 0.0;
  double delta_N_plus = 0.0;
  double g_minus = 0.0;
  double g_plus = 0.0;
  double B_res = 0.0;
  double gamma_e = -1.76e11;

  double g(Transition j) const { return j == Transition::minus ? g_minus : g_plus; }
  /// omega_N,(j),eff(B) with the induced shifts held at their B_res values.
  double omega_N_eff(Transition j, double b) const;
  /// Detuning delta_B,(j) = -+ gamma_e (B - B_res) of the interaction picture.
  double field_detuning(Transition j, double b) const;
};

/// delta_F = g_FY^2 / (omega_F - omega_K);
/// delta_N,(j) = g_YN^2 / ((omega_(j) + delta_YN) - omega_K).
Shifts effective_shifts(const PhysicalParams& p);

/// g_(j) = g_FY g_YN / 2 * [1 / (omega_F - omega_K) + 1 / ((omega_(j) + delta_YN) - omega_K)].
double effective_coupling(const PhysicalParams& p, Transition j);

/// Field at which omega_N,(-1),eff equals omega_F,eff, shifts re-evaluated at
/// each iterate. Residual below 2 pi x 1 Hz.
double resonance_field(const PhysicalParams& p, double critical_field);

/// Effective quantities evaluated at the device's current field; B_res is
/// reported as that field (no resonance search).
EffectiveParams effective_params_at(const PhysicalParams& p);

/// All effective quantities with the device at its own resonance field.
EffectiveParams effective_params(const PhysicalParams& p, double critical_field);

/// Places the device at its transfer operating point: the Kittel mode sits
/// `fq_kittel_detuning` below omega_F at B_res, and B_L = B_res - delta_b_on.
PhysicalParams operating_point(PhysicalParams p, double fq_kittel_detuning, double delta_b_on,
                               double critical_field);

/// Lab-frame three-level effective Hamiltonian at field b.
ComplexMatrix build_h_eff_three_level(const EffectiveParams& e, double b);

/// Interaction-picture Hamiltonian (frame of the free part at B_res).
/// The g_(+1) flip-flop carries the phase exp(2 i t gamma_e B_res).
ComplexMatrix build_h_int(double t, double b, const EffectiveParams& e, bool keep_counter_rotating = true);

/// Operator counting FQ plus NV excitations (|+-1_N> count as one).
ComplexMatrix excitation_number();

}  // namespace hqm::model
