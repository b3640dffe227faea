#include "hqm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqm::oracle {

using model::Transition;

HilbertSpace FullModel::space() const { return HilbertSpace{2, n_max + 1, 3}; }

void FullModel::validate() const {
  if (n_max < 2) throw std::invalid_argument("oracle Fock cutoff n_max must be at least 2");
}

namespace {

ComplexMatrix annihilation(std::size_t n_max) {
  const auto d = static_cast<Eigen::Index>(n_max + 1);
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

ComplexMatrix build_full_hamiltonian(const FullModel& m) {
  m.validate();
  const auto& p = m.params;
  const auto space = m.space();
  const ComplexMatrix a = annihilation(m.n_max);
  const ComplexMatrix sz = (ComplexMatrix(2, 2) << -1.0, 0.0, 0.0, 1.0).finished();

  ComplexMatrix h = 0.5 * p.omega_F * embed(sz, space, 0);
  h += p.omega_K * embed(a.adjoint() * a, space, 1);
  for (auto j : {Transition::minus, Transition::plus})
    h += (p.nv_transition(j) + p.delta_YN) * embed(model::nv_projector(model::nv_index(j)), space, 2);

  const ComplexMatrix fy = kron({model::fq_raising(), a, identity(3)});
  h -= p.g_FY * (fy + fy.adjoint());
  for (auto j : {Transition::minus, Transition::plus}) {
    const ComplexMatrix yn = kron({identity(2), a.adjoint(), model::nv_lowering(j)});
    h -= p.g_YN * (yn + yn.adjoint());
  }
  return h;
}

ComplexMatrix magnon_number(const FullModel& m) {
  const ComplexMatrix a = annihilation(m.n_max);
  return embed(a.adjoint() * a, m.space(), 1);
}

ComplexMatrix full_excitation_number(const FullModel& m) {
  const auto space = m.space();
  return embed(model::fq_raising() * model::fq_raising().adjoint(), space, 0) + magnon_number(m) +
         embed(model::nv_projector(model::nv_minus) + model::nv_projector(model::nv_plus), space, 2);
}

ComplexVector embed_memory_state(const FullModel& m, const ComplexVector& psi_mem) {
  if (psi_mem.size() != 6) throw DimensionError("memory state must be 6-dimensional");
  ComplexVector vacuum = ComplexVector::Zero(static_cast<Eigen::Index>(m.n_max + 1));
  vacuum(0) = 1.0;
  const auto d = static_cast<Eigen::Index>(m.space().total_dim());
  ComplexVector out = ComplexVector::Zero(d);
  const auto nf = static_cast<Eigen::Index>(m.n_max + 1);
  for (Eigen::Index fq = 0; fq < 2; ++fq)
    for (Eigen::Index nv = 0; nv < 3; ++nv) out((fq * nf) * 3 + nv) = psi_mem(fq * 3 + nv);
  return out;
}

OracleReport validate_swt(const FullModel& m, double duration, double dt, const OracleOptions& options) {
  m.validate();
  if (!(dt > 0.0) || !(duration >= 0.0)) throw std::invalid_argument("oracle needs dt > 0 and duration >= 0");

  const ComplexMatrix h_full = build_full_hamiltonian(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h_full, Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().cwiseAbs().maxCoeff();

  OracleReport report;
  report.max_phase_per_step = dt * max_eig;
  if (report.max_phase_per_step > 0.1)
    throw std::invalid_argument("oracle step does not resolve the full Hamiltonian (dt * max|eig| = " +
                                std::to_string(report.max_phase_per_step) + " > 0.1)");

  report.effective = model::effective_params_at(m.params);
  const ComplexMatrix h_eff = model::build_h_eff_three_level(report.effective, m.params.b_total());

  const ComplexVector psi_mem = options.initial_state.value_or(model::basis_state(1, model::nv_zero));
  if (std::abs(psi_mem.norm() - 1.0) > 1e-9) throw std::invalid_argument("oracle initial state is not normalized");

  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double step = steps > 0 ? duration / static_cast<double>(steps) : 0.0;
  const std::size_t checkpoints = std::max<std::size_t>(1, options.checkpoints);
  const std::size_t every = std::max<std::size_t>(1, steps / checkpoints);

  const complex minus_i{0.0, -1.0};
  const ComplexMatrix u_full = matrix_exponential(minus_i * step * h_full);
  const ComplexMatrix n_mag = magnon_number(m);
  const auto space = m.space();

  ComplexVector psi = embed_memory_state(m, psi_mem);

  auto sample = [&](std::size_t n) {
    const double t = static_cast<double>(n) * step;
    const ComplexMatrix rho_full = psi * psi.adjoint();
    const ComplexMatrix reduced = partial_trace(rho_full, space, {0, 2});
    const ComplexVector psi_eff = matrix_exponential(minus_i * t * h_eff) * psi_mem;
    OracleSample s;
    s.time = t;
    s.trace_distance = trace_distance(reduced, psi_eff * psi_eff.adjoint());
    s.magnon_population = (psi.adjoint() * n_mag * psi)(0, 0).real();
    s.norm_deviation = std::abs(psi.norm() - 1.0);
    report.max_trace_distance = std::max(report.max_trace_distance, s.trace_distance);
    report.max_magnon_population = std::max(report.max_magnon_population, s.magnon_population);
    report.max_norm_deviation = std::max(report.max_norm_deviation, s.norm_deviation);
    report.samples.push_back(s);
  };

  sample(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    psi = u_full * psi;
    if (n % every == 0 || n == steps) sample(n);
  }
  return report;
}

}  // namespace hqm::oracle
