#include <doctest.h>

#include <cmath>

#include "hqm/config.hpp"
#include "hqm/oracle.hpp"
#include "hqm/units.hpp"

using namespace hqm;
using namespace hqm::oracle;

namespace {

FullModel default_model(std::size_t n_max = 3) {
  config::Config cfg;
  cfg.set("oracle.n_max", std::to_string(n_max));
  return config::build_oracle_model(cfg, config::build_device(cfg));
}

}  // namespace

TEST_CASE("full Hamiltonian structure") {
  auto m = default_model();
  const auto h = build_full_hamiltonian(m);
  CHECK(h.rows() == 2 * 4 * 3);
  CHECK(hermiticity_error(h) == 0.0);
  CHECK(commutator(h, full_excitation_number(m)).norm() < 1e-6);

  m.params.g_FY = m.params.g_YN = 0.0;
  const auto free = build_full_hamiltonian(m);
  CHECK((free - ComplexMatrix(free.diagonal().asDiagonal())).norm() == 0.0);

  FullModel tiny = m;
  tiny.n_max = 1;
  CHECK_THROWS_AS(build_full_hamiltonian(tiny), std::invalid_argument);
}

TEST_CASE("memory states join the magnon vacuum") {
  const auto m = default_model();
  const auto psi = embed_memory_state(m, model::basis_state(1, model::nv_minus));
  // fq = 1, n = 0, nv = 1 -> (1 * 4 + 0) * 3 + 1
  CHECK(psi(13) == complex(1.0));
  CHECK(psi.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(embed_memory_state(m, ComplexVector::Zero(3)), DimensionError);
}

TEST_CASE("uncoupled oracle agrees with the effective model exactly") {
  auto m = default_model();
  m.params.g_FY = m.params.g_YN = 0.0;
  const auto r = validate_swt(m, 50e-9, 1e-12, {.checkpoints = 20});
  CHECK(r.max_trace_distance < 1e-9);
  CHECK(r.max_magnon_population == 0.0);
}

TEST_CASE("oracle rejects unresolved steps") {
  const auto m = default_model();
  CHECK_THROWS_AS(validate_swt(m, 10e-9, 1e-10), std::invalid_argument);
}

TEST_CASE("default operating point passes the oracle") {
  const auto m = default_model();
  const double duration = units::pi / (2.0 * std::abs(model::effective_params_at(m.params).g_minus));
  const auto r = validate_swt(m, duration, 1e-12);
  const double ratio = m.params.g_FY / (m.params.omega_F - m.params.omega_K);
  CHECK(r.max_trace_distance < 5e-2);
  CHECK(r.max_magnon_population < 10.0 * ratio * ratio);
  CHECK(r.max_norm_deviation < 1e-9);
  // frozen from the reference run of this configuration
  CHECK(r.max_trace_distance == doctest::Approx(0.02690469).epsilon(1e-4));
  CHECK(r.samples.size() >= 200);
  CHECK(r.samples.front().trace_distance < 1e-12);
}

TEST_CASE("magnon leakage scales as (g / detuning)^2") {
  auto leakage = [](double detuning_hz) {
    config::Config cfg;
    cfg.set("model.fq_kittel_detuning_hz", std::to_string(detuning_hz));
    cfg.set("oracle.duration_s", "100e-9");
    const auto m = config::build_oracle_model(cfg, config::build_device(cfg));
    return validate_swt(m, 100e-9, 1e-12, {.checkpoints = 400}).max_magnon_population;
  };
  const double ratio = leakage(85e6) / leakage(170e6);
  CHECK(ratio > 2.0);
  CHECK(ratio < 8.0);
}
