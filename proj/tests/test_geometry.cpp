#include <doctest.h>

#include <cmath>

#include "hqm/geometry.hpp"
#include "hqm/units.hpp"

using namespace hqm::geometry;
namespace units = hqm::units;

namespace {

YigSphere single_site_sphere() {
  YigSphere s;
  s.radius = 1e-10;  // well below the lattice constant, so only the centre remains
  return s;
}

double dipole_prefactor() { return units::mu0 / (4.0 * units::pi) * units::gamma_e * units::gamma_e * units::hbar; }

}  // namespace

TEST_CASE("site sampling at the default radius") {
  const YigSphere s;
  const auto n = site_count(s);
  // 4.2e27 * 4/3 pi (45 nm)^3, evaluated by hand
  CHECK(s.continuum_site_count() == doctest::Approx(1.60315e6).epsilon(1e-4));
  CHECK(static_cast<double>(n) == doctest::Approx(1.6e6).epsilon(0.05));
  CHECK(std::abs(static_cast<double>(n) / s.continuum_site_count() - 1.0) < 0.05);
  CHECK(sample_spin_sites(s).size() == n);
}

TEST_CASE("degenerate and scaled lattices") {
  YigSphere s;
  s.radius = 0.0;
  CHECK(site_count(s) == 1);

  YigSphere a;
  a.radius = 30e-9;
  YigSphere b = a;
  b.spin_density *= 2.0;
  CHECK(static_cast<double>(site_count(b)) / static_cast<double>(site_count(a)) == doctest::Approx(2.0).epsilon(0.02));

  YigSphere bad;
  bad.radius = -1.0;
  CHECK_THROWS_AS(site_count(bad), GeometryError);
}

TEST_CASE("sites are deterministic and inside the sphere") {
  YigSphere s;
  s.radius = 10e-9;
  s.center = {1e-9, -2e-9, 0.5e-9};
  const auto first = sample_spin_sites(s);
  const auto second = sample_spin_sites(s);
  CHECK(first == second);
  for (const auto& p : first) {
    const double dx = p[0] - s.center[0], dy = p[1] - s.center[1], dz = p[2] - s.center[2];
    CHECK(dx * dx + dy * dy + dz * dz <= s.radius * s.radius * (1 + 1e-12));
  }
}

TEST_CASE("g_FY structure") {
  const YigSphere s;
  FluxQubitGeom fq;
  const double g = coupling_g_fy(s, fq);
  CHECK(g > 0.0);

  FluxQubitGeom zero = fq;
  zero.persistent_current = 0.0;
  CHECK(coupling_g_fy(s, zero) == 0.0);

  FluxQubitGeom triple = fq;
  triple.persistent_current = 3.0 * fq.persistent_current;
  CHECK(coupling_g_fy(s, triple) / g == doctest::Approx(3.0).epsilon(1e-14));

  FluxQubitGeom far = fq;
  far.wire_distance = 2.0 * fq.wire_distance;
  const double ratio = coupling_g_fy(s, far) / g;
  CHECK(ratio > 0.45);
  CHECK(ratio < 0.55);

  FluxQubitGeom inside = fq;
  inside.wire_distance = 0.5 * s.radius;
  CHECK_THROWS_AS(coupling_g_fy(s, inside), GeometryError);
}

TEST_CASE("g_FY grows as sqrt(N) under density scaling in the far field") {
  YigSphere a;
  a.radius = 25e-9;
  YigSphere b = a;
  b.spin_density *= 4.0;
  FluxQubitGeom fq;
  fq.wire_distance = 20e-6;
  const double na = static_cast<double>(site_count(a));
  const double nb = static_cast<double>(site_count(b));
  const double ratio = coupling_g_fy(b, fq) / coupling_g_fy(a, fq);
  CHECK(ratio == doctest::Approx(std::sqrt(nb / na)).epsilon(0.02));
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("g_FY sum matches a naive per-site loop") {
  YigSphere s;
  s.radius = 20e-9;
  FluxQubitGeom fq;
  double naive = 0.0;
  const auto sites = sample_spin_sites(s);
  for (const auto& p : sites) naive += 1.0 / std::hypot(p[0] - (s.center[0] - fq.wire_distance), p[1] - s.center[1]);
  CHECK(std::abs(wire_inverse_distance_sum(s, fq) - naive) / naive < 1e-12);

  const double expected = units::mu0 / units::two_pi * std::abs(units::gamma_e) * fq.persistent_current *
                          std::sqrt(2.0 * s.spin_s / static_cast<double>(sites.size())) * naive;
  CHECK(std::abs(coupling_g_fy(s, fq) - expected) / expected < 1e-12);
}

TEST_CASE("single-site sums match one-term hand evaluation") {
  const auto s = single_site_sphere();
  REQUIRE(site_count(s) == 1);
  FluxQubitGeom fq;
  NvGeom nv;
  const double d = s.radius + nv.surface_distance;

  const double g_fy = units::mu0 / units::two_pi * std::abs(units::gamma_e) * fq.persistent_current *
                      std::sqrt(2.0 * s.spin_s) / fq.wire_distance;
  CHECK(std::abs(coupling_g_fy(s, fq) - g_fy) / g_fy < 1e-12);

  // NV on +x: theta = 90 degrees, angular factor -1
  const double g_yn = dipole_prefactor() * std::sqrt(2.0 * s.spin_s) / (d * d * d);
  CHECK(std::abs(coupling_g_yn(s, nv) - g_yn) / g_yn < 1e-12);

  const double shift = -dipole_prefactor() * s.spin_s / (d * d * d);
  CHECK(std::abs(shift_delta_yn(s, nv) - shift) / std::abs(shift) < 1e-12);
}

TEST_CASE("dipolar angular structure") {
  const auto s = single_site_sphere();
  const double magic = std::acos(1.0 / std::sqrt(3.0));
  const double r = 80e-9;
  const Vec3 at_magic{r * std::sin(magic), 0.0, r * std::cos(magic)};
  CHECK(std::abs(dipolar_sum(s, at_magic)) * r * r * r < 1e-12);

  YigSphere big;
  big.radius = 20e-9;
  const double sum = dipolar_sum(big, {0.0, 0.0, 60e-9});
  CHECK(sum > 0.0);
  const double per_site = sum / static_cast<double>(site_count(big)) * std::pow(60e-9, 3);
  CHECK(per_site == doctest::Approx(2.0).epsilon(0.05));

  CHECK_THROWS_AS(dipolar_sum(big, {5e-9, 0.0, 0.0}), GeometryError);
  NvGeom inside;
  inside.surface_distance = -30e-9;
  CHECK_THROWS_AS(coupling_g_yn(big, inside), GeometryError);
}

TEST_CASE("g_YN decays with NV distance") {
  YigSphere s;
  s.radius = 20e-9;
  double previous = INFINITY;
  for (double d : {20e-9, 40e-9, 60e-9, 100e-9, 200e-9, 400e-9}) {
    NvGeom nv;
    nv.surface_distance = d;
    const double g = std::abs(coupling_g_yn(s, nv));
    CHECK(g < previous);
    previous = g;
  }
}

TEST_CASE("delta_YN is linear in s") {
  YigSphere s;
  s.radius = 20e-9;
  NvGeom nv;
  const double base = shift_delta_yn(s, nv);
  YigSphere twice = s;
  twice.spin_s = 2.0 * s.spin_s;
  CHECK(shift_delta_yn(twice, nv) / base == doctest::Approx(2.0).epsilon(1e-14));
  YigSphere none = s;
  none.spin_s = 0.0;
  CHECK(shift_delta_yn(none, nv) == 0.0);
  CHECK(coupling_g_yn(none, nv) == 0.0);
}

TEST_CASE("geometry sums are bit-reproducible") {
  const YigSphere s;
  CHECK(coupling_g_fy(s, {}) == coupling_g_fy(s, {}));
  CHECK(coupling_g_yn(s, {}) == coupling_g_yn(s, {}));
}

TEST_CASE("Kittel mode") {
  const double omega_f = units::hz_to_rad(2.4e9);
  const double detuning = units::hz_to_rad(170e6);
  const auto mode = KittelMode::calibrated(omega_f, detuning, 0.0075, 0.0155, units::gamma_e);
  CHECK(kittel_frequency(mode.b_local, mode) == doctest::Approx(mode.omega_offset));
  CHECK(omega_f - kittel_frequency(0.0155, mode) == doctest::Approx(detuning).epsilon(1e-12));
  const double slope = (kittel_frequency(0.0105, mode) - kittel_frequency(0.0100, mode)) / 0.0005;
  CHECK(slope == doctest::Approx(std::abs(units::gamma_e)).epsilon(1e-9));
}
