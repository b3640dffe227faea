#include "hqm/geometry.hpp"

#include <cmath>

#include "hqm/units.hpp"

namespace hqm::geometry {

namespace {

// Neumaier-compensated running sum; order of addition is fixed by the lattice walk.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double YigSphere::lattice_constant() const { return std::cbrt(1.0 / spin_density); }

double YigSphere::continuum_site_count() const {
  return spin_density * 4.0 / 3.0 * units::pi * radius * radius * radius;
}

void YigSphere::validate() const {
  if (!(radius >= 0.0)) throw GeometryError("YIG radius must be non-negative");
  if (!(spin_density > 0.0)) throw GeometryError("spin density must be positive");
  if (!(spin_s >= 0.0)) throw GeometryError("spin s must be non-negative");
}

Vec3 NvGeom::position(const YigSphere& sphere) const {
  return {sphere.center[0] + sphere.radius + surface_distance, sphere.center[1], sphere.center[2]};
}

void for_each_site(const YigSphere& sphere, const std::function<void(const Vec3&)>& visit) {
  sphere.validate();
  const double a = sphere.lattice_constant();
  const long n = static_cast<long>(std::floor(sphere.radius / a));
  const double r2 = sphere.radius * sphere.radius;
  for (long i = -n; i <= n; ++i) {
    const double x = a * static_cast<double>(i);
    for (long j = -n; j <= n; ++j) {
      const double y = a * static_cast<double>(j);
      if (x * x + y * y > r2) continue;
      for (long k = -n; k <= n; ++k) {
        const double z = a * static_cast<double>(k);
        if (x * x + y * y + z * z > r2) continue;
        visit({sphere.center[0] + x, sphere.center[1] + y, sphere.center[2] + z});
      }
    }
  }
}

std::vector<Vec3> sample_spin_sites(const YigSphere& sphere) {
  std::vector<Vec3> sites;
  for_each_site(sphere, [&](const Vec3& p) { sites.push_back(p); });
  return sites;
}

std::size_t site_count(const YigSphere& sphere) {
  std::size_t n = 0;
  for_each_site(sphere, [&](const Vec3&) { ++n; });
  return n;
}

double wire_inverse_distance_sum(const YigSphere& sphere, const FluxQubitGeom& fq) {
  if (!(fq.wire_distance > sphere.radius))
    throw GeometryError("flux-qubit wire must lie outside the YIG sphere");
  const double wx = sphere.center[0] - fq.wire_distance;
  const double wy = sphere.center[1];
  CompensatedSum sum;
  for_each_site(sphere, [&](const Vec3& p) {
    const double r = std::hypot(p[0] - wx, p[1] - wy);
    if (r == 0.0) throw GeometryError("spin site lies on the flux-qubit wire axis");
    sum.add(1.0 / r);
  });
  return sum.value();
}

double dipolar_sum(const YigSphere& sphere, const Vec3& nv_position) {
  const double dx0 = nv_position[0] - sphere.center[0];
  const double dy0 = nv_position[1] - sphere.center[1];
  const double dz0 = nv_position[2] - sphere.center[2];
  if (dx0 * dx0 + dy0 * dy0 + dz0 * dz0 <= sphere.radius * sphere.radius)
    throw GeometryError("NV position lies inside the YIG sphere");
  CompensatedSum sum;
  for_each_site(sphere, [&](const Vec3& p) {
    const double dx = p[0] - nv_position[0];
    const double dy = p[1] - nv_position[1];
    const double dz = p[2] - nv_position[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double r = std::sqrt(r2);
    const double cos2 = dz * dz / r2;
    sum.add((3.0 * cos2 - 1.0) / (r2 * r));
  });
  return sum.value();
}

double coupling_g_fy(const YigSphere& sphere, const FluxQubitGeom& fq) {
  const auto n = site_count(sphere);
  if (n == 0) return 0.0;
  const double collective = std::sqrt(2.0 * sphere.spin_s / static_cast<double>(n));
  return units::mu0 / units::two_pi * std::abs(units::gamma_e) * fq.persistent_current * collective *
         wire_inverse_distance_sum(sphere, fq);
}

double coupling_g_yn(const YigSphere& sphere, const NvGeom& nv) {
  const auto n = site_count(sphere);
  if (n == 0) return 0.0;
  const double collective = std::sqrt(2.0 * sphere.spin_s / static_cast<double>(n));
  const double prefactor = units::mu0 / (4.0 * units::pi) * units::gamma_e * units::gamma_e * units::hbar;
  return -prefactor * collective * dipolar_sum(sphere, nv.position(sphere));
}

double shift_delta_yn(const YigSphere& sphere, const NvGeom& nv) {
  const double prefactor = units::mu0 / (4.0 * units::pi) * units::gamma_e * units::gamma_e * units::hbar;
  return prefactor * sphere.spin_s * dipolar_sum(sphere, nv.position(sphere));
}

KittelMode KittelMode::calibrated(double omega_f, double detuning, double b_local, double b_operating,
                                  double gamma_e) {
  KittelMode mode;
  mode.b_local = b_local;
  mode.gamma_e = gamma_e;
  mode.omega_offset = omega_f - detuning - std::abs(gamma_e) * (b_operating - b_local);
  return mode;
}

double kittel_frequency(double b_total, const KittelMode& mode) {
  return mode.omega_offset + std::abs(mode.gamma_e) * (b_total - mode.b_local);
}

}  // namespace hqm::geometry
