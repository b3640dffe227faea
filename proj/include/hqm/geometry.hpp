#pragma once

// YIG spin lattice sampling and the magnon coupling / shift lattice sums.
//
// Frame: the YIG sphere is centred at `YigSphere::center`; the external
// field and the NV quantization axis are along +z; the flux-qubit side wire
// runs parallel to z.

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hqm::geometry {

using Vec3 = std::array<double, 3>;

class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct YigSphere {
  double radius = 45e-9;        // m
  double spin_density = 4.2e27; // sites per m^3
  double spin_s = 0.5;          // effective spin per lattice site
  Vec3 center{0.0, 0.0, 0.0};

  /// Simple-cubic spacing (spin_density)^(-1/3).
  double lattice_constant() const;
  /// spin_density * (4/3) pi radius^3.
  double continuum_site_count() const;
  void validate() const;
};

/// Flux-qubit side wire: infinite line parallel to z through
/// (center.x - wire_distance, center.y) of the sphere.
struct FluxQubitGeom {
  double persistent_current = 500e-9;  // A
  double wire_distance = 0.25e-6;      // m, from the YIG centre
};

/// NV on the +x axis, `surface_distance` outside the sphere surface.
struct NvGeom {
  double surface_distance = 60e-9;  // m

  Vec3 position(const YigSphere& sphere) const;
};

/// Lattice sites inside the sphere, in a fixed (i, j, k) order.
std::vector<Vec3> sample_spin_sites(const YigSphere& sphere);

/// Visits the same sites as sample_spin_sites without materializing them.
void for_each_site(const YigSphere& sphere, const std::function<void(const Vec3&)>& visit);

std::size_t site_count(const YigSphere& sphere);

/// FQ-Kittel-mode coupling, rad/s:
/// (mu0 / 2 pi) |gamma_e| I_p sqrt(2 s / N) sum_i 1 / r_F,i.
double coupling_g_fy(const YigSphere& sphere, const FluxQubitGeom& fq);

/// Kittel-mode-NV coupling, rad/s (sign retained):
/// -(mu0 / 4 pi) gamma_e^2 hbar sqrt(2 s / N) sum_i (3 cos^2 theta_i - 1) / r_N,i^3.
double coupling_g_yn(const YigSphere& sphere, const NvGeom& nv);

/// Static NV shift from the polarized YIG, rad/s:
/// (mu0 / 4 pi) gamma_e^2 hbar s sum_i (3 cos^2 theta_i - 1) / r_N,i^3.
double shift_delta_yn(const YigSphere& sphere, const NvGeom& nv);

/// Sum over sites of 1 / r_F and the dipolar angular sum, exposed for tests.
double wire_inverse_distance_sum(const YigSphere& sphere, const FluxQubitGeom& fq);
double dipolar_sum(const YigSphere& sphere, const Vec3& nv_position);

/// Uniform (k = 0) magnon mode: omega_K(B) = offset + |gamma_e| (B - b_local).
struct KittelMode {
  double omega_offset = 0.0;  // rad/s at B = b_local
  double b_local = 0.0;       // T
  double gamma_e = -1.76e11;  // rad s^-1 T^-1

  /// Offset chosen so that omega_F - omega_K(b_operating) = detuning.
  static KittelMode calibrated(double omega_f, double detuning, double b_local, double b_operating,
                               double gamma_e);
};

double kittel_frequency(double b_total, const KittelMode& mode);

}  // namespace hqm::geometry
