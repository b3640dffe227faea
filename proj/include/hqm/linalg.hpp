#pragma once

// Dense complex linear algebra and superoperator helpers.
//
// Vectorization convention: column stacking. vec(rho) concatenates the
// columns of rho, so vec(A X B) = (B^T kron A) vec(X). Every superoperator
// in this project follows it.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hqm {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double default_hermitian_tol = 1e-9;
inline constexpr double default_expm_tol = 1e-12;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered tensor-factor dimensions of a composite Hilbert space.
class HilbertSpace {
 public:
  HilbertSpace(std::initializer_list<std::size_t> dims);
  explicit HilbertSpace(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t factor_count() const { return dims_.size(); }
  std::size_t dim(std::size_t index) const { return dims_.at(index); }
  std::size_t total_dim() const { return total_; }

  bool operator==(const HilbertSpace&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

/// A dissipation channel D[op] with rate: rate * (op rho op^+ - {op^+ op, rho}/2).
struct Dissipator {
  ComplexMatrix op;
  double rate = 0.0;
};

ComplexMatrix identity(std::size_t n);

bool is_hermitian(const ComplexMatrix& m, double tol = default_hermitian_tol);
double hermiticity_error(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors);

/// op acting on factor `index` of `space`, identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, const HilbertSpace& space, std::size_t index);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Scaling and squaring with a degree-13 Pade kernel.
ComplexMatrix matrix_exponential(const ComplexMatrix& m, double tol = default_expm_tol);

/// Reduced operator on the factors listed in `keep` (ascending factor order).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const HilbertSpace& space,
                            const std::set<std::size_t>& keep);

ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, std::size_t dim);

/// Superoperator L with vec(d rho/dt) = L vec(rho) for
/// d rho/dt = -i[h, rho] + sum_k rate_k D[op_k] rho.
ComplexMatrix liouvillian(const ComplexMatrix& h, const std::vector<Dissipator>& dissipators);

/// Right-hand side of the master equation evaluated directly on rho.
ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<Dissipator>& dissipators,
                           const ComplexMatrix& rho);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& m);

/// Half the trace norm of (a - b) for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace hqm
