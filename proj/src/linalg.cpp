#include "hqm/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace hqm {

HilbertSpace::HilbertSpace(std::initializer_list<std::size_t> dims)
    : HilbertSpace(std::vector<std::size_t>(dims)) {}

HilbertSpace::HilbertSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("HilbertSpace needs at least one factor");
  for (auto d : dims_) {
    if (d == 0) throw DimensionError("HilbertSpace factor dimensions must be positive");
    total_ *= d;
  }
}

ComplexMatrix identity(std::size_t n) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermiticity is defined for square matrices only");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_error(m) <= tol; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
  if (factors.size() == 0) throw DimensionError("kron of an empty factor list");
  auto it = factors.begin();
  ComplexMatrix out = *it++;
  for (; it != factors.end(); ++it) out = kron(out, *it);
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, const HilbertSpace& space, std::size_t index) {
  if (index >= space.factor_count()) throw DimensionError("embed: factor index out of range");
  const auto d = static_cast<Eigen::Index>(space.dim(index));
  if (op.rows() != d || op.cols() != d)
    throw DimensionError("embed: operator dimension does not match factor " + std::to_string(index));
  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < index; ++k) left *= space.dim(k);
  for (std::size_t k = index + 1; k < space.factor_count(); ++k) right *= space.dim(k);
  return kron(kron(identity(left), op), identity(right));
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

namespace {

// Higham (2005) degree-13 Pade coefficients and the matching theta.
constexpr std::array<double, 14> pade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double theta13 = 5.371920351148152;

}  // namespace

ComplexMatrix matrix_exponential(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("matrix_exponential requires a square matrix");
  (void)tol;  // the Pade-13 kernel reaches unit roundoff for every scaled input
  const auto n = m.rows();
  if (n == 0) return m;

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const ComplexMatrix a = m / std::ldexp(1.0, squarings);

  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const auto& b = pade13;

  const ComplexMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const ComplexMatrix u = a * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const ComplexMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const ComplexMatrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const HilbertSpace& space,
                            const std::set<std::size_t>& keep) {
  const auto total = static_cast<Eigen::Index>(space.total_dim());
  if (rho.rows() != total || rho.cols() != total)
    throw DimensionError("partial_trace: operator dimension does not match the space");
  for (auto k : keep)
    if (k >= space.factor_count()) throw DimensionError("partial_trace: kept factor out of range");

  const auto& dims = space.dims();
  const std::size_t nf = dims.size();
  std::size_t kept_dim = 1;
  for (auto k : keep) kept_dim *= dims[k];

  // Row-major multi-index strides of the full space.
  std::vector<std::size_t> stride(nf, 1);
  for (std::size_t k = nf - 1; k-- > 0;) stride[k] = stride[k + 1] * dims[k + 1];

  auto kept_index = [&](std::size_t full) {
    std::size_t idx = 0;
    for (auto k : keep) idx = idx * dims[k] + (full / stride[k]) % dims[k];
    return idx;
  };
  auto traced_index = [&](std::size_t full) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < nf; ++k)
      if (!keep.contains(k)) idx = idx * dims[k] + (full / stride[k]) % dims[k];
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept_dim),
                                          static_cast<Eigen::Index>(kept_dim));
  const auto n = static_cast<std::size_t>(total);
  std::vector<std::size_t> kept(n), traced(n);
  for (std::size_t i = 0; i < n; ++i) {
    kept[i] = kept_index(i);
    traced[i] = traced_index(i);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (traced[i] == traced[j])
        out(static_cast<Eigen::Index>(kept[i]), static_cast<Eigen::Index>(kept[j])) +=
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) throw DimensionError("unvectorize: length is not dim^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

namespace {

void check_dissipators(const ComplexMatrix& h, const std::vector<Dissipator>& dissipators) {
  if (h.rows() != h.cols()) throw DimensionError("Hamiltonian must be square");
  for (const auto& d : dissipators) {
    if (d.op.rows() != h.rows() || d.op.cols() != h.cols())
      throw DimensionError("dissipator dimension does not match the Hamiltonian");
    if (!(d.rate >= 0.0)) throw std::invalid_argument("dissipator rates must be non-negative");
  }
}

}  // namespace

ComplexMatrix liouvillian(const ComplexMatrix& h, const std::vector<Dissipator>& dissipators) {
  check_dissipators(h, dissipators);
  const auto d = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const complex i{0.0, 1.0};
  ComplexMatrix l = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : dissipators) {
    if (c.rate == 0.0) continue;
    const ComplexMatrix odo = c.op.adjoint() * c.op;
    l += c.rate * (kron(c.op.conjugate(), c.op) - 0.5 * kron(id, odo) - 0.5 * kron(odo.transpose(), id));
  }
  return l;
}

ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<Dissipator>& dissipators,
                           const ComplexMatrix& rho) {
  check_dissipators(h, dissipators);
  const complex i{0.0, 1.0};
  ComplexMatrix out = -i * commutator(h, rho);
  for (const auto& c : dissipators) {
    if (c.rate == 0.0) continue;
    const ComplexMatrix odo = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (odo * rho + rho * odo));
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("trace_distance: shape mismatch");
  const ComplexMatrix diff = a - b;
  const ComplexMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace hqm
