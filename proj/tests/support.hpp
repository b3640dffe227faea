#pragma once

#include <random>

#include "hqm/linalg.hpp"

namespace hqm::test {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = complex(n(rng), n(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t d, std::mt19937& rng) {
  const ComplexMatrix a = random_matrix(d, d, rng);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_density(std::size_t d, std::mt19937& rng) {
  const ComplexMatrix a = random_matrix(d, d, rng);
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace hqm::test
