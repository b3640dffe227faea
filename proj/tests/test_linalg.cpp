#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hqm/linalg.hpp"
#include "support.hpp"

using namespace hqm;
using hqm::test::pauli_x;
using hqm::test::pauli_z;

TEST_CASE("hilbert space dimensions") {
  HilbertSpace s{2, 4, 3};
  CHECK(s.total_dim() == 24);
  CHECK(s.factor_count() == 3);
  CHECK_THROWS_AS(HilbertSpace({2, 0}), DimensionError);
  CHECK_THROWS_AS(HilbertSpace(std::vector<std::size_t>{}), DimensionError);
}

TEST_CASE("kron") {
  CHECK(kron(identity(2), identity(3)).isApprox(identity(6)));

  const ComplexMatrix zi = kron(pauli_z(), identity(2));
  CHECK(zi.diagonal().real().isApprox(Eigen::Vector4d(1, 1, -1, -1)));

  ComplexVector e0 = ComplexVector::Zero(4);
  e0(0) = 1.0;
  const ComplexVector out = kron(pauli_x(), pauli_x()) * e0;
  CHECK(std::abs(out(3) - complex(1.0)) < 1e-15);
  CHECK(out.norm() == doctest::Approx(1.0));

  std::mt19937 rng(11);
  const auto a = test::random_matrix(2, 3, rng);
  const auto b = test::random_matrix(3, 2, rng);
  const auto c = test::random_matrix(2, 2, rng);
  const auto b2 = test::random_matrix(3, 2, rng);
  CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).norm() < 1e-12);
  CHECK((kron(a, b + 2.0 * b2) - kron(a, b) - 2.0 * kron(a, b2)).norm() < 1e-12);
  CHECK((kron({a, b, c}) - kron(a, kron(b, c))).norm() < 1e-12);
}

TEST_CASE("embed") {
  CHECK(embed(pauli_z(), {2, 3}, 0).isApprox(kron(pauli_z(), identity(3))));
  CHECK(embed(identity(4), {2, 4, 3}, 1).isApprox(identity(24)));
  CHECK_THROWS_AS(embed(identity(3), {2, 4, 3}, 0), DimensionError);
  CHECK_THROWS(embed(identity(2), {2, 4, 3}, 5));

  std::mt19937 rng(3);
  for (int k = 0; k < 5; ++k) {
    const auto a = embed(test::random_matrix(4, 4, rng), {2, 4, 3}, 1);
    const auto b = embed(test::random_matrix(3, 3, rng), {2, 4, 3}, 2);
    CHECK(commutator(a, b).norm() < 1e-12);
  }
}

TEST_CASE("matrix exponential") {
  CHECK(matrix_exponential(ComplexMatrix::Zero(5, 5)).isApprox(identity(5)));

  const ComplexMatrix u = matrix_exponential(complex(0.0, std::numbers::pi / 2) * pauli_x());
  CHECK((u - complex(0.0, 1.0) * pauli_x()).norm() < 1e-13);

  Eigen::VectorXcd d(4);
  d << complex(0.3, 1.0), complex(-2.0, 0.0), complex(5.0, -7.0), complex(0.0, 40.0);
  const ComplexMatrix e = matrix_exponential(d.asDiagonal().toDenseMatrix());
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(e(i, i) - std::exp(d(i))) < 1e-12 * std::abs(std::exp(d(i))));

  std::mt19937 rng(5);
  for (int k = 0; k < 10; ++k) {
    ComplexMatrix m = test::random_matrix(6, 6, rng);
    m *= 10.0 / m.norm();
    const ComplexMatrix p = matrix_exponential(m) * matrix_exponential(-m);
    CHECK((p - identity(6)).norm() < 1e-9);
  }

  CHECK_THROWS_AS(matrix_exponential(ComplexMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("matrix exponential agrees with eigendecomposition for Hermitian generators") {
  std::mt19937 rng(17);
  const ComplexMatrix h = test::random_hermitian(8, rng) * 30.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const ComplexVector phases = (complex(0, -1) * es.eigenvalues().cast<complex>()).array().exp();
  const ComplexMatrix ref = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  CHECK((matrix_exponential(complex(0, -1) * h) - ref).norm() < 1e-10);
}

TEST_CASE("partial trace") {
  std::mt19937 rng(7);
  const auto ra = test::random_density(2, rng);
  const auto rb = test::random_density(3, rng);
  const auto rc = test::random_density(4, rng);
  const HilbertSpace s{2, 3, 4};
  const ComplexMatrix rho = kron({ra, rb, rc});
  CHECK((partial_trace(rho, s, {0}) - ra).norm() < 1e-13);
  CHECK((partial_trace(rho, s, {1}) - rb).norm() < 1e-13);
  CHECK((partial_trace(rho, s, {0, 2}) - kron(ra, rc)).norm() < 1e-13);
  CHECK((partial_trace(rho, s, {0, 1, 2}) - rho).norm() < 1e-13);

  const ComplexMatrix scaled = kron(ra, 3.0 * rb);
  CHECK((partial_trace(scaled, {2, 3}, {0}) - 3.0 * ra).norm() < 1e-13);

  const auto mixed = test::random_density(24, rng);
  CHECK(std::abs(partial_trace(mixed, s, {1}).trace() - complex(1.0)) < 1e-13);

  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  CHECK((partial_trace(bell * bell.adjoint(), {2, 2}, {1}) - 0.5 * identity(2)).norm() < 1e-15);

  CHECK_THROWS_AS(partial_trace(identity(5), s, {0}), DimensionError);
  CHECK_THROWS(partial_trace(rho, s, {3}));
}

TEST_CASE("vectorization is column stacking") {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const ComplexVector v = vectorize(m);
  CHECK(v(1) == complex(3.0));
  CHECK(v(2) == complex(2.0));
  CHECK(unvectorize(v, 2) == m);

  std::mt19937 rng(2);
  const auto a = test::random_matrix(3, 3, rng);
  const auto x = test::random_matrix(3, 3, rng);
  const auto b = test::random_matrix(3, 3, rng);
  CHECK((vectorize(a * x * b) - kron(b.transpose(), a) * vectorize(x)).norm() < 1e-12);
}

TEST_CASE("liouvillian") {
  CHECK(liouvillian(ComplexMatrix::Zero(3, 3), {}).norm() == 0.0);

  std::mt19937 rng(13);
  const auto h = test::random_hermitian(4, rng);
  const auto rho = test::random_density(4, rng);
  const ComplexMatrix direct = complex(0, -1) * commutator(h, rho);
  CHECK((unvectorize(liouvillian(h, {}) * vectorize(rho), 4) - direct).norm() < 1e-12);

  std::vector<Dissipator> ds{{test::random_matrix(4, 4, rng), 0.7}, {test::random_matrix(4, 4, rng), 2.5}};
  for (int k = 0; k < 5; ++k) {
    const auto r = test::random_hermitian(4, rng);
    ComplexMatrix expected = complex(0, -1) * commutator(h, r);
    for (const auto& d : ds) {
      const ComplexMatrix ld = d.op.adjoint() * d.op;
      expected += d.rate * (d.op * r * d.op.adjoint() - 0.5 * (ld * r + r * ld));
    }
    CHECK((unvectorize(liouvillian(h, ds) * vectorize(r), 4) - expected).norm() < 1e-12);
    CHECK((lindblad_rhs(h, ds, r) - expected).norm() < 1e-12);
  }

  CHECK_THROWS_AS(liouvillian(h, {{identity(4), -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(liouvillian(h, {{identity(3), 1.0}}), DimensionError);
}

TEST_CASE("liouvillian propagation preserves trace of reduced states") {
  std::mt19937 rng(23);
  const HilbertSpace s{2, 3};
  const auto h = test::random_hermitian(6, rng);
  std::vector<Dissipator> ds{{embed(test::random_matrix(2, 2, rng), s, 0), 0.4}};
  const auto rho = test::random_density(6, rng);
  const ComplexMatrix prop = matrix_exponential(liouvillian(h, ds) * 1.0);
  const ComplexMatrix out = unvectorize(prop * vectorize(rho), 6);
  CHECK(std::abs(partial_trace(out, s, {1}).trace() - complex(1.0)) < 1e-9);
}

TEST_CASE("spectral helpers") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.25;
  m(1, 1) = -0.5;
  CHECK(min_eigenvalue(m) == doctest::Approx(-0.5));

  ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));

  ComplexMatrix nh = identity(2);
  nh(0, 1) = complex(0.0, 1e-3);
  CHECK(hermiticity_error(nh) == doctest::Approx(1e-3));
  CHECK_FALSE(is_hermitian(nh));
  CHECK(is_hermitian(pauli_x()));
}
