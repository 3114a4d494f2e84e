#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gdl/ensembles.hpp"
#include "gdl/linalg.hpp"
#include "gdl/rng.hpp"

using namespace gdl;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  return sample_ginibre(n, seed, 0).matrix;
}

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  const ComplexMatrix g = random_matrix(n, seed);
  return g + g.adjoint();
}

ComplexMatrix random_pd(std::size_t n, std::uint64_t seed, double shift = 0.5) {
  const ComplexMatrix g = random_matrix(n, seed);
  ComplexMatrix m = multiply_adjoint(g, g);
  m.shift_diagonal(shift);
  return m;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size() * a.size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

}  // namespace

TEST_CASE("ComplexMatrix rejects malformed input") {
  CHECK_THROWS_AS(ComplexMatrix(2, std::vector<cplx>(3)), DimensionMismatch);
  std::vector<cplx> bad(4);
  bad[2] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(ComplexMatrix(2, bad), InvalidSpec);
}

TEST_CASE("matrix products") {
  const ComplexMatrix a = random_matrix(5, 1), b = random_matrix(5, 2);
  CHECK(max_diff(multiply_adjoint(a, b), a * b.adjoint()) < 1e-14);
  CHECK(max_diff(adjoint_multiply(a, b), a.adjoint() * b) < 1e-14);
  CHECK(max_diff(a * ComplexMatrix::identity(5), a) == 0.0);
}

TEST_CASE("hermitian_eigenvalues examples") {
  const auto id = hermitian_eigenvalues(ComplexMatrix::identity(3));
  REQUIRE(id.size() == 3);
  for (double v : id) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<cplx> d{0.0, 1.0};
  const auto jd = hermitian_eigenvalues(ComplexMatrix::diagonal(d));
  CHECK(jd[0] == doctest::Approx(0.0));
  CHECK(jd[1] == doctest::Approx(1.0));

  // Roots of the characteristic polynomial (tests/oracles/eigen_oracle.py).
  const ComplexMatrix h(4, {2.0, {1, -0.5}, {0, 0.25}, -0.75,
                            {1, 0.5}, -1.0, 0.5, {0.3, 0.2},
                            {0, -0.25}, 0.5, 0.5, {0, 1.5},
                            -0.75, {0.3, -0.2}, {0, -1.5}, 1.25});
  const double expected[] = {-1.6114736559257801, -0.58364841177675484, 1.8990233038594321,
                             3.0460987638431028};
  const auto ev = hermitian_eigenvalues(h);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i] - expected[i]) < 1e-8);
}

TEST_CASE("hermitian_eigenvalues properties") {
  for (std::size_t n : {1u, 2u, 7u, 40u, 130u}) {
    const ComplexMatrix m = random_hermitian(n, 10 + n);
    const auto ev = hermitian_eigenvalues(m);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    const double sum = std::accumulate(ev.begin(), ev.end(), 0.0);
    CHECK(std::abs(sum - m.trace().real()) <= 1e-9 * n * m.max_abs());
    CHECK(ev == hermitian_eigenvalues(m));

    const ComplexMatrix psd = multiply_adjoint(m, m);
    for (double v : hermitian_eigenvalues(psd)) CHECK(v >= -1e-10 * psd.max_abs());
  }
}

TEST_CASE("hermitian_eigenvalues rejects non-Hermitian input") {
  ComplexMatrix m = ComplexMatrix::identity(3);
  m(0, 1) = 1e-3;
  CHECK_THROWS_AS(hermitian_eigenvalues(m), NotHermitian);
}

TEST_CASE("cholesky examples") {
  const auto f = cholesky(ComplexMatrix::identity(2));
  CHECK(f.logdet == 0.0);
  CHECK(f.lower == ComplexMatrix::identity(2));

  ComplexMatrix c = ComplexMatrix::identity(3);
  c *= 4.0;
  CHECK(cholesky(c).logdet == doctest::Approx(3.0 * std::log(4.0)).epsilon(1e-14));

  // logdet of Y(z) + eps^2 against the product of its eigenvalues
  const ComplexMatrix x = random_matrix(8, 3);
  for (cplx z : {cplx(0.0), cplx(0.3, -0.7), cplx(2.0, 1.0)}) {
    ComplexMatrix m = x;
    m.shift_diagonal(-z);
    ComplexMatrix y = multiply_adjoint(m, m);
    y.shift_diagonal(0.01);
    double oracle = 0.0;
    for (double v : hermitian_eigenvalues(y)) oracle += std::log(v);
    CHECK(std::abs(cholesky(y).logdet - oracle) < 1e-8);
  }
}

TEST_CASE("cholesky reconstructs its input") {
  for (std::size_t n : {1u, 3u, 65u, 150u}) {
    const ComplexMatrix m = random_pd(n, 100 + n);
    const auto f = cholesky(m);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(f.lower(i, i).imag() == 0.0);
      CHECK(f.lower(i, i).real() > 0.0);
      for (std::size_t j = i + 1; j < n; ++j) CHECK(f.lower(i, j) == cplx(0.0));
    }
    CHECK(max_diff(multiply_adjoint(f.lower, f.lower), m) <= 1e-10 * m.max_abs());
  }
}

TEST_CASE("cholesky rejects indefinite matrices") {
  const std::vector<cplx> d{1.0, -1.0};
  CHECK_THROWS_AS(cholesky(ComplexMatrix::diagonal(d)), NotPositiveDefinite);
  const std::vector<cplx> z{1.0, 0.0};
  CHECK_THROWS_AS(cholesky(ComplexMatrix::diagonal(z)), NotPositiveDefinite);
}

TEST_CASE("solve_hermitian_pd") {
  const auto fi = cholesky(ComplexMatrix::identity(3));
  CHECK(solve_hermitian_pd(fi, ComplexMatrix::identity(3)) == ComplexMatrix::identity(3));

  const std::vector<cplx> d{2.0, 4.0};
  const ComplexMatrix inv = solve_hermitian_pd(cholesky(ComplexMatrix::diagonal(d)), ComplexMatrix::identity(2));
  const std::vector<cplx> quarter{0.5, 0.25};
  CHECK(max_diff(inv, ComplexMatrix::diagonal(quarter)) < 1e-15);

  const ComplexMatrix m = random_pd(5, 7);
  const ComplexMatrix rhs = random_matrix(5, 8);
  const ComplexMatrix x = solve_hermitian_pd(cholesky(m), rhs);
  CHECK(max_diff(m * x, rhs) <= 1e-10);

  CHECK_THROWS_AS(solve_hermitian_pd(cholesky(m), ComplexMatrix::identity(4)), DimensionMismatch);
}

TEST_CASE("resolvent trace agrees with eigenvalues") {
  const ComplexMatrix g = random_matrix(12, 4);
  const ComplexMatrix psd = multiply_adjoint(g, g);
  for (double x : {1e-3, 0.1, 2.0}) {
    ComplexMatrix shifted = psd;
    shifted.shift_diagonal(x);
    const double via_solve = inverse_hermitian_pd(cholesky(shifted)).trace().real();
    double via_eig = 0.0;
    for (double v : hermitian_eigenvalues(psd)) via_eig += 1.0 / (v + x);
    CHECK(std::abs(via_solve - via_eig) <= 1e-8 * std::max(1.0, via_eig));
    double logdet = 0.0;
    for (double v : hermitian_eigenvalues(shifted)) logdet += std::log(v);
    CHECK(std::abs(cholesky(shifted).logdet - logdet) < 1e-8);
  }
}
