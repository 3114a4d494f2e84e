#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gdl/error.hpp"

namespace gdl {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}
  /// Takes ownership of `entries` (row-major, n*n). Throws DimensionMismatch on a size
  /// mismatch and InvalidSpec on non-finite entries.
  ComplexMatrix(std::size_t n, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cplx> diag);

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::span<const cplx> entries() const { return data_; }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  /// Largest entry modulus.
  double max_abs() const;
  bool all_finite() const;
  /// Largest entrywise |m_ij - conj(m_ji)|.
  double hermitian_defect() const;

  /// Adds `s` to every diagonal entry.
  ComplexMatrix& shift_diagonal(cplx s);
  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// a * b^*, exploiting that only row dot products are needed.
ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b);
/// a^* * b.
ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b);

/// Lower Cholesky factor with real positive diagonal, plus log det of the factored matrix.
struct HermitianFactorization {
  ComplexMatrix lower;
  double logdet = 0.0;
};

/// Symmetry tolerance used by the Hermitian kernels: 1e-12 scaled by max(1, |m|_max).
double hermitian_tolerance(const ComplexMatrix& m);

/// Ascending eigenvalues of a Hermitian matrix (Householder tridiagonalization followed
/// by implicit-shift QL). The input is symmetrized as (m + m^*)/2 first.
/// Throws NotHermitian or NoConvergence (more than 64 QL sweeps for one eigenvalue).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Throws NotHermitian, or NotPositiveDefinite when a pivot is not strictly positive.
HermitianFactorization cholesky(ComplexMatrix m);

/// Solves m * x = rhs for the matrix m factored in `f`. Throws DimensionMismatch.
ComplexMatrix solve_hermitian_pd(const HermitianFactorization& f, const ComplexMatrix& rhs);

/// (m)^{-1} from its factorization.
ComplexMatrix inverse_hermitian_pd(const HermitianFactorization& f);

namespace kernels {

/// In-place lower Cholesky on a row-major n*n buffer; only the lower triangle is read
/// and written. Returns the log determinant, or NaN when a pivot is not positive.
double cholesky_lower_in_place(cplx* a, std::size_t n);

/// sum_k x_k * conj(y_k)
cplx dot_conj(const cplx* x, const cplx* y, std::size_t len);

}  // namespace kernels

}  // namespace gdl
