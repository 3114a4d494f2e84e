#include "gdl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gdl {

ComplexMatrix::ComplexMatrix(std::size_t n, std::vector<cplx> entries)
    : n_(n), data_(std::move(entries)) {
  if (data_.size() != n_ * n_) {
    throw DimensionMismatch("matrix of dimension " + std::to_string(n_) + " needs " +
                            std::to_string(n_ * n_) + " entries, got " +
                            std::to_string(data_.size()));
  }
  if (!all_finite()) throw InvalidSpec("matrix has non-finite entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double ComplexMatrix::hermitian_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

ComplexMatrix& ComplexMatrix::shift_diagonal(cplx s) {
  for (std::size_t i = 0; i < n_; ++i) (*this)(i, i) += s;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (other.n_ != n_) throw DimensionMismatch("matrix sum: dimensions differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (other.n_ != n_) throw DimensionMismatch("matrix difference: dimensions differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

namespace {

// y[k] += s * x[k] on interleaved complex storage.
inline void axpy(cplx s, const cplx* x, cplx* y, std::size_t len) {
  const double sr = s.real(), si = s.imag();
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
#pragma omp simd
  for (std::size_t k = 0; k < len; ++k) {
    const double xr = xd[2 * k], xi = xd[2 * k + 1];
    yd[2 * k] += sr * xr - si * xi;
    yd[2 * k + 1] += sr * xi + si * xr;
  }
}

}  // namespace

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("matrix product: dimensions differ");
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      if (aik != cplx(0.0)) axpy(aik, b.row(k).data(), c.row(i).data(), n);
    }
  return c;
}

ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("matrix product: dimensions differ");
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c(i, j) = kernels::dot_conj(a.row(i).data(), b.row(j).data(), n);
  return c;
}

ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.adjoint() * b;
}

double hermitian_tolerance(const ComplexMatrix& m) {
  return 1e-12 * std::max(1.0, m.max_abs());
}

namespace {

void require_hermitian(const ComplexMatrix& m, const char* who) {
  const double defect = m.hermitian_defect();
  if (!(defect <= hermitian_tolerance(m))) {
    throw NotHermitian(std::string(who) + ": input is not Hermitian (defect " +
                       std::to_string(defect) + ")");
  }
}

// Reduces the Hermitian matrix held in `a` to real symmetric tridiagonal form.
// On exit d holds the diagonal and e[i] the modulus of the (i+1, i) entry.
void householder_tridiagonalize(ComplexMatrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.size();
  std::vector<cplx> v(n), vbar(n), p(n), w(n), wbar(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // length of the column below the diagonal
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    const cplx x0 = a(k + 1, k);
    const double tail2 = xnorm2 - std::norm(x0);
    if (xnorm == 0.0 || tail2 <= 0.0) continue;  // already tridiagonal in this column
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;

    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) vnorm2 += std::norm(v[i]);
    const double tau = 2.0 / vnorm2;

    for (std::size_t i = 0; i < m; ++i) vbar[i] = std::conj(v[i]);
    // p = tau * A22 v
    for (std::size_t i = 0; i < m; ++i) {
      const cplx* arow = a.row(k + 1 + i).data() + (k + 1);
      p[i] = tau * kernels::dot_conj(arow, vbar.data(), m);
    }
    const cplx vp = kernels::dot_conj(p.data(), v.data(), m);  // v^* p, real in exact arithmetic
    const double half_k = 0.5 * tau * vp.real();
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = p[i] - half_k * v[i];
      wbar[i] = std::conj(w[i]);
    }

    // A22 -= v w^* + w v^*
    for (std::size_t i = 0; i < m; ++i) {
      cplx* arow = a.row(k + 1 + i).data() + (k + 1);
      axpy(-v[i], wbar.data(), arow, m);
      axpy(-w[i], vbar.data(), arow, m);
    }
    a(k + 1, k) = alpha;
    a(k, k + 1) = std::conj(alpha);
    for (std::size_t i = k + 2; i < n; ++i) {
      a(i, k) = 0.0;
      a(k, i) = 0.0;
    }
  }
  d.resize(n);
  e.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(a(i + 1, i));
}

// Implicit-shift QL on a real symmetric tridiagonal matrix; eigenvalues only.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  constexpr int kMaxSweeps = 64;
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n);
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxSweeps) {
          throw NoConvergence("tridiagonal QL: no convergence after 64 sweeps for eigenvalue " +
                              std::to_string(l));
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  require_hermitian(m, "hermitian_eigenvalues");
  const std::size_t n = m.size();
  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  std::vector<double> d, e;
  householder_tridiagonalize(a, d, e);
  tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

namespace kernels {

cplx dot_conj(const cplx* x, const cplx* y, std::size_t len) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  double re = 0.0, im = 0.0;
#pragma omp simd reduction(+ : re, im)
  for (std::size_t k = 0; k < len; ++k) {
    const double xr = xd[2 * k], xi = xd[2 * k + 1];
    const double yr = yd[2 * k], yi = yd[2 * k + 1];
    re += xr * yr + xi * yi;
    im += xi * yr - xr * yi;
  }
  return {re, im};
}

namespace {

// out[q] = sum_k x_k * conj(y_{q,k}) for four rows y_q spaced `stride` apart.
inline void dot_conj4(const cplx* x, const cplx* y, std::size_t stride, std::size_t len,
                      cplx* out) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* y0 = reinterpret_cast<const double*>(y);
  const double* y1 = reinterpret_cast<const double*>(y + stride);
  const double* y2 = reinterpret_cast<const double*>(y + 2 * stride);
  const double* y3 = reinterpret_cast<const double*>(y + 3 * stride);
  double r0 = 0, i0 = 0, r1 = 0, i1 = 0, r2 = 0, i2 = 0, r3 = 0, i3 = 0;
#pragma omp simd reduction(+ : r0, i0, r1, i1, r2, i2, r3, i3)
  for (std::size_t k = 0; k < len; ++k) {
    const double xr = xd[2 * k], xi = xd[2 * k + 1];
    r0 += xr * y0[2 * k] + xi * y0[2 * k + 1];
    i0 += xi * y0[2 * k] - xr * y0[2 * k + 1];
    r1 += xr * y1[2 * k] + xi * y1[2 * k + 1];
    i1 += xi * y1[2 * k] - xr * y1[2 * k + 1];
    r2 += xr * y2[2 * k] + xi * y2[2 * k + 1];
    i2 += xi * y2[2 * k] - xr * y2[2 * k + 1];
    r3 += xr * y3[2 * k] + xi * y3[2 * k + 1];
    i3 += xi * y3[2 * k] - xr * y3[2 * k + 1];
  }
  out[0] = {r0, i0};
  out[1] = {r1, i1};
  out[2] = {r2, i2};
  out[3] = {r3, i3};
}

// Rows x and x + stride against four rows of y: out[0..3] for x, out[4..7] for x + stride.
inline void dot_conj2x4(const cplx* x, const cplx* y, std::size_t stride, std::size_t len,
                        cplx* out) {
  const double* xa = reinterpret_cast<const double*>(x);
  const double* xb = reinterpret_cast<const double*>(x + stride);
  const double* y0 = reinterpret_cast<const double*>(y);
  const double* y1 = reinterpret_cast<const double*>(y + stride);
  const double* y2 = reinterpret_cast<const double*>(y + 2 * stride);
  const double* y3 = reinterpret_cast<const double*>(y + 3 * stride);
  double ar0 = 0, ai0 = 0, ar1 = 0, ai1 = 0, ar2 = 0, ai2 = 0, ar3 = 0, ai3 = 0;
  double br0 = 0, bi0 = 0, br1 = 0, bi1 = 0, br2 = 0, bi2 = 0, br3 = 0, bi3 = 0;
#pragma omp simd reduction(+ : ar0, ai0, ar1, ai1, ar2, ai2, ar3, ai3, br0, bi0, br1, bi1, \
                               br2, bi2, br3, bi3)
  for (std::size_t k = 0; k < len; ++k) {
    const double xr = xa[2 * k], xi = xa[2 * k + 1];
    const double wr = xb[2 * k], wi = xb[2 * k + 1];
    const double y0r = y0[2 * k], y0i = y0[2 * k + 1];
    const double y1r = y1[2 * k], y1i = y1[2 * k + 1];
    const double y2r = y2[2 * k], y2i = y2[2 * k + 1];
    const double y3r = y3[2 * k], y3i = y3[2 * k + 1];
    ar0 += xr * y0r + xi * y0i;
    ai0 += xi * y0r - xr * y0i;
    ar1 += xr * y1r + xi * y1i;
    ai1 += xi * y1r - xr * y1i;
    ar2 += xr * y2r + xi * y2i;
    ai2 += xi * y2r - xr * y2i;
    ar3 += xr * y3r + xi * y3i;
    ai3 += xi * y3r - xr * y3i;
    br0 += wr * y0r + wi * y0i;
    bi0 += wi * y0r - wr * y0i;
    br1 += wr * y1r + wi * y1i;
    bi1 += wi * y1r - wr * y1i;
    br2 += wr * y2r + wi * y2i;
    bi2 += wi * y2r - wr * y2i;
    br3 += wr * y3r + wi * y3i;
    bi3 += wi * y3r - wr * y3i;
  }
  out[0] = {ar0, ai0};
  out[1] = {ar1, ai1};
  out[2] = {ar2, ai2};
  out[3] = {ar3, ai3};
  out[4] = {br0, bi0};
  out[5] = {br1, bi1};
  out[6] = {br2, bi2};
  out[7] = {br3, bi3};
}

}  // namespace

double cholesky_lower_in_place(cplx* a, std::size_t n) {
  constexpr std::size_t kBlock = 64;
  double logdet = 0.0;
  for (std::size_t j0 = 0; j0 < n; j0 += kBlock) {
    const std::size_t j1 = std::min(n, j0 + kBlock);
    // Fold the contribution of all finished columns into this block column.
    if (j0 > 0) {
      std::size_t i = j0;
      // Rows inside the block are ragged; rows below it take the 2x4 kernel.
      for (; i < j1 && i < n; ++i) {
        cplx* ri = a + i * n;
        const std::size_t jmax = std::min(i + 1, j1);
        std::size_t j = j0;
        for (; j + 4 <= jmax; j += 4) {
          cplx out[4];
          dot_conj4(ri, a + j * n, n, j0, out);
          for (int q = 0; q < 4; ++q) ri[j + q] -= out[q];
        }
        for (; j < jmax; ++j) ri[j] -= dot_conj(ri, a + j * n, j0);
      }
      for (; i + 2 <= n; i += 2) {
        cplx* ri = a + i * n;
        cplx* ri1 = ri + n;
        std::size_t j = j0;
        for (; j + 4 <= j1; j += 4) {
          cplx out[8];
          dot_conj2x4(ri, a + j * n, n, j0, out);
          for (int q = 0; q < 4; ++q) {
            ri[j + q] -= out[q];
            ri1[j + q] -= out[4 + q];
          }
        }
        for (; j < j1; ++j) {
          ri[j] -= dot_conj(ri, a + j * n, j0);
          ri1[j] -= dot_conj(ri1, a + j * n, j0);
        }
      }
      for (; i < n; ++i) {
        cplx* ri = a + i * n;
        for (std::size_t j = j0; j < j1; ++j) ri[j] -= dot_conj(ri, a + j * n, j0);
      }
    }
    for (std::size_t j = j0; j < j1; ++j) {
      cplx* rj = a + j * n;
      const double diag = rj[j].real() - dot_conj(rj + j0, rj + j0, j - j0).real();
      if (!(diag > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      const double ljj = std::sqrt(diag);
      rj[j] = ljj;
      logdet += 2.0 * std::log(ljj);
      const double inv = 1.0 / ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        cplx* ri = a + i * n;
        ri[j] = (ri[j] - dot_conj(ri + j0, rj + j0, j - j0)) * inv;
      }
    }
  }
  return logdet;
}

}  // namespace kernels

HermitianFactorization cholesky(ComplexMatrix m) {
  require_hermitian(m, "cholesky");
  const std::size_t n = m.size();
  const double logdet = kernels::cholesky_lower_in_place(m.data(), n);
  if (std::isnan(logdet)) throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = 0.0;
  return {std::move(m), logdet};
}

ComplexMatrix solve_hermitian_pd(const HermitianFactorization& f, const ComplexMatrix& rhs) {
  const ComplexMatrix& l = f.lower;
  const std::size_t n = l.size();
  if (rhs.size() != n) {
    throw DimensionMismatch("solve_hermitian_pd: rhs has " + std::to_string(rhs.size()) +
                            " rows, factor has " + std::to_string(n));
  }
  ComplexMatrix x = rhs;
  // L y = b, row by row.
  for (std::size_t i = 0; i < n; ++i) {
    cplx* xi = x.row(i).data();
    for (std::size_t k = 0; k < i; ++k) {
      const cplx lik = l(i, k);
      if (lik != cplx(0.0)) axpy(-lik, x.row(k).data(), xi, n);
    }
    const double inv = 1.0 / l(i, i).real();
    for (std::size_t j = 0; j < n; ++j) xi[j] *= inv;
  }
  // L^* x = y, bottom up.
  for (std::size_t i = n; i-- > 0;) {
    cplx* xi = x.row(i).data();
    for (std::size_t k = i + 1; k < n; ++k) {
      const cplx lki = std::conj(l(k, i));
      if (lki != cplx(0.0)) axpy(-lki, x.row(k).data(), xi, n);
    }
    const double inv = 1.0 / l(i, i).real();
    for (std::size_t j = 0; j < n; ++j) xi[j] *= inv;
  }
  return x;
}

ComplexMatrix inverse_hermitian_pd(const HermitianFactorization& f) {
  return solve_hermitian_pd(f, ComplexMatrix::identity(f.lower.size()));
}

}  // namespace gdl
