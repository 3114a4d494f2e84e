#include "gdl/spectral_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "gdl/ensembles.hpp"

namespace gdl {

namespace {

constexpr double kBisectionWidth = 1e-12;
constexpr double kResidualTarget = 1e-10;
constexpr int kNewtonSteps = 5;
constexpr int kMaxDoublings = 60;

// Root of an increasing function f on (lo, hi) with f(lo) < 0 < f(hi).
template <class F, class DF>
SaddleSolution increasing_root(F f, DF df, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > kBisectionWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, SaddleKind::X0, 0.0, lo, hi};
    (fm < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int step = 0; step < kNewtonSteps && fx != 0.0; ++step) {
    const double d = df(x);
    if (!(d > 0.0)) break;
    const double cand = x - fx / d;
    if (!(cand > lo && cand < hi)) break;
    const double fc = f(cand);
    if (!(std::abs(fc) < std::abs(fx))) break;
    x = cand;
    fx = fc;
  }
  // Tiny roots can need more halvings than the absolute width allows.
  for (int it = 0; it < 200 && std::abs(fx) > kResidualTarget; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    (fm < 0.0 ? lo : hi) = mid;
    if (std::abs(fm) < std::abs(fx)) {
      x = mid;
      fx = fm;
    }
  }
  return {x, std::abs(fx), SaddleKind::X0, 0.0, lo, hi};
}

template <class F>
double grow_upper(F f, double hi) {
  for (int k = 0; k < kMaxDoublings; ++k) {
    if (f(hi) > 0.0) return hi;
    hi *= 2.0;
  }
  throw BracketFailure("no sign change found below x = " + std::to_string(hi));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double matrix_scale(const ComplexMatrix& m) { return 1e-12 * std::max(1.0, m.max_abs()); }

// If m = H + cI with H Hermitian, the eigenvalues of H shifted by c.
std::optional<std::vector<cplx>> shifted_hermitian_spectrum(const ComplexMatrix& m) {
  const std::size_t n = m.size();
  const cplx c = m.trace() / static_cast<double>(n);
  ComplexMatrix h = m;
  h.shift_diagonal(-c);
  if (h.hermitian_defect() > matrix_scale(m)) return std::nullopt;
  std::vector<cplx> out;
  for (double lambda : hermitian_eigenvalues(h)) out.emplace_back(lambda + c);
  return out;
}

// tr (Y0 + x)^{-1} pieces for one dense block.
struct BlockResolvents {
  ComplexMatrix g;
  ComplexMatrix g_tilde;
};

BlockResolvents block_resolvents(const ComplexMatrix& shifted, double x) {
  ComplexMatrix y0 = multiply_adjoint(shifted, shifted);
  ComplexMatrix y0t = adjoint_multiply(shifted, shifted);
  y0.shift_diagonal(x);
  y0t.shift_diagonal(x);
  return {inverse_hermitian_pd(cholesky(std::move(y0))),
          inverse_hermitian_pd(cholesky(std::move(y0t)))};
}

// tr(p q) = sum_ij p_ij q_ji
cplx trace_of_product(const ComplexMatrix& p, const ComplexMatrix& q) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) t += p(i, j) * q(j, i);
  return t;
}

}  // namespace

SpectralMeasure SpectralMeasure::from_eigenvalues(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw DimensionMismatch("spectral measure needs at least one atom");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  const double floor = -1e-10 * std::max(1.0, eigenvalues.back());
  if (eigenvalues.front() < floor) {
    throw NumericError("negative eigenvalue " + std::to_string(eigenvalues.front()) +
                       " in a positive semidefinite spectrum");
  }
  for (double& v : eigenvalues) v = std::max(v, 0.0);
  return {std::move(eigenvalues)};
}

double stieltjes(const SpectralMeasure& mu, double x, int power) {
  double sum = 0.0;
  if (power == 1) {
    for (double a : mu.atoms) sum += 1.0 / (a + x);
  } else {
    for (double a : mu.atoms) {
      const double r = 1.0 / (a + x);
      sum += r * r;
    }
  }
  return sum / static_cast<double>(mu.size());
}

std::optional<SaddleSolution> solve_x0(const SpectralMeasure& mu) {
  if (mu.min_atom() > 0.0) {
    double inv = 0.0;
    for (double a : mu.atoms) inv += 1.0 / a;
    if (!(inv / static_cast<double>(mu.size()) > 1.0)) return std::nullopt;
  }
  auto f = [&](double x) { return 1.0 - stieltjes(mu, x * x, 1); };
  auto df = [&](double x) { return 2.0 * x * stieltjes(mu, x * x, 2); };
  const double hi = grow_upper(f, 1.0);
  SaddleSolution s = increasing_root(f, df, 0.0, hi);
  s.kind = SaddleKind::X0;
  return s;
}

SaddleSolution solve_x_eps(const SpectralMeasure& mu, double eps) {
  if (!(eps > 0.0)) throw ConfigError("regularization eps must be positive");
  auto f = [&](double x) { return 1.0 - stieltjes(mu, x * x, 1) - eps / x; };
  auto df = [&](double x) { return 2.0 * x * stieltjes(mu, x * x, 2) + eps / (x * x); };
  const double hi = grow_upper(f, std::max(1.0, 2.0 * eps));
  SaddleSolution s = increasing_root(f, df, eps, hi);
  s.kind = SaddleKind::XEpsilon;
  s.eps = eps;
  return s;
}

double singular_tolerance(const SpectralMeasure& mu) { return 1e-12 * (1.0 + mu.max_atom()); }

DomainVerdict domain_verdict(const SpectralMeasure& mu) {
  DomainVerdict v;
  v.min_eig_Y0 = mu.min_atom();
  if (v.min_eig_Y0 <= singular_tolerance(mu)) {
    v.inv_trace = std::numeric_limits<double>::infinity();
    v.in_D = true;
    return v;
  }
  double inv = 0.0;
  for (double a : mu.atoms) inv += 1.0 / a;
  v.inv_trace = inv / static_cast<double>(mu.size());
  v.in_D = v.inv_trace >= 1.0;
  return v;
}

DeformationModel::DeformationModel(ComplexMatrix a, Reduction reduction)
    : n_(a.size()), a_(std::move(a)) {
  if (n_ == 0) throw DimensionMismatch("deformation matrix is empty");
  if (!a_.all_finite()) throw InvalidSpec("deformation matrix has non-finite entries");
  if (reduction == Reduction::None) {
    blocks_.push_back({a_, 1});
    return;
  }

  UnionFind uf(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j && a_(i, j) != cplx{}) uf.unite(i, j);
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n_; ++i) components[uf.find(i)].push_back(i);

  std::map<std::pair<double, double>, std::size_t> scalar_index;
  std::map<std::vector<double>, std::size_t> block_index;
  auto add_scalar = [&](cplx v, std::size_t mult) {
    const auto [it, inserted] = scalar_index.try_emplace({v.real(), v.imag()}, scalars_.size());
    if (inserted) scalars_.push_back({v, 0});
    scalars_[it->second].multiplicity += mult;
  };

  for (const auto& [root, idx] : components) {
    if (idx.size() == 1) {
      add_scalar(a_(idx[0], idx[0]), 1);
      continue;
    }
    ComplexMatrix b(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) b(r, c) = a_(idx[r], idx[c]);
    std::vector<double> key;
    key.reserve(2 * b.size() * b.size());
    for (const cplx& v : b.entries()) {
      key.push_back(v.real());
      key.push_back(v.imag());
    }
    if (const auto it = block_index.find(key); it != block_index.end()) {
      ++blocks_[it->second].multiplicity;
      continue;
    }
    if (auto spectrum = shifted_hermitian_spectrum(b)) {
      for (const cplx& v : *spectrum) add_scalar(v, 1);
      continue;
    }
    block_index.emplace(std::move(key), blocks_.size());
    blocks_.push_back({std::move(b), 1});
  }
}

std::size_t DeformationModel::largest_block() const {
  std::size_t m = scalars_.empty() ? 0 : 1;
  for (const auto& b : blocks_) m = std::max(m, b.matrix.size());
  return m;
}

SpectralMeasure DeformationModel::nu(cplx z) const {
  std::vector<double> eig;
  eig.reserve(n_);
  for (const auto& s : scalars_) eig.insert(eig.end(), s.multiplicity, std::norm(s.value - z));
  for (const auto& b : blocks_) {
    ComplexMatrix m = b.matrix;
    m.shift_diagonal(-z);
    const auto lambda = hermitian_eigenvalues(multiply_adjoint(m, m));
    for (std::size_t k = 0; k < b.multiplicity; ++k) eig.insert(eig.end(), lambda.begin(), lambda.end());
  }
  return SpectralMeasure::from_eigenvalues(std::move(eig));
}

ResolventTraces DeformationModel::traces(cplx z, double x) const {
  if (!(x > 0.0)) throw ConfigError("resolvent traces need x > 0");
  cplx t1 = 0.0;
  double t2 = 0.0;
  for (const auto& s : scalars_) {
    const cplx d = s.value - z;
    const double r = 1.0 / (std::norm(d) + x);
    const double m = static_cast<double>(s.multiplicity);
    t1 += m * d * (r * r);
    t2 += m * r * r;
  }
  for (const auto& b : blocks_) {
    ComplexMatrix shifted = b.matrix;
    shifted.shift_diagonal(-z);
    const BlockResolvents res = block_resolvents(shifted, x);
    const double m = static_cast<double>(b.multiplicity);
    t1 += m * trace_of_product(shifted * res.g, res.g);
    t2 += m * trace_of_product(res.g, res.g_tilde).real();
  }
  const double inv_n = 1.0 / static_cast<double>(n_);
  return {t1 * inv_n, t2 * inv_n};
}

SpectralMeasure nu_measure(const ComplexMatrix& a, cplx z) {
  return SpectralMeasure::from_eigenvalues(hermitian_eigenvalues(hermitize(a, z).y0));
}

cplx trace_T1(const ComplexMatrix& a, cplx z, double x) {
  return DeformationModel(a, Reduction::None).traces(z, x).t1;
}

double trace_T2(const ComplexMatrix& a, cplx z, double x) {
  return DeformationModel(a, Reduction::None).traces(z, x).t2;
}

DomainVerdict domain_verdict(const ComplexMatrix& a, cplx z) {
  return domain_verdict(nu_measure(a, z));
}

}  // namespace gdl
