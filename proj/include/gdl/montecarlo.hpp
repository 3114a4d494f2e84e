#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdl/ensembles.hpp"
#include "gdl/grid.hpp"

namespace gdl {

struct McConfig {
  std::size_t n = 0;
  std::size_t samples = 1;
  std::optional<double> eps;  ///< unset: n^{-1/2}
  std::uint64_t seed = 0;
  GridSpec grid;
  std::size_t workers = 0;  ///< 0: all hardware threads

  double effective_eps() const;
  /// Throws ConfigError unless samples >= 1, n >= 1 and eps > 0.
  void validate() const;
};

/// (1/n) log det((X - z)(X - z)^* + eps^2). Throws NotPositiveDefinite when eps = 0 and
/// z is numerically an eigenvalue of X.
double log_potential(const ComplexMatrix& x, cplx z, double eps);

/// Repeated log_potential for one X: X X^* is formed once, after which each z costs one
/// O(n^2) assembly plus a Cholesky factorization. Not thread-safe (owns scratch space).
class PotentialEvaluator {
 public:
  explicit PotentialEvaluator(ComplexMatrix x);
  double operator()(cplx z, double eps);

 private:
  ComplexMatrix x_;
  ComplexMatrix xh_;
  ComplexMatrix xx_;
  std::vector<cplx> work_;
};

/// Radial bump amplitude * (1 - |z - centre|^2 / radius^2)^power on the disk, 0 outside.
/// C^{power-1}; power >= 3 keeps the Laplacian continuous.
struct TestFunction {
  cplx centre = 0.0;
  double radius = 0.5;
  int power = 4;
  double amplitude = 1.0;

  static TestFunction bump(double radius, int power = 4, cplx centre = 0.0);
  static TestFunction zero();

  std::string id() const;
  double value(cplx z) const;
  double laplacian(cplx z) const;
  /// Exact integral over the plane.
  double integral() const;
  bool vanishes() const { return amplitude == 0.0; }
};

struct LinearStatistic {
  double value = 0.0;
  double std_error = 0.0;
  std::string h_id;
  std::size_t samples = 0;
};

/// Samples X = A + H (H from streams 0..samples-1 of cfg.seed), averages the log potential
/// on every grid node and returns (1/4pi) of its 5-point Laplacian on interior nodes
/// (boundary nodes hold NaN).
DensityField empirical_density(const ComplexMatrix& a, const McConfig& cfg);

/// Estimates E (1/n) sum_j h(z_j) as (1/4pi) sum_nodes Laplacian(h) * L * step^2, one
/// estimate per sample; std_error is the standard error of their mean. Throws
/// SupportEscape when the support of h is not strictly inside the grid window.
LinearStatistic linear_statistic(const ComplexMatrix& a, const TestFunction& h,
                                 const McConfig& cfg);

/// Midpoint-rule integral of h * rho_limit over the grid nodes.
double predicted_linear_statistic(const ComplexMatrix& a, const TestFunction& h,
                                  const GridSpec& grid);

struct RateRow {
  std::size_t n = 0;
  double eps = 0.0;
  double estimate = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double std_error = 0.0;
  double slope_running = 0.0;  ///< NaN for the first row
};

struct RateTable {
  std::vector<RateRow> rows;
  double slope = 0.0;  ///< least-squares slope of log error against log n
  std::string h_id;
};

/// For each n of the ascending ladder: builds family.resized(n), runs linear_statistic
/// with cfg (n replaced, eps per cfg policy) and compares with the predicted integral.
RateTable rate_experiment(const EnsembleSpec& family, const TestFunction& h,
                          const std::vector<std::size_t>& n_ladder, const McConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV "n,error,std_error,slope_running".
std::string rate_csv(const RateTable& table);

}  // namespace gdl
