#include "gdl/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gdl/density.hpp"
#include "gdl/format.hpp"
#include "gdl/parallel.hpp"

namespace gdl {

namespace {

// Log potential of every sample at every point: result[s][k].
std::vector<std::vector<double>> sample_potentials(const ComplexMatrix& a, const McConfig& cfg,
                                                   const std::vector<cplx>& points) {
  const double eps = cfg.effective_eps();
  std::vector<std::vector<double>> out(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t s) {
    ComplexMatrix x = sample_ginibre(cfg.n, cfg.seed, s).matrix;
    x += a;
    PotentialEvaluator potential(std::move(x));
    std::vector<double> values(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) values[k] = potential(points[k], eps);
    out[s] = std::move(values);
  });
  return out;
}

void require_matching(const ComplexMatrix& a, const McConfig& cfg) {
  if (a.size() != cfg.n) {
    throw DimensionMismatch("deformation has n=" + std::to_string(a.size()) +
                            " but the Monte Carlo config asks for n=" + std::to_string(cfg.n));
  }
}

}  // namespace

double McConfig::effective_eps() const {
  return eps ? *eps : 1.0 / std::sqrt(static_cast<double>(n));
}

void McConfig::validate() const {
  if (n == 0) throw ConfigError("Monte Carlo n must be positive");
  if (samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
  if (!(effective_eps() > 0.0) || !std::isfinite(effective_eps())) {
    throw ConfigError("Monte Carlo eps must be positive");
  }
  grid.validate();
}

double log_potential(const ComplexMatrix& x, cplx z, double eps) {
  ComplexMatrix m = x;
  m.shift_diagonal(-z);
  ComplexMatrix y = multiply_adjoint(m, m);
  y.shift_diagonal(eps * eps);
  return cholesky(std::move(y)).logdet / static_cast<double>(x.size());
}

PotentialEvaluator::PotentialEvaluator(ComplexMatrix x)
    : x_(std::move(x)),
      xh_(x_.adjoint()),
      xx_(multiply_adjoint(x_, x_)),
      work_(x_.size() * x_.size()) {}

double PotentialEvaluator::operator()(cplx z, double eps) {
  const std::size_t n = x_.size();
  const cplx zc = std::conj(z);
  const double shift = std::norm(z) + eps * eps;
  // (X - z)(X - z)^* = X X^* - conj(z) X - z X^* + |z|^2, lower triangle only.
  for (std::size_t i = 0; i < n; ++i) {
    const cplx* xx = xx_.row(i).data();
    const cplx* xi = x_.row(i).data();
    const cplx* xhi = xh_.row(i).data();
    cplx* w = work_.data() + i * n;
    for (std::size_t j = 0; j <= i; ++j) w[j] = xx[j] - zc * xi[j] - z * xhi[j];
    w[i] += shift;
  }
  const double logdet = kernels::cholesky_lower_in_place(work_.data(), n);
  if (std::isnan(logdet)) {
    throw NotPositiveDefinite("log potential: z is numerically an eigenvalue (eps = 0)");
  }
  return logdet / static_cast<double>(n);
}

TestFunction TestFunction::bump(double radius, int power, cplx centre) {
  if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
  if (power < 3) throw ConfigError("bump power must be at least 3 for a C^2 test function");
  return {centre, radius, power, 1.0};
}

TestFunction TestFunction::zero() { return {0.0, 1.0, 4, 0.0}; }

std::string TestFunction::id() const {
  if (vanishes()) return "zero";
  std::ostringstream s;
  s << "bump(R=" << radius << ",k=" << power << ",c=" << centre.real() << ':' << centre.imag()
    << ')';
  return s.str();
}

double TestFunction::value(cplx z) const {
  const double u = 1.0 - std::norm(z - centre) / (radius * radius);
  return u > 0.0 ? amplitude * std::pow(u, power) : 0.0;
}

double TestFunction::laplacian(cplx z) const {
  const double r2 = std::norm(z - centre);
  const double R2 = radius * radius;
  const double u = 1.0 - r2 / R2;
  if (!(u > 0.0)) return 0.0;
  const double k = power;
  // Delta f(r^2) = 4 (s f'' + f') with s = r^2.
  return amplitude * (4.0 * k * (k - 1.0) * std::pow(u, power - 2) * r2 / (R2 * R2) -
                      4.0 * k * std::pow(u, power - 1) / R2);
}

double TestFunction::integral() const {
  return amplitude * std::numbers::pi * radius * radius / (power + 1.0);
}

DensityField empirical_density(const ComplexMatrix& a, const McConfig& cfg) {
  cfg.validate();
  require_matching(a, cfg);
  const GridSpec& grid = cfg.grid;
  std::vector<cplx> points(grid.node_count());
  for (std::size_t k = 0; k < points.size(); ++k) points[k] = grid.node(k);
  const auto per_sample = sample_potentials(a, cfg, points);

  std::vector<double> mean(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    CompensatedSum sum;
    for (const auto& values : per_sample) sum.add(values[k]);
    mean[k] = sum.value() / static_cast<double>(cfg.samples);
  }

  DensityField field;
  field.grid = grid;
  field.kind = FieldKind::Empirical;
  field.eps = cfg.effective_eps();
  field.samples = cfg.samples;
  field.values.assign(points.size(), std::numeric_limits<double>::quiet_NaN());
  const double h = grid.step();
  const double scale = 1.0 / (4.0 * std::numbers::pi * h * h);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!grid.is_interior(k)) continue;
    const double lap = (mean[k - 1] + mean[k + 1]) + (mean[k - grid.nx] + mean[k + grid.nx]) -
                       4.0 * mean[k];
    field.values[k] = lap * scale;
  }
  return field;
}

LinearStatistic linear_statistic(const ComplexMatrix& a, const TestFunction& h,
                                 const McConfig& cfg) {
  cfg.validate();
  require_matching(a, cfg);
  LinearStatistic out;
  out.h_id = h.id();
  out.samples = cfg.samples;
  if (h.vanishes()) return out;

  const Window& w = cfg.grid.window;
  const double step = cfg.grid.step();
  if (h.centre.real() - h.radius <= w.re_min || h.centre.real() + h.radius >= w.re_max ||
      h.centre.imag() - h.radius <= w.im_min || h.centre.imag() + h.radius >= w.im_max) {
    throw SupportEscape("support of " + h.id() + " reaches the edge of the grid window");
  }

  std::vector<cplx> points;
  std::vector<double> weights;
  const double scale = step * step / (4.0 * std::numbers::pi);
  for (std::size_t k = 0; k < cfg.grid.node_count(); ++k) {
    const cplx z = cfg.grid.node(k);
    const double lap = h.laplacian(z);
    if (lap == 0.0) continue;
    points.push_back(z);
    weights.push_back(lap * scale);
  }
  const auto per_sample = sample_potentials(a, cfg, points);

  std::vector<double> estimates(cfg.samples);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    CompensatedSum sum;
    for (std::size_t k = 0; k < points.size(); ++k) sum.add(weights[k] * per_sample[s][k]);
    estimates[s] = sum.value();
  }
  CompensatedSum total;
  for (double e : estimates) total.add(e);
  out.value = total.value() / static_cast<double>(cfg.samples);
  if (cfg.samples > 1) {
    CompensatedSum sq;
    for (double e : estimates) sq.add((e - out.value) * (e - out.value));
    const double variance = sq.value() / static_cast<double>(cfg.samples - 1);
    out.std_error = std::sqrt(variance / static_cast<double>(cfg.samples));
  }
  return out;
}

double predicted_linear_statistic(const ComplexMatrix& a, const TestFunction& h,
                                  const GridSpec& grid) {
  if (h.vanishes()) return 0.0;
  const DensityField rho = predict_field(a, grid, PredictMode::limit());
  const double step = grid.step();
  CompensatedSum sum;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double hv = h.value(grid.node(k));
    if (hv != 0.0) sum.add(hv * rho.values[k]);
  }
  return sum.value() * step * step;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = std::min(x.size(), y.size());
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RateTable rate_experiment(const EnsembleSpec& family, const TestFunction& h,
                          const std::vector<std::size_t>& n_ladder, const McConfig& cfg) {
  if (n_ladder.size() < 2) throw ConfigError("rate experiment needs at least two sizes");
  for (std::size_t i = 1; i < n_ladder.size(); ++i) {
    if (n_ladder[i] <= n_ladder[i - 1]) throw ConfigError("n ladder must be strictly ascending");
  }
  RateTable table;
  table.h_id = h.id();
  std::vector<double> ns, errors;
  for (std::size_t n : n_ladder) {
    const ComplexMatrix a = build_deformation(family.resized(n));
    McConfig c = cfg;
    c.n = n;
    const LinearStatistic stat = linear_statistic(a, h, c);
    RateRow row;
    row.n = n;
    row.eps = c.effective_eps();
    row.estimate = stat.value;
    row.std_error = stat.std_error;
    row.reference = predicted_linear_statistic(a, h, cfg.grid);
    row.error = std::abs(row.estimate - row.reference);
    ns.push_back(static_cast<double>(n));
    errors.push_back(row.error);
    row.slope_running = loglog_slope(ns, errors);
    table.rows.push_back(row);
  }
  table.slope = loglog_slope(ns, errors);
  return table;
}

std::string rate_csv(const RateTable& table) {
  std::ostringstream out;
  out << "n,error,std_error,slope_running\n";
  for (const auto& row : table.rows) {
    out << row.n << ',' << format_double(row.error) << ',' << format_double(row.std_error) << ','
        << format_double(row.slope_running) << '\n';
  }
  return out.str();
}

}  // namespace gdl
