#include "gdl/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gdl/parallel.hpp"

namespace gdl {

namespace {

constexpr double kDenominatorFloor = 1e-300;

}  // namespace

double rho_limit(const DeformationModel& model, cplx z) {
  const SpectralMeasure nu = model.nu(z);
  const DomainVerdict verdict = domain_verdict(nu);
  if (!verdict.in_D) return 0.0;

  double y;  // x0^2
  if (const auto root = solve_x0(nu)) {
    y = root->x * root->x;
  } else if (nu.min_atom() > singular_tolerance(nu)) {
    // tr_n Y0^{-1} == 1 exactly: the limit from inside D
    y = std::numeric_limits<double>::min();
  } else {
    throw SingularPoint("z is numerically on the spectrum of A and x0 degenerates");
  }
  const ResolventTraces t = model.traces(z, y);
  const double s2 = std::max(stieltjes(nu, y, 2), kDenominatorFloor);
  return (std::norm(t.t1) / s2 + y * t.t2) / std::numbers::pi;
}

double rho_limit(const ComplexMatrix& a, cplx z) {
  return rho_limit(DeformationModel(a, Reduction::None), z);
}

double rho_eps(const DeformationModel& model, cplx z, double eps) {
  const SpectralMeasure nu = model.nu(z);
  const double x = solve_x_eps(nu, eps).x;
  const double y = x * x;
  const ResolventTraces t = model.traces(z, y);
  const double denom = std::max(stieltjes(nu, y, 2) + eps / (2.0 * y * x), kDenominatorFloor);
  return (std::norm(t.t1) / denom + y * t.t2) / std::numbers::pi;
}

double rho_eps(const ComplexMatrix& a, cplx z, double eps) {
  return rho_eps(DeformationModel(a, Reduction::None), z, eps);
}

DensityField predict_field(const DeformationModel& model, const GridSpec& grid, PredictMode mode,
                           std::size_t workers) {
  grid.validate();
  if (mode.kind == PredictMode::Kind::Eps && !(mode.eps > 0.0)) {
    throw ConfigError("eps mode needs a positive eps");
  }
  DensityField field;
  field.grid = grid;
  field.kind = mode.kind == PredictMode::Kind::Limit ? FieldKind::Predicted : FieldKind::PredictedEps;
  field.eps = mode.kind == PredictMode::Kind::Eps ? mode.eps : 0.0;
  field.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());

  parallel_for(grid.node_count(), workers, [&](std::size_t k) {
    const cplx z = grid.node(k);
    try {
      field.values[k] =
          mode.kind == PredictMode::Kind::Limit ? rho_limit(model, z) : rho_eps(model, z, mode.eps);
    } catch (const NumericError&) {
      // left as NaN, filled below
    }
  });

  for (std::size_t k = 0; k < field.values.size(); ++k)
    if (!std::isfinite(field.values[k])) field.flagged.push_back(k);
  if (field.flagged.size() == field.values.size()) {
    throw NumericError("no grid node could be evaluated");
  }

  // Fill flagged nodes from their neighbours, growing inwards one ring per pass.
  std::vector<std::size_t> pending = field.flagged;
  while (!pending.empty()) {
    std::vector<std::pair<std::size_t, double>> filled;
    std::vector<std::size_t> still;
    for (std::size_t k : pending) {
      const std::size_t ix = k % grid.nx, iy = k / grid.nx;
      double sum = 0.0;
      int count = 0;
      auto take = [&](std::size_t idx) {
        if (std::isfinite(field.values[idx])) {
          sum += field.values[idx];
          ++count;
        }
      };
      if (ix > 0) take(k - 1);
      if (ix + 1 < grid.nx) take(k + 1);
      if (iy > 0) take(k - grid.nx);
      if (iy + 1 < grid.ny) take(k + grid.nx);
      if (count > 0) {
        filled.emplace_back(k, sum / count);
      } else {
        still.push_back(k);
      }
    }
    for (const auto& [k, v] : filled) field.values[k] = v;
    pending = std::move(still);
  }
  return field;
}

DensityField predict_field(const ComplexMatrix& a, const GridSpec& grid, PredictMode mode,
                           std::size_t workers) {
  return predict_field(DeformationModel(a), grid, mode, workers);
}

}  // namespace gdl
