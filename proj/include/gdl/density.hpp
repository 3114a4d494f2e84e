#pragma once

#include <cstddef>

#include "gdl/grid.hpp"
#include "gdl/spectral_curve.hpp"

namespace gdl {

/// Limiting density at z: 0 outside D, otherwise
/// (1/pi) [ |T1|^2 / s2 + x0^2 T2 ] with T1, T2, s2 evaluated at x = x0^2.
/// Throws SingularPoint when z sits on the spectrum of A and no root can be formed.
double rho_limit(const DeformationModel& model, cplx z);
/// Same, through the dense unreduced route.
double rho_limit(const ComplexMatrix& a, cplx z);

/// Finite-eps prediction (1/pi) [ |T1|^2 / (s2 + eps/(2 x^3)) + x^2 T2 ] at x = x_eps.
/// Defined for every z.
double rho_eps(const DeformationModel& model, cplx z, double eps);
double rho_eps(const ComplexMatrix& a, cplx z, double eps);

struct PredictMode {
  enum class Kind { Limit, Eps };
  Kind kind = Kind::Limit;
  double eps = 0.0;

  static PredictMode limit() { return {}; }
  static PredictMode regularized(double eps) { return {Kind::Eps, eps}; }
};

/// Evaluates every grid node. Nodes whose evaluation throws are flagged and filled with
/// the mean of their evaluated 4-neighbours; the sweep itself never aborts.
DensityField predict_field(const DeformationModel& model, const GridSpec& grid, PredictMode mode,
                           std::size_t workers = 0);
DensityField predict_field(const ComplexMatrix& a, const GridSpec& grid, PredictMode mode,
                           std::size_t workers = 0);

}  // namespace gdl
