#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gdl/ensembles.hpp"
#include "gdl/grid.hpp"

namespace gdl {

struct ConditionParams {
  double eps = 0.1;    ///< radius of the excluded neighbourhood for the c3 scan
  double eps0 = 0.1;   ///< neighbourhood probed by c4
  double rho0 = 0.1;   ///< c4 evaluates tr_n (Y0 + rho0^2)^{-1}
  double kappa = 0.05; ///< c5 scans x in [kappa, 2]
  std::size_t x_steps = 16;
};

/// Measured condition quantities for one n.
///
/// The neighbourhood sigma_eps of the spectrum of A is approximated on the probe grid by
/// {z : lambda_min(Y0(z)) <= eps^2} (at any n of the ladder) together with the eps-dilation
/// of probes where Y0 is numerically singular. "Reference" values are those of the largest n.
struct ConditionReport {
  std::size_t n = 0;
  double c2_norm = 0.0;               ///< (1/n) sum |a_ij|^2
  double c3_sup = 0.0;                ///< sup outside sigma_eps of |tr_n Y0^{-1} - reference|
  std::optional<double> c4_inf;       ///< inf over sigma_eps0 of tr_n (Y0 + rho0^2)^{-1}
  double c5_sup = 0.0;                ///< sup of |L_n(z, x) - reference|
  std::size_t c3_probes = 0;
  std::size_t c4_probes = 0;
  std::size_t c5_probes = 0;
};

struct ConditionStudy {
  std::vector<ConditionReport> reports;
  ConditionParams params;
  GridSpec probes;
  std::size_t reference_n = 0;
  double c3_rate = 0.0;  ///< log-log slope of c3_sup against n (NaN when undefined)
  double c5_rate = 0.0;
};

/// Throws ConfigError when the ladder has fewer than two sizes or is not ascending.
ConditionStudy check_conditions(const EnsembleSpec& family, const std::vector<std::size_t>& n_ladder,
                                const GridSpec& probes, const ConditionParams& params = {});

/// (x, L_n(z, x)) with L_n = (1/n) log det(Y0(z) + x) on `steps` equispaced x in
/// [kappa, upper].
std::vector<std::pair<double, double>> log_det_profile(const ComplexMatrix& a, cplx z,
                                                       double kappa, double upper,
                                                       std::size_t steps);

std::string conditions_json(const ConditionStudy& study, const std::string& family);
/// CSV "n,c2_norm,c3_sup,c4_inf,c5_sup" (empty c4 cell when no probe fell in sigma_eps0).
std::string conditions_csv(const ConditionStudy& study);

}  // namespace gdl
