#include "gdl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gdl/format.hpp"
#include "gdl/montecarlo.hpp"
#include "gdl/parallel.hpp"
#include "gdl/spectral_curve.hpp"

namespace gdl {

namespace {

struct ProbeValues {
  double min_eig = 0.0;
  bool singular = false;
  double inv_trace = 0.0;
  double c4 = 0.0;
  std::vector<double> log_det;  // one per x node
};

std::vector<double> x_nodes(const ConditionParams& p) {
  std::vector<double> xs(p.x_steps);
  for (std::size_t i = 0; i < p.x_steps; ++i)
    xs[i] = p.kappa + (2.0 - p.kappa) * static_cast<double>(i) / static_cast<double>(p.x_steps - 1);
  return xs;
}

nlohmann::ordered_json maybe(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

ConditionStudy check_conditions(const EnsembleSpec& family, const std::vector<std::size_t>& n_ladder,
                                const GridSpec& probes, const ConditionParams& params) {
  if (n_ladder.size() < 2) throw ConfigError("condition checks need at least two sizes");
  for (std::size_t i = 1; i < n_ladder.size(); ++i)
    if (n_ladder[i] <= n_ladder[i - 1]) throw ConfigError("n ladder must be strictly ascending");
  if (!(params.eps > 0.0) || !(params.eps0 > 0.0) || !(params.rho0 > 0.0) ||
      !(params.kappa > 0.0) || params.kappa >= 2.0 || params.x_steps < 2) {
    throw ConfigError("condition parameters need eps, eps0, rho0 > 0, 0 < kappa < 2, x_steps >= 2");
  }
  probes.validate();

  const std::vector<double> xs = x_nodes(params);
  const std::size_t m = probes.node_count();
  std::vector<std::vector<ProbeValues>> values(n_ladder.size());
  std::vector<double> c2(n_ladder.size());

  for (std::size_t l = 0; l < n_ladder.size(); ++l) {
    const ComplexMatrix a = build_deformation(family.resized(n_ladder[l]));
    double frob = 0.0;
    for (const cplx& v : a.entries()) frob += std::norm(v);
    c2[l] = frob / static_cast<double>(a.size());
    const DeformationModel model(a);
    values[l].resize(m);
    parallel_for(m, 0, [&](std::size_t k) {
      const SpectralMeasure nu = model.nu(probes.node(k));
      const DomainVerdict v = domain_verdict(nu);
      ProbeValues& out = values[l][k];
      out.min_eig = v.min_eig_Y0;
      out.singular = std::isinf(v.inv_trace);
      out.inv_trace = v.inv_trace;
      out.c4 = stieltjes(nu, params.rho0 * params.rho0, 1);
      out.log_det.resize(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double s = 0.0;
        for (double lambda : nu.atoms) s += std::log(lambda + xs[i]);
        out.log_det[i] = s / static_cast<double>(nu.size());
      }
    });
  }

  // Neighbourhoods of the spectrum, pooled over the ladder so every n sees the same probes.
  std::vector<cplx> hits;
  for (const auto& per_n : values)
    for (std::size_t k = 0; k < m; ++k)
      if (per_n[k].singular) hits.push_back(probes.node(k));
  auto in_neighbourhood = [&](std::size_t k, double radius) {
    for (const auto& per_n : values)
      if (per_n[k].min_eig <= radius * radius) return true;
    const cplx z = probes.node(k);
    return std::any_of(hits.begin(), hits.end(), [&](cplx h) { return std::abs(h - z) <= radius; });
  };

  ConditionStudy study;
  study.params = params;
  study.probes = probes;
  study.reference_n = n_ladder.back();
  const auto& ref = values.back();
  std::vector<double> ns3, c3s, ns5, c5s;
  for (std::size_t l = 0; l < n_ladder.size(); ++l) {
    ConditionReport r;
    r.n = n_ladder[l];
    r.c2_norm = c2[l];
    double c4 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const ProbeValues& v = values[l][k];
      if (!in_neighbourhood(k, params.eps)) {
        ++r.c3_probes;
        r.c3_sup = std::max(r.c3_sup, std::abs(v.inv_trace - ref[k].inv_trace));
      }
      if (in_neighbourhood(k, params.eps0)) {
        ++r.c4_probes;
        c4 = std::min(c4, v.c4);
      }
      ++r.c5_probes;
      for (std::size_t i = 0; i < xs.size(); ++i)
        r.c5_sup = std::max(r.c5_sup, std::abs(v.log_det[i] - ref[k].log_det[i]));
    }
    if (r.c4_probes > 0) r.c4_inf = c4;
    if (l + 1 < n_ladder.size()) {
      if (r.c3_sup > 0.0) {
        ns3.push_back(static_cast<double>(r.n));
        c3s.push_back(r.c3_sup);
      }
      if (r.c5_sup > 0.0) {
        ns5.push_back(static_cast<double>(r.n));
        c5s.push_back(r.c5_sup);
      }
    }
    study.reports.push_back(r);
  }
  study.c3_rate = loglog_slope(ns3, c3s);
  study.c5_rate = loglog_slope(ns5, c5s);
  return study;
}

std::vector<std::pair<double, double>> log_det_profile(const ComplexMatrix& a, cplx z,
                                                       double kappa, double upper,
                                                       std::size_t steps) {
  if (!(kappa > 0.0) || !(upper > kappa) || steps < 2) {
    throw ConfigError("log det profile needs 0 < kappa < upper and at least two steps");
  }
  const ComplexMatrix y0 = hermitize(a, z).y0;
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = kappa + (upper - kappa) * static_cast<double>(i) / static_cast<double>(steps - 1);
    ComplexMatrix m = y0;
    m.shift_diagonal(x);
    out.emplace_back(x, cholesky(std::move(m)).logdet / static_cast<double>(a.size()));
  }
  return out;
}

std::string conditions_json(const ConditionStudy& study, const std::string& family) {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["reference_n"] = study.reference_n;
  j["reference_note"] = "c3 and c5 compare against the largest n of the ladder";
  const Window& w = study.probes.window;
  j["probes"] = {{"window", {w.re_min, w.re_max, w.im_min, w.im_max}},
                 {"nx", study.probes.nx},
                 {"ny", study.probes.ny}};
  j["params"] = {{"eps", study.params.eps},
                 {"eps0", study.params.eps0},
                 {"rho0", study.params.rho0},
                 {"kappa", study.params.kappa},
                 {"x_steps", study.params.x_steps}};
  auto reports = nlohmann::ordered_json::array();
  for (const auto& r : study.reports) {
    reports.push_back({{"n", r.n},
                       {"c2_norm", r.c2_norm},
                       {"c3_sup", maybe(r.c3_sup)},
                       {"c4_inf", r.c4_inf ? maybe(*r.c4_inf) : nlohmann::ordered_json(nullptr)},
                       {"c5_sup", maybe(r.c5_sup)},
                       {"probe_counts", {{"c3", r.c3_probes}, {"c4", r.c4_probes}, {"c5", r.c5_probes}}}});
  }
  j["reports"] = reports;
  j["c3_rate"] = maybe(study.c3_rate);
  j["c5_rate"] = maybe(study.c5_rate);
  return j.dump(2) + "\n";
}

std::string conditions_csv(const ConditionStudy& study) {
  std::ostringstream out;
  out << "n,c2_norm,c3_sup,c4_inf,c5_sup\n";
  for (const auto& r : study.reports) {
    out << r.n << ',' << format_double(r.c2_norm) << ',' << format_double(r.c3_sup) << ','
        << (r.c4_inf ? format_double(*r.c4_inf) : std::string()) << ',' << format_double(r.c5_sup)
        << '\n';
  }
  return out.str();
}

}  // namespace gdl
