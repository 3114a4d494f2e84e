// Acceptance checks: one PASS/FAIL line per criterion. `acceptance --only N [M ...]` runs a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gdl/density.hpp"
#include "gdl/ensembles.hpp"
#include "gdl/montecarlo.hpp"
#include "gdl/spectral_curve.hpp"
#include "test_support.hpp"

using namespace gdl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kInvPi = 1.0 / std::numbers::pi;

Outcome circular_law() {
  const auto start = Clock::now();
  const GridSpec grid = GridSpec::square({-1.5, 1.5, -1.5, 1.5}, 101);
  const DensityField f = predict_field(build_deformation({ensemble::Zero{}, 128}), grid, PredictMode::limit());
  double inside = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double r = std::abs(grid.node(k));
    if (r <= 0.98) inside = std::max(inside, std::abs(f.values[k] - kInvPi));
    if (r >= 1.02) outside = std::max(outside, std::abs(f.values[k]));
  }
  const double t = seconds_since(start);
  return {inside <= 1e-9 && outside == 0.0 && t < 60.0,
          "max |rho-1/pi| inside " + fmt("%.3g", inside) + " (<= 1e-9), max |rho| outside " +
              fmt("%.3g", outside) + " (== 0), " + fmt("%.2f", t) + " s (< 60 s)"};
}

EnsembleSpec random_family(std::mt19937_64& rng) {
  const std::size_t sizes[] = {4, 8, 16, 32};
  const std::size_t n = sizes[rng() % 4];
  const std::uint64_t seed = rng();
  switch (rng() % 5) {
    case 0: return {ensemble::Zero{}, n};
    case 1: return diagonal_from_weights(n, {{1.0, 0.5}, {{-0.5, 0.75}, 0.25}, {{0.0, -1.0}, 0.25}});
    case 2: return {ensemble::JordanBlock{{0.25, -0.25}, 2}, n};
    case 3: return {ensemble::HermitianWigner{seed}, n};
    default: return {ensemble::GinibreDeformation{seed}, n};
  }
}

// The eps-proportional bound on x_eps holds on compact sets outside the closure of D; within
// distance d of the boundary only x_eps <= C eps^{1/3} is available.
bool far_outside(const DeformationModel& model, cplx z, double d) {
  for (int ring = 1; ring <= 8; ++ring) {
    for (int k = 0; k < 64; ++k) {
      const cplx p = z + std::polar(d * ring / 8.0, 2.0 * std::numbers::pi * k / 64.0);
      if (model.verdict(p).in_D) return false;
    }
  }
  return !model.verdict(z).in_D;
}

Outcome saddle_solvers() {
  const auto start = Clock::now();
  const double margin = 0.1;
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> coord(-2.5, 2.5), log_eps(std::log(1e-3), std::log(1e-1));
  double worst_residual = 0.0, worst_order = std::numeric_limits<double>::infinity();
  double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0, ratio_hi_all = 0.0;
  std::size_t inside = 0, outside = 0, far = 0;
  for (int probe = 0; probe < 1000; ++probe) {
    const ComplexMatrix a = build_deformation(random_family(rng));
    const cplx z{coord(rng), coord(rng)};
    const double eps = std::exp(log_eps(rng));
    const SpectralMeasure mu = nu_measure(a, z);
    const SaddleSolution xe = solve_x_eps(mu, eps);
    worst_residual = std::max(worst_residual, std::abs(xe.residual));
    if (const auto x0 = solve_x0(mu)) {
      ++inside;
      worst_residual = std::max(worst_residual, std::abs(x0->residual));
      worst_order = std::min(worst_order, xe.x - x0->x);
      continue;
    }
    ++outside;
    const bool counted = far_outside(DeformationModel(a), z, margin);
    far += counted;
    for (double e : {1e-1, 1e-2, 1e-3}) {
      const SaddleSolution s = solve_x_eps(mu, e);
      worst_residual = std::max(worst_residual, std::abs(s.residual));
      ratio_hi_all = std::max(ratio_hi_all, s.x / e);
      if (!counted) continue;
      ratio_lo = std::min(ratio_lo, s.x / e);
      ratio_hi = std::max(ratio_hi, s.x / e);
    }
  }
  const double t = seconds_since(start);
  const bool pass = worst_residual <= 1e-10 && worst_order >= 0.0 && ratio_lo >= 1.0 && ratio_hi <= 50.0;
  return {pass, "1000 probes (" + std::to_string(inside) + " inside D, " + std::to_string(outside) +
                    " outside): max residual " + fmt("%.3g", worst_residual) + " (<= 1e-10), min x_eps-x0 " +
                    fmt("%.3g", worst_order) + " (>= 0), x_eps/eps in [" + fmt("%.4g", ratio_lo) + ", " +
                    fmt("%.4g", ratio_hi) + "] (within [1, 50]) on the " + std::to_string(far) +
                    " probes at distance >= 0.1 from D (max over all outside probes " + fmt("%.4g", ratio_hi_all) +
                    "), " + fmt("%.2f", t) + " s"};
}

Outcome jordan_golden() {
  // 40-digit oracle (tests/oracles/density_oracle.py); closed form (1/pi)/(1 + 2^{-1/2})
  const double golden = 0.18646161428902831;
  double worst = 0.0;
  for (std::size_t n : {2u, 4u, 64u, 256u})
    worst = std::max(worst, std::abs(rho_limit(build_deformation({ensemble::JordanBlock{}, n}), 0.0) - golden));
  return {worst <= 1e-8, "rho(0) vs 0.18646161428902831: max deviation over n in {2,4,64,256} " +
                             fmt("%.3g", worst) + " (<= 1e-8)"};
}

Outcome mass_normalization() {
  const auto start = Clock::now();
  struct Case {
    const char* name;
    EnsembleSpec spec;
    double half;
  };
  const Case cases[] = {
      {"zero", {ensemble::Zero{}, 256}, 1.5},
      {"diagonal(+-1)", diagonal_from_weights(256, {{1.0, 0.5}, {-1.0, 0.5}}), 2.5},
      {"block-jordan", {ensemble::JordanBlock{}, 256}, 2.0},
      {"wigner", {ensemble::HermitianWigner{20261015}, 256}, 3.0},
  };
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const GridSpec grid = GridSpec::square({-c.half, c.half, -c.half, c.half}, 201);
    const double mass = predict_field(build_deformation(c.spec), grid, PredictMode::limit()).mass();
    pass = pass && std::abs(mass - 1.0) <= 0.03;
    detail += std::string(c.name) + " " + fmt("%.5f", mass) + ", ";
  }
  const double t = seconds_since(start);
  pass = pass && t < 600.0;
  return {pass, "masses on 201^2 grids: " + detail + "(within 1 +- 0.03), " + fmt("%.1f", t) + " s (< 600 s)"};
}

// Shared by criteria 5 and 6.
struct McRun {
  std::string name;
  double l1 = 0.0;
  double predicted_mass = 0.0;
  double empirical_max = 0.0;
  double cap = 0.0;
};

const std::vector<McRun>& monte_carlo_runs(double* elapsed) {
  static std::vector<McRun> runs;
  static double seconds = 0.0;
  if (runs.empty()) {
    const auto start = Clock::now();
    const std::size_t n = 256;
    McConfig cfg;
    cfg.n = n;
    cfg.samples = 50;
    cfg.seed = 20261015;
    cfg.grid = GridSpec::square({-1.5, 1.5, -1.5, 1.5}, 61);
    const double eps = cfg.effective_eps();
    const std::pair<const char*, EnsembleSpec> families[] = {{"zero", {ensemble::Zero{}, n}},
                                                             {"block-jordan", {ensemble::JordanBlock{}, n}}};
    for (const auto& [name, spec] : families) {
      const ComplexMatrix a = build_deformation(spec);
      const DensityField emp = empirical_density(a, cfg);
      const DensityField pred = predict_field(a, cfg.grid, PredictMode::regularized(eps));
      McRun r;
      r.name = name;
      r.cap = 1.0 / (std::numbers::pi * eps * eps);
      const double h2 = cfg.grid.step() * cfg.grid.step();
      for (std::size_t k = 0; k < cfg.grid.node_count(); ++k) {
        r.predicted_mass += pred.values[k] * h2;
        if (!cfg.grid.is_interior(k)) continue;
        r.l1 += std::abs(emp.values[k] - pred.values[k]) * h2;
        r.empirical_max = std::max(r.empirical_max, emp.values[k]);
      }
      runs.push_back(r);
    }
    seconds = seconds_since(start);
  }
  if (elapsed) *elapsed = seconds;
  return runs;
}

Outcome prediction_vs_monte_carlo() {
  double t = 0.0;
  const auto& runs = monte_carlo_runs(&t);
  bool pass = t < 1200.0;
  std::string detail = "n=256, 50 samples, eps=1/16, 61^2 grid on [-1.5,1.5]^2: ";
  for (const McRun& r : runs) {
    const double ratio = r.l1 / r.predicted_mass;
    pass = pass && ratio <= 0.05;
    detail += r.name + " L1/mass " + fmt("%.4f", ratio) + ", ";
  }
  return {pass, detail + "(<= 0.05), " + fmt("%.0f", t) + " s (< 1200 s)"};
}

Outcome empirical_cap() {
  const auto& runs = monte_carlo_runs(nullptr);
  bool pass = true;
  std::string detail;
  for (const McRun& r : runs) {
    pass = pass && r.empirical_max <= 1.05 * r.cap;
    detail += r.name + " max " + fmt("%.4f", r.empirical_max) + ", ";
  }
  return {pass, detail + "cap 1.05/(pi eps^2) = " + fmt("%.2f", 1.05 * runs.front().cap)};
}

Outcome rate_of_convergence() {
  const auto start = Clock::now();
  McConfig cfg;
  cfg.samples = 200;
  cfg.seed = 20261015;
  cfg.grid = GridSpec::square({-1.0, 1.0, -1.0, 1.0}, 21);
  const TestFunction h = TestFunction::bump(0.7, 6);
  const RateTable table = rate_experiment({ensemble::Zero{}, 64}, h, {64, 128, 256, 512}, cfg);
  bool within = true;
  std::string rows;
  for (const RateRow& r : table.rows) {
    within = within && r.error < 3.0 * r.std_error;
    // regularization bias of the prediction itself, for the record
    const ComplexMatrix a = build_deformation({ensemble::Zero{}, r.n});
    const DensityField limit = predict_field(a, cfg.grid, PredictMode::limit());
    const DensityField smooth = predict_field(a, cfg.grid, PredictMode::regularized(r.eps));
    double bias = 0.0;
    for (std::size_t k = 0; k < cfg.grid.node_count(); ++k)
      bias += h.value(cfg.grid.node(k)) * (smooth.values[k] - limit.values[k]) * cfg.grid.step() * cfg.grid.step();
    rows += "n=" + std::to_string(r.n) + " err " + fmt("%.3g", r.error) + " se " + fmt("%.2g", r.std_error) +
            " eps-bias " + fmt("%.3g", bias) + "; ";
  }
  const double t = seconds_since(start);
  const bool slope_ok = table.slope <= -0.4;
  return {slope_ok && within && t < 3600.0,
          "slope " + fmt("%.3f", table.slope) + (slope_ok ? " (<= -0.4 ok)" : " (> -0.4)") +
              ", per-point |error| < 3 std_error: " + (within ? "yes" : "no") + "; " + rows + fmt("%.0f", t) +
              " s (< 3600 s)"};
}

Outcome invariance_suite() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  double translation = 0.0, unitary = 0.0;
  auto observe = [](const ComplexMatrix& a, cplx z) {
    const SpectralMeasure mu = nu_measure(a, z);
    const auto x0 = solve_x0(mu);
    std::vector<double> v = mu.atoms;
    v.push_back(x0 ? x0->x : 0.0);
    v.push_back(trace_T2(a, z, 0.3));
    v.push_back(std::abs(trace_T1(a, z, 0.3)));
    v.push_back(rho_limit(a, z));
    return v;
  };
  for (int probe = 0; probe < 100; ++probe) {
    const std::size_t n = 3 + rng() % 6;
    const ComplexMatrix a = sample_ginibre(n, rng(), 0).matrix;
    const cplx z{coord(rng), coord(rng)}, c{coord(rng), coord(rng)};
    const auto base = observe(a, z);
    const auto shifted = observe(gdl::testing::translated(a, c), z + c);
    const auto rotated = observe(gdl::testing::conjugate_by(gdl::testing::random_unitary(n, rng()), a), z);
    for (std::size_t i = 0; i < base.size(); ++i) {
      translation = std::max(translation, std::abs(base[i] - shifted[i]));
      unitary = std::max(unitary, std::abs(base[i] - rotated[i]));
    }
  }
  return {translation <= 1e-12 && unitary <= 1e-8,
          "100 probes of nu, x0, T2, |T1|, rho: translation max deviation " + fmt("%.3g", translation) +
              " (<= 1e-12), unitary " + fmt("%.3g", unitary) + " (<= 1e-8)"};
}

Outcome eps_squared_decay() {
  const ComplexMatrix zero = build_deformation({ensemble::Zero{}, 4});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::string ratios;
  for (double eps : {0.1, 0.05, 0.025}) {
    const double ratio = rho_eps(zero, 2.0, eps) / (eps * eps);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ratios += fmt("%.5f", ratio) + " ";
  }
  const double spread = hi / lo - 1.0;
  return {spread < 0.25, "rho_eps(2)/eps^2 over eps in {0.1,0.05,0.025}: " + ratios + "spread " +
                             fmt("%.2f%%", 100.0 * spread) + " (< 25%)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (1-9); 5 and 6 share one Monte Carlo run")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"circular-law reduction", circular_law},
      {"saddle solvers", saddle_solvers},
      {"block-Jordan golden value", jordan_golden},
      {"mass normalization", mass_normalization},
      {"prediction vs Monte Carlo", prediction_vs_monte_carlo},
      {"empirical cap", empirical_cap},
      {"rate experiment", rate_of_convergence},
      {"invariance suite", invariance_suite},
      {"eps^2 decay outside D", eps_squared_decay},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << " -- "
              << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
