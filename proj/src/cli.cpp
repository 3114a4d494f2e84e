#include "gdl/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdl/density.hpp"
#include "gdl/diagnostics.hpp"
#include "gdl/ensembles.hpp"
#include "gdl/format.hpp"
#include "gdl/montecarlo.hpp"
#include "gdl/spectral_curve.hpp"
#include "gdl/version.hpp"

namespace gdl {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
  // ensemble
  std::string family;
  std::size_t n = 0;
  std::string atoms;
  std::string jordan_eigenvalue = "0:0";
  std::size_t jordan_block = 2;
  std::uint64_t ensemble_seed = 0;
  std::string matrix_file;
  // grid
  std::vector<double> window;
  std::size_t res = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  // run
  std::string mode = "limit";
  double eps = 0.0;  // 0: n^{-1/2}
  std::string eps_ladder;
  std::size_t samples = 50;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string n_ladder;
  std::string bump = "0.7:6";
  double c_eps = 0.1;
  double c_eps0 = 0.1;
  double rho0 = 0.1;
  double kappa = 0.05;
  std::string out;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " value '" + text + "'");
  }
}

std::size_t parse_size(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " value '" + text + "'");
  }
}

std::vector<std::size_t> parse_ladder(const std::string& text) {
  std::vector<std::size_t> ladder;
  for (const auto& part : split(text, ',')) ladder.push_back(parse_size(part, "--n-ladder"));
  if (ladder.size() < 2) throw ConfigError("--n-ladder needs at least two sizes, e.g. 64,128,256");
  return ladder;
}

EnsembleSpec make_ensemble(const Options& o, std::size_t n) {
  if (o.family.empty()) throw ConfigError("--ensemble is required");
  if (o.family == "file") {
    if (o.matrix_file.empty()) throw ConfigError("--ensemble file needs --matrix-file");
    const std::size_t file_n = read_matrix_file(o.matrix_file).size();
    if (n != 0 && n != file_n) {
      throw ConfigError("--n " + std::to_string(n) + " does not match the matrix file (n=" +
                        std::to_string(file_n) + ")");
    }
    return {ensemble::FromFile{o.matrix_file}, file_n};
  }
  if (n == 0) throw ConfigError("--n is required and must be positive");
  if (o.family == "zero") return {ensemble::Zero{}, n};
  if (o.family == "jordan") {
    return {ensemble::JordanBlock{parse_complex_cell(o.jordan_eigenvalue), o.jordan_block}, n};
  }
  if (o.family == "wigner") return {ensemble::HermitianWigner{o.ensemble_seed}, n};
  if (o.family == "ginibre") return {ensemble::GinibreDeformation{o.ensemble_seed}, n};
  if (o.family == "diagonal") {
    if (o.atoms.empty()) throw ConfigError("--ensemble diagonal needs --atoms re:im@weight,...");
    std::vector<std::pair<cplx, double>> weighted;
    for (const auto& item : split(o.atoms, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) throw ConfigError("atom '" + item + "' lacks @weight");
      weighted.emplace_back(parse_complex_cell(item.substr(0, at)),
                            parse_double(item.substr(at + 1), "--atoms weight"));
    }
    return diagonal_from_weights(n, weighted);
  }
  throw ConfigError("unknown --ensemble '" + o.family + "'");
}

Json ensemble_json(const Options& o, const EnsembleSpec& spec) {
  Json j;
  j["family"] = spec.family();
  j["n"] = spec.n;
  if (o.family == "diagonal") j["atoms"] = o.atoms;
  if (o.family == "jordan") {
    j["eigenvalue"] = o.jordan_eigenvalue;
    j["block"] = o.jordan_block;
  }
  if (o.family == "wigner" || o.family == "ginibre") j["ensemble_seed"] = o.ensemble_seed;
  if (o.family == "file") j["matrix_file"] = o.matrix_file;
  return j;
}

GridSpec make_grid(const Options& o, std::size_t min_nodes = 8) {
  if (o.window.size() != 4) throw ConfigError("--window needs four numbers: re_min re_max im_min im_max");
  GridSpec g;
  g.window = {o.window[0], o.window[1], o.window[2], o.window[3]};
  if (o.res != 0) {
    g.nx = g.ny = o.res;
  } else {
    g.nx = o.nx;
    g.ny = o.ny;
  }
  if (g.nx < min_nodes || g.ny < min_nodes) {
    throw ConfigError("grid needs at least " + std::to_string(min_nodes) +
                      " nodes per axis (--res, or --nx and --ny)");
  }
  g.validate();
  return g;
}

Json grid_json(const GridSpec& g) {
  return {{"window", {g.window.re_min, g.window.re_max, g.window.im_min, g.window.im_max}},
          {"nx", g.nx},
          {"ny", g.ny},
          {"step", g.step()}};
}

fs::path output_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("GDL_OUTPUT_DIR"); env && *env) return env;
  return "gdl_output";
}

void write_output(const fs::path& dir, const std::string& name, const std::string& contents) {
  write_file_atomically(dir / name, contents);
  std::cout << "wrote " << (dir / name).string() << '\n';
}

// Fully resolved arguments: re-running them reproduces the outputs byte for byte.
std::vector<std::string> canonical_args(const std::string& command, const Options& o) {
  std::vector<std::string> a{command, "--ensemble", o.family};
  if (o.n != 0) a.insert(a.end(), {"--n", std::to_string(o.n)});
  if (o.family == "diagonal") a.insert(a.end(), {"--atoms", o.atoms});
  if (o.family == "jordan") {
    a.insert(a.end(), {"--jordan-eigenvalue", o.jordan_eigenvalue, "--jordan-block",
                       std::to_string(o.jordan_block)});
  }
  if (o.family == "wigner" || o.family == "ginibre") {
    a.insert(a.end(), {"--ensemble-seed", std::to_string(o.ensemble_seed)});
  }
  if (o.family == "file") a.insert(a.end(), {"--matrix-file", fs::absolute(o.matrix_file).string()});
  if (o.window.size() == 4) {
    a.push_back("--window");
    for (double v : o.window) a.push_back(format_double(v));
  }
  if (o.res != 0) {
    a.insert(a.end(), {"--res", std::to_string(o.res)});
  } else {
    a.insert(a.end(), {"--nx", std::to_string(o.nx), "--ny", std::to_string(o.ny)});
  }
  if (command == "predict") {
    a.insert(a.end(), {"--mode", o.mode});
    if (o.eps != 0.0) a.insert(a.end(), {"--eps", format_double(o.eps)});
    if (!o.eps_ladder.empty()) a.insert(a.end(), {"--eps-ladder", o.eps_ladder});
  }
  if (command == "simulate" || command == "compare" || command == "rate") {
    a.insert(a.end(), {"--samples", std::to_string(o.samples), "--seed", std::to_string(o.seed)});
    if (o.eps != 0.0) a.insert(a.end(), {"--eps", format_double(o.eps)});
  }
  if (command == "rate") a.insert(a.end(), {"--n-ladder", o.n_ladder, "--bump", o.bump});
  if (command == "diagnose") {
    a.insert(a.end(), {"--n-ladder", o.n_ladder, "--c-eps", format_double(o.c_eps), "--c-eps0",
                       format_double(o.c_eps0), "--rho0", format_double(o.rho0), "--kappa",
                       format_double(o.kappa)});
  }
  return a;
}

void write_manifest(const fs::path& dir, const std::string& command, const Options& o) {
  Json j;
  j["tool"] = "gdl";
  j["version"] = kVersion;
  j["command"] = command;
  j["argv"] = canonical_args(command, o);
  j["seeds"] = {{"seed", o.seed},
                {"ensemble_seed", o.ensemble_seed},
                {"noise_streams", "sample s uses stream s"}};
  j["note"] = "results do not depend on --workers; replay with: gdl replay <this file>";
  write_output(dir, "manifest.json", j.dump(2) + "\n");
}

Json field_sidecar(const DensityField& field, const Json& ensemble, const std::string& mode) {
  Json j;
  j["n"] = ensemble["n"];
  j["ensemble"] = ensemble;
  j["kind"] = to_string(field.kind);
  j["mode"] = mode;
  j["eps"] = field.eps;
  if (field.kind == FieldKind::Empirical) j["samples"] = field.samples;
  j["grid"] = grid_json(field.grid);
  j["flags"] = field.flagged;
  j["tolerances"] = {{"saddle_residual", 1e-10},
                     {"bisection_width", 1e-12},
                     {"singular", "1e-12 * (1 + largest eigenvalue of Y0)"}};
  j["boundary_convention"] = "the support indicator is closed: nodes on the boundary take the inside value";
  if (field.kind == FieldKind::Empirical) j["missing_nodes"] = "boundary nodes (no 5-point stencil)";
  j["mass"] = field.mass();
  j["code_version"] = kVersion;
  return j;
}

int cmd_predict(const Options& o) {
  const EnsembleSpec spec = make_ensemble(o, o.n);
  const GridSpec grid = make_grid(o);
  const DeformationModel model(build_deformation(spec));
  const fs::path dir = output_dir(o);
  const Json ens = ensemble_json(o, spec);
  if (o.mode == "limit") {
    const DensityField f = predict_field(model, grid, PredictMode::limit(), o.workers);
    write_output(dir, "field.csv", field_csv(f));
    write_output(dir, "field.json", field_sidecar(f, ens, "limit").dump(2) + "\n");
  } else if (o.mode == "eps") {
    std::vector<double> eps_list;
    if (!o.eps_ladder.empty()) {
      for (const auto& e : split(o.eps_ladder, ',')) eps_list.push_back(parse_double(e, "--eps-ladder"));
    } else {
      eps_list.push_back(o.eps != 0.0 ? o.eps : 1.0 / std::sqrt(static_cast<double>(spec.n)));
    }
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      if (!(eps_list[i] > 0.0)) throw ConfigError("eps values must be positive");
      const DensityField f = predict_field(model, grid, PredictMode::regularized(eps_list[i]), o.workers);
      const std::string stem = eps_list.size() == 1 ? "field" : "field_eps" + std::to_string(i);
      write_output(dir, stem + ".csv", field_csv(f));
      write_output(dir, stem + ".json", field_sidecar(f, ens, "eps").dump(2) + "\n");
    }
  } else {
    throw ConfigError("--mode must be 'limit' or 'eps', got '" + o.mode + "'");
  }
  write_manifest(dir, "predict", o);
  return kExitOk;
}

McConfig mc_config(const Options& o, std::size_t n, const GridSpec& grid) {
  McConfig c;
  c.n = n;
  c.samples = o.samples;
  if (o.eps != 0.0) c.eps = o.eps;
  c.seed = o.seed;
  c.grid = grid;
  c.workers = o.workers;
  c.validate();
  return c;
}

int cmd_simulate(const Options& o) {
  const EnsembleSpec spec = make_ensemble(o, o.n);
  const GridSpec grid = make_grid(o);
  const McConfig cfg = mc_config(o, spec.n, grid);
  const DensityField f = empirical_density(build_deformation(spec), cfg);
  const fs::path dir = output_dir(o);
  write_output(dir, "empirical.csv", field_csv(f));
  Json side = field_sidecar(f, ensemble_json(o, spec), "empirical");
  side["seed"] = o.seed;
  write_output(dir, "empirical.json", side.dump(2) + "\n");
  write_manifest(dir, "simulate", o);
  return kExitOk;
}

int cmd_compare(const Options& o) {
  const EnsembleSpec spec = make_ensemble(o, o.n);
  const GridSpec grid = make_grid(o);
  const McConfig cfg = mc_config(o, spec.n, grid);
  const ComplexMatrix a = build_deformation(spec);
  const DeformationModel model(a);
  const double eps = cfg.effective_eps();
  const DensityField emp = empirical_density(a, cfg);
  const DensityField pred = predict_field(model, grid, PredictMode::regularized(eps), o.workers);

  struct Region {
    std::size_t nodes = 0;
    double l1 = 0.0, emp_mass = 0.0, pred_mass = 0.0;
  };
  Region inside, outside, all;
  double linf = 0.0, emp_max = 0.0;
  const double h2 = grid.step() * grid.step();
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    if (!grid.is_interior(k)) continue;
    const double d = std::abs(emp.values[k] - pred.values[k]);
    linf = std::max(linf, d);
    emp_max = std::max(emp_max, emp.values[k]);
    Region& r = model.verdict(grid.node(k)).in_D ? inside : outside;
    for (Region* target : {&r, &all}) {
      ++target->nodes;
      target->l1 += d * h2;
      target->emp_mass += emp.values[k] * h2;
      target->pred_mass += pred.values[k] * h2;
    }
  }
  auto region_json = [](const Region& r) {
    return Json{{"nodes", r.nodes}, {"l1", r.l1}, {"empirical_mass", r.emp_mass}, {"predicted_mass", r.pred_mass}};
  };
  Json report;
  report["ensemble"] = ensemble_json(o, spec);
  report["eps"] = eps;
  report["samples"] = cfg.samples;
  report["grid"] = grid_json(grid);
  report["l1"] = all.l1;
  report["linf"] = linf;
  report["predicted_mass"] = all.pred_mass;
  report["empirical_mass"] = all.emp_mass;
  report["l1_relative"] = all.l1 / all.pred_mass;
  report["empirical_max"] = emp_max;
  report["empirical_cap"] = 1.0 / (std::numbers::pi * eps * eps);
  report["regions"] = {{"inside_D", region_json(inside)}, {"outside_D", region_json(outside)}};
  report["code_version"] = kVersion;

  const fs::path dir = output_dir(o);
  write_output(dir, "predicted.csv", field_csv(pred));
  write_output(dir, "empirical.csv", field_csv(emp));
  write_output(dir, "compare.json", report.dump(2) + "\n");
  write_manifest(dir, "compare", o);
  return kExitOk;
}

int cmd_boundary(const Options& o) {
  const EnsembleSpec spec = make_ensemble(o, o.n);
  if (o.window.size() != 4) throw ConfigError("--window needs four numbers: re_min re_max im_min im_max");
  const std::size_t res = o.res != 0 ? o.res : std::max(o.nx, o.ny);
  const Window w{o.window[0], o.window[1], o.window[2], o.window[3]};
  const BoundaryPolyline b = trace_boundary(DeformationModel(build_deformation(spec)), w, res);
  const fs::path dir = output_dir(o);
  write_output(dir, "boundary.csv", boundary_csv(b));
  Json meta = Json::parse(boundary_metadata_json(b));
  meta["ensemble"] = ensemble_json(o, spec);
  meta["code_version"] = kVersion;
  write_output(dir, "boundary.json", meta.dump(2) + "\n");
  write_manifest(dir, "boundary", o);
  return kExitOk;
}

TestFunction parse_bump(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty() || parts.size() > 2) throw ConfigError("--bump expects radius[:power]");
  const double radius = parse_double(parts[0], "--bump radius");
  const int power = parts.size() == 2 ? static_cast<int>(parse_size(parts[1], "--bump power")) : 4;
  return TestFunction::bump(radius, power);
}

int cmd_rate(const Options& o) {
  const auto ladder = parse_ladder(o.n_ladder);
  const EnsembleSpec family = make_ensemble(o, o.n != 0 ? o.n : ladder.front());
  const GridSpec grid = make_grid(o);
  const TestFunction h = parse_bump(o.bump);
  const RateTable table = rate_experiment(family, h, ladder, mc_config(o, ladder.front(), grid));

  const fs::path dir = output_dir(o);
  write_output(dir, "rate.csv", rate_csv(table));
  Json j;
  j["ensemble"] = ensemble_json(o, family);
  j["test_function"] = {{"id", h.id()}, {"radius", h.radius}, {"power", h.power}, {"integral", h.integral()}};
  j["eps_policy"] = o.eps != 0.0 ? Json(o.eps) : Json("n^-1/2");
  j["samples"] = o.samples;
  j["grid"] = grid_json(grid);
  auto rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"n", r.n},
                    {"eps", r.eps},
                    {"estimate", r.estimate},
                    {"reference", r.reference},
                    {"error", r.error},
                    {"std_error", r.std_error}});
  }
  j["rows"] = rows;
  j["slope"] = table.slope;
  j["code_version"] = kVersion;
  write_output(dir, "rate.json", j.dump(2) + "\n");
  write_manifest(dir, "rate", o);
  return kExitOk;
}

int cmd_diagnose(const Options& o) {
  const auto ladder = parse_ladder(o.n_ladder);
  const EnsembleSpec family = make_ensemble(o, o.n != 0 ? o.n : ladder.front());
  const GridSpec probes = make_grid(o);
  ConditionParams params;
  params.eps = o.c_eps;
  params.eps0 = o.c_eps0;
  params.rho0 = o.rho0;
  params.kappa = o.kappa;
  const ConditionStudy study = check_conditions(family, ladder, probes, params);
  const fs::path dir = output_dir(o);
  write_output(dir, "conditions.csv", conditions_csv(study));
  Json j = Json::parse(conditions_json(study, family.family()));
  j["ensemble"] = ensemble_json(o, family);
  j["code_version"] = kVersion;
  write_output(dir, "conditions.json", j.dump(2) + "\n");
  write_manifest(dir, "diagnose", o);
  return kExitOk;
}

void add_ensemble_options(CLI::App* sub, Options& o) {
  sub->add_option("--ensemble", o.family, "zero | diagonal | jordan | wigner | ginibre | file")
      ->check(CLI::IsMember({"zero", "diagonal", "jordan", "wigner", "ginibre", "file"}));
  sub->add_option("--n", o.n, "matrix size");
  sub->add_option("--atoms", o.atoms, "diagonal atoms, e.g. 1:0@0.5,-1:0@0.5");
  sub->add_option("--jordan-eigenvalue", o.jordan_eigenvalue, "re:im of the Jordan blocks");
  sub->add_option("--jordan-block", o.jordan_block, "size of each Jordan cell");
  sub->add_option("--ensemble-seed", o.ensemble_seed, "seed of a random deformation");
  sub->add_option("--matrix-file", o.matrix_file, "matrix file for --ensemble file");
}

void add_grid_options(CLI::App* sub, Options& o) {
  sub->add_option("--window", o.window, "re_min re_max im_min im_max")->expected(4)->required();
  sub->add_option("--res", o.res, "nodes per axis (square window)");
  sub->add_option("--nx", o.nx, "nodes along re");
  sub->add_option("--ny", o.ny, "nodes along im");
}

void add_common(CLI::App* sub, Options& o) {
  add_ensemble_options(sub, o);
  add_grid_options(sub, o);
  sub->add_option("--workers", o.workers, "worker threads (default: all cores)");
  sub->add_option("--out", o.out, "output directory (default: $GDL_OUTPUT_DIR or ./gdl_output)");
}

void add_mc_options(CLI::App* sub, Options& o) {
  sub->add_option("--samples", o.samples, "Monte Carlo samples");
  sub->add_option("--seed", o.seed, "noise seed");
  sub->add_option("--eps", o.eps, "regularization (default n^-1/2)");
}

int replay(const std::string& manifest_path, const std::string& out) {
  const Json j = Json::parse(read_text_file(manifest_path));
  if (!j.contains("argv") || !j["argv"].is_array()) {
    throw ConfigError(manifest_path + " has no argv list");
  }
  std::vector<std::string> args = j["argv"].get<std::vector<std::string>>();
  args.insert(args.end(), {"--out", out.empty() ? fs::path(manifest_path).parent_path().string() : out});
  return run_cli(args);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Predicted and simulated eigenvalue densities of deformed Ginibre matrices", "gdl"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI file with one [section] per subcommand");
  app.require_subcommand(1);

  Options o;
  std::string manifest_path;
  CLI::App* predict = app.add_subcommand("predict", "limiting or finite-eps predicted density");
  add_common(predict, o);
  predict->add_option("--mode", o.mode, "limit | eps");
  predict->add_option("--eps", o.eps, "eps for --mode eps (default n^-1/2)");
  predict->add_option("--eps-ladder", o.eps_ladder, "comma separated eps values for --mode eps");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo regularized density");
  add_common(simulate, o);
  add_mc_options(simulate, o);

  CLI::App* compare = app.add_subcommand("compare", "Monte Carlo against the finite-eps prediction");
  add_common(compare, o);
  add_mc_options(compare, o);

  CLI::App* boundary = app.add_subcommand("boundary", "trace the boundary of the support");
  add_common(boundary, o);

  CLI::App* rate = app.add_subcommand("rate", "convergence rate of a linear statistic");
  add_common(rate, o);
  add_mc_options(rate, o);
  rate->add_option("--n-ladder", o.n_ladder, "ascending sizes, e.g. 64,128,256,512")->required();
  rate->add_option("--bump", o.bump, "radial bump radius[:power]");

  CLI::App* diagnose = app.add_subcommand("diagnose", "measure the condition quantities on a probe grid");
  add_common(diagnose, o);
  diagnose->add_option("--n-ladder", o.n_ladder, "ascending sizes")->required();
  diagnose->add_option("--c-eps", o.c_eps, "excluded neighbourhood of the spectrum for c3");
  diagnose->add_option("--c-eps0", o.c_eps0, "neighbourhood probed by c4");
  diagnose->add_option("--rho0", o.rho0, "shift used by c4");
  diagnose->add_option("--kappa", o.kappa, "lower end of the c5 range");

  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a manifest.json");
  replay_cmd->add_option("manifest", manifest_path, "manifest written by an earlier run")->required();
  replay_cmd->add_option("--out", o.out, "output directory (default: the manifest's directory)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (predict->parsed()) return cmd_predict(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (compare->parsed()) return cmd_compare(o);
    if (boundary->parsed()) return cmd_boundary(o);
    if (rate->parsed()) return cmd_rate(o);
    if (diagnose->parsed()) return cmd_diagnose(o);
    if (replay_cmd->parsed()) return replay(manifest_path, o.out);
  } catch (const ConfigError& e) {
    std::cerr << "gdl: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "gdl: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "gdl: numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "gdl: error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace gdl
