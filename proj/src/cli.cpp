#include "mongerays/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "mongerays/curvature.hpp"
#include "mongerays/error.hpp"
#include "mongerays/experiments.hpp"
#include "mongerays/io.hpp"
#include "mongerays/monge.hpp"
#include "selftest.hpp"

namespace mongerays {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

MetricMeasureSpace load_space(Json doc, const RunConfig& cfg) {
  if (cfg.geo_tol) doc["geo_tol"] = *cfg.geo_tol;
  return space_from_json(doc);
}

Json ids_of(const MetricMeasureSpace& space, const std::vector<PointIndex>& points) {
  Json out = Json::array();
  for (PointIndex x : points) out.push_back(space.id(x));
  return out;
}

Json plan_json(const MetricMeasureSpace& space, const std::vector<PlanEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) out.push_back({space.id(e.x), space.id(e.y), e.mass});
  return out;
}

struct LoadedSolution {
  MetricMeasureSpace space;
  ProbabilityMeasure mu0, mu1;
  std::vector<double> potential;
  double eps_gamma = 0.0;
};

LoadedSolution load_solution(const std::string& path, const std::string& space_path,
                             const RunConfig& cfg) {
  const Json doc = read_json_file(path);
  LoadedSolution s;
  try {
    s.space = load_space(space_path.empty() ? doc.at("space") : read_json_file(space_path), cfg);
    s.mu0 = measure_from_json(s.space, doc.at("mu0"));
    s.mu1 = measure_from_json(s.space, doc.at("mu1"));
    s.potential.assign(s.space.size(), 0.0);
    for (const auto& [id, value] : doc.at("potential").items()) {
      const auto x = s.space.index_of(id);
      if (!x) throw Error(ErrorKind::InputError, "potential names unknown point " + id);
      s.potential[*x] = value.get<double>();
    }
    s.eps_gamma = cfg.eps_gamma.value_or(doc.value("eps_gamma", default_eps_gamma(s.space)));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InputError, path + ": " + e.what());
  }
  return s;
}

Json decomposition_json(const MetricMeasureSpace& space, const Decomposition& d) {
  const GammaStructure& st = d.structure;
  Json doc;
  doc["schema"] = kSchema;
  doc["te"] = ids_of(space, st.te);
  doc["a"] = ids_of(space, st.a);
  doc["b"] = ids_of(space, st.b);
  doc["t"] = ids_of(space, st.t);
  doc["aplus"] = ids_of(space, st.aplus);
  doc["aminus"] = ids_of(space, st.aminus);
  Json witnesses = Json::array();
  for (const auto& w : st.witnesses) {
    witnesses.push_back({{"x", space.id(w.x)},
                         {"z", space.id(w.z)},
                         {"w", space.id(w.w)},
                         {"direction", w.direction == BranchDirection::Forward ? "forward" : "backward"},
                         {"chain_to_z", ids_of(space, w.chain_to_z)},
                         {"chain_to_w", ids_of(space, w.chain_to_w)}});
  }
  doc["witnesses"] = std::move(witnesses);
  Json classes = Json::array();
  Json section = Json::object();
  for (const auto& ray : d.rays.rays) {
    classes.push_back({{"representative", space.id(ray.representative)},
                       {"nodes", ids_of(space, ray.nodes)},
                       {"t", ray.t}});
    for (PointIndex x : ray.nodes) section[space.id(x)] = space.id(ray.representative);
  }
  doc["classes"] = std::move(classes);
  doc["section"] = std::move(section);
  return doc;
}

Json monge_json(const MetricMeasureSpace& space, const MongePipeline& p) {
  const MongeSolution& s = p.solution;
  const MongeDiagnostics& d = s.diagnostics;
  Json doc;
  doc["schema"] = kSchema;
  doc["assignment"] = plan_json(space, s.assignment);
  doc["cost"] = s.cost;
  doc["w1"] = s.w1;
  doc["gap"] = s.gap;
  doc["is_map"] = s.is_map;
  doc["diagnostics"] = {{"reassigned_mass", d.reassigned_mass},
                        {"orphan_mass", d.orphan_mass},
                        {"split_mass", d.split_mass},
                        {"branch_mu0_mass", d.branch_mu0_mass},
                        {"branch_weight_fraction", d.branch_weight_fraction},
                        {"diagonal_mass", d.diagonal_mass},
                        {"pushforward_error", d.pushforward_error},
                        {"additivity_residual", d.additivity_residual},
                        {"gamma_excess", d.gamma_excess},
                        {"diameter", d.diameter},
                        {"n_rays", d.n_rays},
                        {"n_aplus", d.n_aplus},
                        {"n_aminus", d.n_aminus}};
  doc["aplus"] = ids_of(space, p.decomposition.structure.aplus);
  doc["aminus"] = ids_of(space, p.decomposition.structure.aminus);
  Json rays = Json::array();
  for (const auto& r : s.ray_costs) {
    rays.push_back({{"ray_id", r.ray},
                    {"representative", space.id(r.representative)},
                    {"length", r.length},
                    {"n_nodes", r.n_nodes},
                    {"cost_1d", r.cost_1d},
                    {"q_mu0", r.q_mu0}});
  }
  doc["rays"] = std::move(rays);
  if (s.virtual_map) {
    Json atoms = Json::array();
    for (const auto& v : *s.virtual_map) atoms.push_back({space.id(v.x), v.index, space.id(v.y), v.mass});
    doc["virtual_map"] = std::move(atoms);
  } else {
    doc["virtual_map"] = nullptr;
  }
  return doc;
}

Json model_json(const ModelSpace& model, const ModelParams& params) {
  Json doc = space_to_json(model.space);
  doc["model"] = {{"kind", to_string(model.kind)},
                  {"n", params.n},
                  {"size", params.size},
                  {"seed", params.seed},
                  {"mesh", model.mesh}};
  return doc;
}

std::vector<PointIndex> read_point_set(const MetricMeasureSpace& space, const std::string& path) {
  const Json doc = read_json_file(path);
  try {
    const Json& list = doc.is_array() ? doc : doc.at("points");
    return parse_point_list(space, list.get<std::vector<std::string>>());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InputError, path + ": " + e.what());
  }
}

int cmd_generate(const std::string& model_name, const ModelParams& params, const std::string& out_path,
                 const std::string& mu0_path, const std::string& mu1_path, std::ostream& out) {
  const auto kind = parse_model_kind(model_name);
  if (!kind) throw Error(ErrorKind::InputError, "unknown model " + model_name);
  const ModelSpace model = generate_model(*kind, params);
  emit(out_path, dump_json(model_json(model, params)), out);
  if (mu0_path.empty() && mu1_path.empty()) return 0;
  const auto& space = model.space;
  ProbabilityMeasure mu0, mu1;
  if (*kind == ModelKind::Sphere2Sample) {
    const Instance inst = hemisphere_instance(params.n, params.seed);
    mu0 = inst.mu0;
    mu1 = inst.mu1;
  } else {
    const std::size_t half = space.size() / 2;
    std::vector<double> a(space.size(), 0.0), b(space.size(), 0.0);
    for (PointIndex x = 0; x < space.size(); ++x) {
      (x < half ? a : b)[x] = 1.0 / static_cast<double>(x < half ? half : space.size() - half);
    }
    mu0 = make_measure(space, std::move(a));
    mu1 = make_measure(space, std::move(b));
  }
  if (!mu0_path.empty()) write_text_file(mu0_path, dump_json(measure_to_json(space, mu0)));
  if (!mu1_path.empty()) write_text_file(mu1_path, dump_json(measure_to_json(space, mu1)));
  return 0;
}

int cmd_solve(const std::string& space_path, const std::string& mu0_path, const std::string& mu1_path,
              const std::string& out_path, const RunConfig& cfg, std::ostream& out) {
  const Json space_doc = read_json_file(space_path);
  const MetricMeasureSpace space = load_space(space_doc, cfg);
  const ProbabilityMeasure mu0 = measure_from_json(space, read_json_file(mu0_path));
  const ProbabilityMeasure mu1 = measure_from_json(space, read_json_file(mu1_path));
  const KantorovichSolution sol = solve_w1(space, mu0, mu1);
  Json doc;
  doc["schema"] = kSchema;
  doc["w1"] = sol.value;
  doc["dual_value"] = sol.dual_value;
  Json potential = Json::object();
  for (PointIndex x = 0; x < space.size(); ++x) potential[space.id(x)] = sol.potential[x];
  doc["potential"] = std::move(potential);
  doc["plan"] = plan_json(space, sol.plan.entries);
  doc["eps_gamma"] = cfg.eps_gamma.value_or(default_eps_gamma(space));
  doc["space"] = space_to_json(space);
  doc["mu0"] = measure_to_json(space, mu0);
  doc["mu1"] = measure_to_json(space, mu1);
  emit(out_path, dump_json(doc), out);
  return 0;
}

int cmd_decompose(const std::string& solution_path, const std::string& space_path,
                  const std::string& out_path, const RunConfig& cfg, std::ostream& out) {
  const LoadedSolution s = load_solution(solution_path, space_path, cfg);
  const Decomposition d = decompose(s.space, s.potential, s.eps_gamma);
  emit(out_path, dump_json(decomposition_json(s.space, d)), out);
  return 0;
}

int cmd_solve_monge(const std::string& space_path, const std::string& mu0_path,
                    const std::string& mu1_path, const std::string& out_path, const RunConfig& cfg,
                    std::ostream& out) {
  const MetricMeasureSpace space = load_space(read_json_file(space_path), cfg);
  const ProbabilityMeasure mu0 = measure_from_json(space, read_json_file(mu0_path));
  const ProbabilityMeasure mu1 = measure_from_json(space, read_json_file(mu1_path));
  MongeConfig mc;
  mc.eps_gamma = cfg.eps_gamma;
  mc.max_gap = cfg.max_gap;
  const MongePipeline p = run_monge_pipeline(space, mu0, mu1, mc);
  emit(out_path, dump_json(monge_json(space, p)), out);
  return 0;
}

int cmd_check_curvature(const std::string& solution_path, const std::string& space_path,
                        const CurvatureParams& params, double delta, const std::string& set_path,
                        std::vector<double> times, const std::string& out_path,
                        const std::string& density_path, const RunConfig& cfg, std::ostream& out) {
  const LoadedSolution s = load_solution(solution_path, space_path, cfg);
  const Decomposition d = decompose(s.space, s.potential, s.eps_gamma);
  const std::vector<RayProblem1D> rays = disintegrate_reference(s.space, d.rays);
  const EvolutionSetup setup =
      build_evolution(s.space, d, d.structure.t, delta, cfg.level_tol.value_or(0.0));
  const std::vector<PointIndex> a = set_path.empty() ? setup.c_delta : read_point_set(s.space, set_path);
  if (times.empty()) times = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double t : times) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::InputError, "times must lie in [0, 1]");
  }
  std::ostringstream csv;
  csv << "t,residual\n";
  for (const auto& row : mcp_check(params, setup, d.rays, rays, a, times)) {
    csv << fmt17(row.t) << ',' << fmt17(row.residual) << '\n';
  }
  emit(out_path, csv.str(), out);
  if (!density_path.empty()) {
    std::ostringstream dcsv;
    dcsv << "ray_id,sigma_minus,s,tau,sigma_plus,ratio,lower,upper,violation,endpoint\n";
    for (std::size_t c = 0; c < rays.size(); ++c) {
      for (const auto& r : density_bound_check(rays[c], params, 20000, cfg.seed).rows) {
        dcsv << c << ',' << fmt17(r.sigma_minus) << ',' << fmt17(r.s) << ',' << fmt17(r.tau) << ','
             << fmt17(r.sigma_plus) << ',' << fmt17(r.ratio) << ',' << fmt17(r.lower) << ','
             << fmt17(r.upper) << ',' << fmt17(r.violation) << ',' << (r.endpoint ? 1 : 0) << '\n';
      }
    }
    write_text_file(density_path, dcsv.str());
  }
  return 0;
}

int cmd_report(const std::string& space_path, const std::string& mu0_path, const std::string& mu1_path,
               const std::string& out_dir, const RunConfig& cfg, std::ostream& out) {
  const MetricMeasureSpace space = load_space(read_json_file(space_path), cfg);
  const ProbabilityMeasure mu0 = measure_from_json(space, read_json_file(mu0_path));
  const ProbabilityMeasure mu1 = measure_from_json(space, read_json_file(mu1_path));
  MongeConfig mc;
  mc.eps_gamma = cfg.eps_gamma;
  mc.max_gap = cfg.max_gap;
  const MongePipeline p = run_monge_pipeline(space, mu0, mu1, mc);
  const fs::path dir(out_dir);
  write_text_file(dir / "rays.csv", rays_csv(p.solution));
  write_text_file(dir / "branch.csv", branch_csv(space, p, mu0, mu1));
  const DualityReport r = duality_report(p.solution, p.kantorovich);
  Json doc;
  doc["schema"] = kSchema;
  doc["w1"] = r.w1;
  doc["dual_value"] = r.dual_value;
  doc["cost"] = r.cost;
  doc["gap"] = r.gap;
  doc["ray_cost_sum"] = r.ray_cost_sum;
  doc["additivity_residual"] = r.additivity_residual;
  doc["reassigned_mass"] = r.reassigned_mass;
  doc["branch_mu0_mass"] = r.branch_mu0_mass;
  doc["bound"] = r.bound;
  doc["within_bound"] = r.within_bound;
  write_text_file(dir / "duality.json", dump_json(doc));
  out << "wrote " << (dir / "rays.csv").string() << ", " << (dir / "branch.csv").string() << ", "
      << (dir / "duality.json").string() << '\n';
  return 0;
}

}  // namespace

std::string rays_csv(const MongeSolution& solution) {
  std::ostringstream csv;
  csv << "ray_id,length,n_nodes,cost_1d,q_mu0\n";
  for (const auto& r : solution.ray_costs) {
    csv << r.ray << ',' << fmt17(r.length) << ',' << r.n_nodes << ',' << fmt17(r.cost_1d) << ','
        << fmt17(r.q_mu0) << '\n';
  }
  return csv.str();
}

std::string branch_csv(const MetricMeasureSpace& space, const MongePipeline& p,
                       const ProbabilityMeasure& mu0, const ProbabilityMeasure& mu1) {
  std::ostringstream csv;
  csv << "set,id,mu0_mass,mu1_mass,weight\n";
  const GammaStructure& st = p.decomposition.structure;
  auto rows = [&](const char* name, const std::vector<PointIndex>& points) {
    for (PointIndex x : points) {
      csv << name << ',' << space.id(x) << ',' << fmt17(mu0[x]) << ',' << fmt17(mu1[x]) << ','
          << fmt17(space.weight(x)) << '\n';
    }
  };
  rows("aplus", st.aplus);
  rows("aminus", st.aminus);
  return csv.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monge transport along rays on finite metric measure spaces", "mongerays"};
  app.require_subcommand(1);

  RunConfig cfg;
  double eps_gamma = 0.0, geo_tol = 0.0, level_tol = 0.0, max_gap = 0.0;
  std::string space_path, mu0_path, mu1_path, out_path, solution_path, set_path, out_dir,
      density_path, model_name;
  ModelParams params;
  CurvatureParams curv;
  double delta = 0.0;
  std::vector<double> times;
  std::vector<CLI::Option*> tol_options;

  auto add_tolerances = [&](CLI::App* sub) {
    tol_options.push_back(sub->add_option("--eps-gamma", eps_gamma, "Gamma band tolerance"));
    tol_options.push_back(sub->add_option("--geo-tol", geo_tol, "geodesic tolerance of the space"));
    tol_options.push_back(sub->add_option("--max-gap", max_gap, "abort when |cost - W1| exceeds this"));
    tol_options.push_back(sub->add_option("--level-tol", level_tol, "level set tolerance"));
    sub->add_option("--seed", cfg.seed, "seed for sampling");
  };
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("--space", space_path, "space JSON")->required();
    sub->add_option("--mu0", mu0_path, "source measure JSON")->required();
    sub->add_option("--mu1", mu1_path, "target measure JSON")->required();
  };

  auto* gen = app.add_subcommand("generate", "write a model space");
  gen->add_option("--model", model_name,
                  "interval, circle, sphere2_sample, euclidean_grid, tripod or binary_tree")
      ->required();
  gen->add_option("--n", params.n, "resolution");
  gen->add_option("--size", params.size, "length scale");
  gen->add_option("--seed", params.seed, "sampling seed");
  gen->add_option("--out", out_path, "output file (stdout when omitted)");
  gen->add_option("--mu0-out", mu0_path, "also write a source measure");
  gen->add_option("--mu1-out", mu1_path, "also write a target measure");

  auto* solve = app.add_subcommand("solve", "Kantorovich plan and potential");
  add_instance(solve);
  add_tolerances(solve);
  solve->add_option("--out", out_path, "output file");

  auto* dec = app.add_subcommand("decompose", "transport sets, branching and rays");
  dec->add_option("--solution", solution_path, "output of solve")->required();
  dec->add_option("--space", space_path, "override the embedded space");
  add_tolerances(dec);
  dec->add_option("--out", out_path, "output file");

  auto* monge = app.add_subcommand("solve-monge", "transport assignment glued from rays");
  add_instance(monge);
  add_tolerances(monge);
  monge->add_option("--out", out_path, "output file");

  auto* curvature = app.add_subcommand("check-curvature", "measure contraction residuals");
  curvature->add_option("--solution", solution_path, "output of solve")->required();
  curvature->add_option("--space", space_path, "override the embedded space");
  curvature->add_option("--K", curv.K, "curvature lower bound");
  curvature->add_option("--N", curv.N, "dimension upper bound");
  curvature->add_option("--delta", delta, "potential level")->required();
  curvature->add_option("--set", set_path, "JSON list of point ids (default: all of C_delta)");
  curvature->add_option("--times", times, "comma separated times in [0, 1]")->delimiter(',');
  curvature->add_option("--density-out", density_path, "also write density bound rows");
  add_tolerances(curvature);
  curvature->add_option("--out", out_path, "output CSV");

  auto* report = app.add_subcommand("report", "CSV tables for plotting");
  add_instance(report);
  add_tolerances(report);
  report->add_option("--out-dir", out_dir, "output directory")->required();

  auto* self = app.add_subcommand("selftest", "property suite on built-in models");
  self->add_option("--out-dir", out_dir, "artifact directory")->required();
  self->add_option("--seed", cfg.seed, "seed");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (auto* opt : tol_options) {
    if (!opt->count()) continue;
    const std::string name = opt->get_name();
    double& value = name == "--eps-gamma" ? eps_gamma
                    : name == "--geo-tol" ? geo_tol
                    : name == "--max-gap" ? max_gap
                                          : level_tol;
    if (value < 0.0) {
      err << "InputError: " << name << " must be nonnegative\n";
      return 2;
    }
    (name == "--eps-gamma" ? cfg.eps_gamma
     : name == "--geo-tol" ? cfg.geo_tol
     : name == "--max-gap" ? cfg.max_gap
                           : cfg.level_tol) = value;
  }

  try {
    if (gen->parsed()) return cmd_generate(model_name, params, out_path, mu0_path, mu1_path, out);
    if (solve->parsed()) return cmd_solve(space_path, mu0_path, mu1_path, out_path, cfg, out);
    if (dec->parsed()) return cmd_decompose(solution_path, space_path, out_path, cfg, out);
    if (monge->parsed()) return cmd_solve_monge(space_path, mu0_path, mu1_path, out_path, cfg, out);
    if (curvature->parsed()) {
      return cmd_check_curvature(solution_path, space_path, curv, delta, set_path, times, out_path,
                                 density_path, cfg, out);
    }
    if (report->parsed()) return cmd_report(space_path, mu0_path, mu1_path, out_dir, cfg, out);
    if (self->parsed()) return selftest(cfg, out_dir, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "InputError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "NumericFailure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace mongerays
