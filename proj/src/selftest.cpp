#include "selftest.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mongerays/curvature.hpp"
#include "mongerays/experiments.hpp"
#include "mongerays/io.hpp"

namespace mongerays {

namespace {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

double disintegration_error(const MetricMeasureSpace& space, const MongePipeline& p) {
  return std::max({reference_reassembly_error(space, p.rays, p.decomposition.structure),
                   plan_reassembly_error(p.restriction.plan, p.rays, p.plan_split),
                   eta_marginal_error(p.rays)});
}

std::size_t monotone_violations(const MetricMeasureSpace& space, const std::vector<PlanEntry>& entries,
                                std::uint64_t seed) {
  std::vector<std::pair<PointIndex, PointIndex>> support;
  for (const auto& e : entries) support.emplace_back(e.x, e.y);
  return check_d_monotone(space, support, 3, seed).size();
}

}  // namespace

int selftest(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::vector<Check> checks;
  double worst_disint = 0.0;
  std::size_t violations = 0;

  {
    std::mt19937_64 rng(config.seed);
    std::ostringstream csv;
    csv << "instance,w1,cost,gap,n_rays,n_aplus,n_aminus,split_mass\n";
    std::size_t qualifying = 0;
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const Instance inst = random_instance(rng, 40);
      const auto& space = inst.model.space;
      const MongePipeline p = run_monge_pipeline(space, inst.mu0, inst.mu1);
      const auto& s = p.solution;
      worst_disint = std::max(worst_disint, disintegration_error(space, p));
      violations += monotone_violations(space, s.assignment, config.seed);
      violations += monotone_violations(space, p.kantorovich.plan.entries, config.seed);
      char line[256];
      std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%zu,%zu,%zu,%.17g\n", inst.label.c_str(),
                    s.w1, s.cost, s.gap, s.diagnostics.n_rays, s.diagnostics.n_aplus,
                    s.diagnostics.n_aminus, s.diagnostics.split_mass);
      csv << line;
      if (s.diagnostics.n_aplus + s.diagnostics.n_aminus == 0 && s.diagnostics.split_mass == 0.0) {
        ++qualifying;
        worst = std::max(worst, std::abs(s.gap));
      }
    }
    write_text_file(dir / "instances.csv", csv.str());
    checks.push_back({"zero_gap_random", qualifying > 0 && worst <= 1e-9, worst,
                      std::to_string(qualifying) + " qualifying instances"});
  }

  {
    const MetricMeasureSpace space = tripod_fixture();
    const auto ids = parse_point_list(space, {"u", "v", "w"});
    std::vector<double> a(space.size(), 0.0), b(space.size(), 0.0);
    a[ids[0]] = 1.0;
    b[ids[1]] = 0.5;
    b[ids[2]] = 0.5;
    const ProbabilityMeasure mu0 = make_measure(space, a), mu1 = make_measure(space, b);
    const MongePipeline p = run_monge_pipeline(space, mu0, mu1);
    const auto& st = p.decomposition.structure;
    const bool flags = st.aplus == parse_point_list(space, {"u", "c"}) && st.aminus.empty();
    worst_disint = std::max(worst_disint, disintegration_error(space, p));
    violations += monotone_violations(space, p.solution.assignment, config.seed);
    write_text_file(dir / "tripod_branch.csv", branch_csv(space, p, mu0, mu1));
    checks.push_back({"tripod_branching", flags && std::abs(p.solution.gap) <= 1e-9,
                      std::abs(p.solution.gap), "A+ = {u, c}, A- empty"});
  }

  {
    const double coef = distortion_coefficient(1.0, 2.0, 0.5, std::numbers::pi / 2.0);
    const double err = std::abs(coef - std::sqrt(0.5));
    checks.push_back({"distortion_coefficient", err <= 1e-15, err, "K=1 N=2 theta=pi/2 t=1/2"});
  }

  {
    const MetricMeasureSpace space = midpoint_interval(10);
    std::vector<double> a(10, 0.0), b(10, 0.0);
    for (int i = 0; i < 5; ++i) a[static_cast<std::size_t>(i)] = 0.2;
    b[9] = 1.0;
    const MongePipeline p = run_monge_pipeline(space, make_measure(space, a), make_measure(space, b));
    const auto& phi = p.kantorovich.potential;
    const EvolutionSetup setup = build_evolution(space, p.decomposition, p.decomposition.structure.t, phi[9]);
    const std::vector<PointIndex> left{0, 1, 2, 3, 4};
    const auto rows = mcp_check({0.0, 1.0}, setup, p.decomposition.rays, p.rays, left,
                                {0.0, 0.25, 0.5, 0.75, 1.0});
    std::ostringstream csv;
    csv << "t,residual\n";
    double worst = 0.0, half = 0.0;
    for (const auto& r : rows) {
      char line[96];
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", r.t, r.residual);
      csv << line;
      worst = std::min(worst, r.residual);
      if (r.t == 0.5) half = r.mass_at;
    }
    write_text_file(dir / "mcp_interval.csv", csv.str());
    const double err = std::abs(half - 0.25);
    checks.push_back({"mcp_interval_closed_form", err <= 1e-12 && worst >= -1e-9 && setup.d2_order, err,
                      "m(A_1/2) = 1/4"});
  }

  {
    const Instance inst = hemisphere_instance(200, config.seed);
    const auto& space = inst.model.space;
    const MongePipeline p = run_monge_pipeline(space, inst.mu0, inst.mu1);
    worst_disint = std::max(worst_disint, disintegration_error(space, p));
    std::size_t total = 0, ok = 0;
    for (const auto& ray : p.rays) {
      for (const auto& r : density_bound_check(ray, {1.0, 2.0}, 2000, config.seed).rows) {
        if (r.endpoint) continue;
        ++total;
        if (r.violation <= 2.0 * inst.model.mesh) ++ok;
      }
    }
    write_text_file(dir / "sphere_rays.csv", rays_csv(p.solution));
    const double frac = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
    const DualityReport dr = duality_report(p.solution, p.kantorovich);
    checks.push_back({"sphere_density_bounds", total > 0 && frac >= 0.99, frac,
                      std::to_string(total) + " interior quadruples"});
    checks.push_back({"sphere_gap_bound", dr.within_bound, std::abs(dr.gap),
                      "gap within reassigned mass times diameter"});
  }

  checks.push_back({"disintegration_reassembly", worst_disint <= 1e-12, worst_disint, "max identity residual"});
  checks.push_back({"d_monotone_supports", violations == 0, static_cast<double>(violations),
                    "cycles of length <= 3"});

  Json doc;
  doc["schema"] = kSchema;
  doc["seed"] = config.seed;
  Json list = Json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
    all = all && c.passed;
    char value[32];
    std::snprintf(value, sizeof value, "%.3g", c.value);
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << value << ", " << c.detail << ")\n";
  }
  doc["checks"] = std::move(list);
  doc["passed"] = all;
  write_text_file(dir / "selftest.json", dump_json(doc));
  return all ? 0 : 4;
}

}  // namespace mongerays
