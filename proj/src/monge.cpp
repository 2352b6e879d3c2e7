#include "mongerays/monge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

std::vector<Coupling1D> solve_rays(const std::vector<RayProblem1D>& rays, std::size_t threads) {
  std::vector<Coupling1D> out(rays.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, rays.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < rays.size(); c = next++) {
      out[c] = monotone_rearrangement(rays[c].mu0_y, rays[c].mu1_y);
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  return out;
}

std::vector<PlanEntry> merge(std::map<std::pair<PointIndex, PointIndex>, double>& acc) {
  std::vector<PlanEntry> out;
  for (const auto& [key, m] : acc) {
    if (m > 0.0) out.push_back({key.first, key.second, m});
  }
  return out;
}

}  // namespace

MongePipeline run_monge_pipeline(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                                 const ProbabilityMeasure& mu1, const MongeConfig& config) {
  const std::size_t n = space.size();
  MongePipeline p;
  p.kantorovich = solve_w1(space, mu0, mu1);
  const double eps = config.eps_gamma.value_or(default_eps_gamma(space));
  p.decomposition = decompose(space, p.kantorovich.potential, eps);
  const GammaStructure& structure = p.decomposition.structure;
  p.restriction = restrict_to_transport_set(space, mu0, mu1, p.kantorovich.plan, structure);
  p.rays = disintegrate_reference(space, p.decomposition.rays);
  p.plan_split = disintegrate_plan(space, p.restriction.plan, structure, p.decomposition.rays,
                                   p.rays);
  p.couplings = solve_rays(p.rays, config.threads);

  MongeSolution& sol = p.solution;
  MongeDiagnostics& diag = sol.diagnostics;
  std::map<std::pair<PointIndex, PointIndex>, double> acc;
  double ray_cost_sum = 0.0;
  for (std::size_t c = 0; c < p.rays.size(); ++c) {
    const RayProblem1D& ray = p.rays[c];
    const Coupling1D& cp = p.couplings[c];
    for (const auto& piece : cp.pieces) acc[{piece.x, piece.y}] += piece.mass * ray.q_mu0;
    diag.split_mass += cp.split_mass * ray.q_mu0;
    ray_cost_sum += cp.cost * ray.q_mu0;
    sol.ray_costs.push_back({c, ray.rep, ray.length(), ray.nodes.size(), cp.cost, ray.q_mu0});
  }
  double orphan_cost = 0.0;
  for (const auto& e : p.plan_split.orphans) {
    acc[{e.x, e.y}] += e.mass;
    orphan_cost += e.mass * space.dist(e.x, e.y);
  }
  for (PointIndex x = 0; x < n; ++x) {
    if (p.restriction.fixed[x] > 0.0) acc[{x, x}] += p.restriction.fixed[x];
  }
  sol.assignment = merge(acc);

  std::vector<double> out_mass(n, 0.0), in_mass(n, 0.0);
  std::vector<std::size_t> targets(n, 0);
  const auto& phi = p.kantorovich.potential;
  diag.gamma_excess = -std::numeric_limits<double>::infinity();
  for (const auto& e : sol.assignment) {
    out_mass[e.x] += e.mass;
    in_mass[e.y] += e.mass;
    ++targets[e.x];
    sol.cost += e.mass * space.dist(e.x, e.y);
    diag.gamma_excess = std::max(diag.gamma_excess, space.dist(e.x, e.y) - (phi[e.x] - phi[e.y]));
  }
  if (sol.assignment.empty()) diag.gamma_excess = 0.0;
  sol.is_map = std::all_of(targets.begin(), targets.end(), [](std::size_t k) { return k <= 1; });
  for (PointIndex x = 0; x < n; ++x) {
    diag.pushforward_error = std::max({diag.pushforward_error, std::abs(out_mass[x] - mu0[x]),
                                       std::abs(in_mass[x] - mu1[x])});
  }
  if (diag.pushforward_error > 1e-9) {
    throw Error(ErrorKind::PushforwardMismatch,
                "assignment marginals off by " + std::to_string(diag.pushforward_error));
  }

  sol.w1 = p.kantorovich.value;
  sol.gap = sol.cost - sol.w1;
  diag.reassigned_mass = p.plan_split.reassigned_mass;
  diag.orphan_mass = p.plan_split.orphan_mass;
  diag.diagonal_mass = p.restriction.diagonal_mass;
  diag.additivity_residual = std::abs(sol.cost - ray_cost_sum - orphan_cost);
  diag.diameter = space.diameter();
  diag.n_rays = p.rays.size();
  diag.n_aplus = structure.aplus.size();
  diag.n_aminus = structure.aminus.size();
  double branch_weight = 0.0, te_weight = 0.0;
  for (PointIndex x : structure.te) {
    te_weight += space.weight(x);
    if (structure.in_aplus[x] || structure.in_aminus[x]) {
      branch_weight += space.weight(x);
      diag.branch_mu0_mass += mu0[x];
    }
  }
  diag.branch_weight_fraction = te_weight > 0.0 ? branch_weight / te_weight : 0.0;
  if (!sol.is_map) sol.virtual_map = virtual_map(sol.assignment, mu0);

  if (config.max_gap && std::abs(sol.gap) > *config.max_gap) {
    throw Error(ErrorKind::GapExceeded, "gap " + std::to_string(sol.gap) + " exceeds " +
                                            std::to_string(*config.max_gap));
  }
  return p;
}

MongeSolution solve_monge(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                          const ProbabilityMeasure& mu1, const MongeConfig& config) {
  return run_monge_pipeline(space, mu0, mu1, config).solution;
}

std::optional<std::vector<VirtualAtom>> virtual_map(const std::vector<PlanEntry>& assignment,
                                                    const ProbabilityMeasure& mu0,
                                                    std::size_t cap) {
  double atom = 0.0;
  for (double m : mu0.mass) {
    if (m <= 0.0) continue;
    if (atom == 0.0) atom = m;
    if (std::abs(m - atom) > 1e-12) return std::nullopt;
  }
  if (atom == 0.0) return std::nullopt;

  std::size_t k = 1;
  for (; k <= cap; ++k) {
    const bool fits = std::all_of(assignment.begin(), assignment.end(), [&](const PlanEntry& e) {
      const double units = e.mass / atom * static_cast<double>(k);
      return std::abs(units - std::round(units)) <= 1e-9 * static_cast<double>(k);
    });
    if (fits) break;
  }
  if (k > cap) return std::nullopt;

  std::vector<VirtualAtom> out;
  std::vector<std::size_t> used(mu0.mass.size(), 0);
  const double sub = atom / static_cast<double>(k);
  for (const auto& e : assignment) {
    const auto units = static_cast<std::size_t>(std::llround(e.mass / sub));
    for (std::size_t u = 0; u < units; ++u) out.push_back({e.x, used[e.x]++, e.y, sub});
  }
  return out;
}

DualityReport duality_report(const MongeSolution& solution, const KantorovichSolution& kantorovich) {
  DualityReport r;
  r.w1 = kantorovich.value;
  r.dual_value = kantorovich.dual_value;
  r.cost = solution.cost;
  r.gap = solution.cost - kantorovich.value;
  for (const auto& rc : solution.ray_costs) r.ray_cost_sum += rc.q_mu0 * rc.cost_1d;
  r.additivity_residual = solution.diagnostics.additivity_residual;
  r.reassigned_mass = solution.diagnostics.reassigned_mass;
  r.branch_mu0_mass = solution.diagnostics.branch_mu0_mass;
  r.bound = (r.reassigned_mass + solution.diagnostics.orphan_mass) * solution.diagnostics.diameter;
  r.within_bound = std::abs(r.gap) <= r.bound + 1e-9;
  r.rays = solution.ray_costs;
  return r;
}

}  // namespace mongerays
