#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "../support/oracles.hpp"
#include "mongerays/cli.hpp"
#include "mongerays/curvature.hpp"
#include "mongerays/experiments.hpp"
#include "mongerays/monge.hpp"

using namespace mongerays;
namespace fs = std::filesystem;

namespace {

struct Tally {
  double reassembly = 0.0;
  std::size_t pipelines = 0;
  std::size_t supports = 0;
  std::size_t monotone_violations = 0;
  std::size_t setups = 0;
  std::size_t d2_failures = 0;
};

Tally tally;
bool all_passed = true;

void report(int id, bool ok, const std::string& detail) {
  all_passed = all_passed && ok;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void audit_support(const MetricMeasureSpace& space, const std::vector<PlanEntry>& entries) {
  std::vector<std::pair<PointIndex, PointIndex>> support;
  for (const auto& e : entries) support.emplace_back(e.x, e.y);
  tally.monotone_violations += check_d_monotone(space, support, 3).size();
  ++tally.supports;
}

// Runs the pipeline and records the reassembly and monotonicity audits.
MongePipeline audited(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                      const ProbabilityMeasure& mu1) {
  MongePipeline p = run_monge_pipeline(space, mu0, mu1);
  tally.reassembly = std::max({tally.reassembly,
                               reference_reassembly_error(space, p.rays, p.decomposition.structure),
                               plan_reassembly_error(p.restriction.plan, p.rays, p.plan_split),
                               eta_marginal_error(p.rays)});
  ++tally.pipelines;
  audit_support(space, p.kantorovich.plan.entries);
  audit_support(space, p.solution.assignment);
  return p;
}

EvolutionSetup audited_setup(const MetricMeasureSpace& space, const Decomposition& dec,
                             const std::vector<PointIndex>& c, double delta) {
  EvolutionSetup setup = build_evolution(space, dec, c, delta);
  ++tally.setups;
  if (!setup.d2_order) ++tally.d2_failures;
  return setup;
}

bool qualifies(const MongeSolution& s) {
  return s.diagnostics.n_aplus + s.diagnostics.n_aminus == 0 && s.diagnostics.split_mass == 0.0;
}

// Strictly decreasing potential with steps equal to coordinate steps and distances.
std::size_t chain_failures(const MetricMeasureSpace& space, const Decomposition& d) {
  const auto& phi = d.structure.gamma.potential();
  const double eps = space.geo_tol() + default_eps_gamma(space);
  std::size_t bad = 0;
  std::vector<int> interior_owner(space.size(), -1);
  for (std::size_t c = 0; c < d.rays.rays.size(); ++c) {
    const Ray& ray = d.rays.rays[c];
    for (std::size_t i = 0; i + 1 < ray.nodes.size(); ++i) {
      const PointIndex x = ray.nodes[i], y = ray.nodes[i + 1];
      const double dphi = phi[x] - phi[y], dt = ray.t[i + 1] - ray.t[i];
      if (!(dphi > 0.0) || std::abs(dphi - dt) > eps || std::abs(dt - space.dist(x, y)) > eps) ++bad;
    }
    for (std::size_t i = 1; i + 1 < ray.nodes.size(); ++i) interior_owner[ray.nodes[i]] = static_cast<int>(c);
  }
  for (std::size_t c = 0; c < d.rays.rays.size(); ++c) {
    for (PointIndex x : d.rays.rays[c].nodes) {
      if (interior_owner[x] != -1 && interior_owner[x] != static_cast<int>(c)) ++bad;
    }
  }
  return bad;
}

void criterion1() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::size_t qualifying = 0, tried = 0;
  double worst = 0.0;
  while (qualifying < 200 && tried < 5000) {
    const Instance inst = random_instance(rng, 200);
    ++tried;
    const MongePipeline p = audited(inst.model.space, inst.mu0, inst.mu1);
    if (!qualifies(p.solution)) continue;
    ++qualifying;
    worst = std::max(worst, std::abs(p.solution.gap));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, qualifying >= 200 && worst <= 1e-9 && secs <= 120.0,
         fmt("%zu qualifying of %zu instances, max |gap| %.3g, %.1f s", qualifying, tried, worst, secs));
}

Measure1D random_measure_1d(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<int> pos(-12, 12), w(1, 9);
  Measure1D m;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    m.push_back({pos(rng) / 4.0, i, static_cast<double>(w(rng))});
    total += m.back().mass;
  }
  for (auto& a : m) a.mass /= total;
  return m;
}

void criterion2() {
  std::mt19937_64 rng(7);
  std::size_t instances = 0;
  double worst_w1 = 0.0, worst_monge = 0.0;
  while (instances < 300) {
    const Instance inst = random_instance(rng, 16);
    const auto& s = inst.model.space;
    std::vector<PointIndex> src, dst;
    for (PointIndex x = 0; x < s.size(); ++x) {
      if (inst.mu0.mass[x] > 0.0) src.push_back(x);
      if (inst.mu1.mass[x] > 0.0) dst.push_back(x);
    }
    if (src.size() + dst.size() > 6) continue;
    ++instances;
    std::vector<double> a, b;
    for (PointIndex x : src) a.push_back(inst.mu0.mass[x]);
    for (PointIndex y : dst) b.push_back(inst.mu1.mass[y]);
    const double lp = oracle::transport_lp(a, b, [&](std::size_t i, std::size_t j) { return s.dist(src[i], dst[j]); });
    const MongePipeline p = audited(s, inst.mu0, inst.mu1);
    worst_w1 = std::max(worst_w1, std::abs(p.kantorovich.value - lp));
    worst_monge = std::max(worst_monge, std::abs(p.solution.cost - lp));
  }
  std::size_t pairs = 0;
  double worst_1d = 0.0;
  for (std::size_t k0 = 1; k0 <= 7; ++k0) {
    for (std::size_t k1 = 1; k0 + k1 <= 8; ++k1) {
      for (int rep = 0; rep < 6; ++rep) {
        const Measure1D m0 = random_measure_1d(rng, k0), m1 = random_measure_1d(rng, k1);
        std::vector<double> a, b;
        for (const auto& x : m0) a.push_back(x.mass);
        for (const auto& y : m1) b.push_back(y.mass);
        const double lp = oracle::transport_lp(a, b, [&](std::size_t i, std::size_t j) {
          return std::abs(m0[i].t - m1[j].t);
        });
        worst_1d = std::max(worst_1d, std::abs(monotone_rearrangement(m0, m1).cost - lp));
        ++pairs;
      }
    }
  }
  const double worst = std::max({worst_w1, worst_monge, worst_1d});
  report(2, worst <= 1e-10,
         fmt("%zu spaces: W1 err %.3g, Monge err %.3g; %zu 1D pairs: err %.3g", instances, worst_w1,
             worst_monge, pairs, worst_1d));
}

void criterion3() {
  std::size_t classes = 0, failures = 0;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    const Instance inst = random_instance(rng, 60);
    const MongePipeline p = audited(inst.model.space, inst.mu0, inst.mu1);
    failures += chain_failures(inst.model.space, p.decomposition);
    classes += p.decomposition.rays.classes.size();
  }
  for (std::size_t n : {100u, 400u}) {
    const Instance inst = hemisphere_instance(n);
    const MongePipeline p = audited(inst.model.space, inst.mu0, inst.mu1);
    failures += chain_failures(inst.model.space, p.decomposition);
    classes += p.decomposition.rays.classes.size();
  }

  const MetricMeasureSpace tri = tripod_fixture();
  const auto ids = parse_point_list(tri, {"u", "c", "v", "w"});
  std::vector<double> a(4, 0.0), b(4, 0.0);
  a[ids[0]] = 1.0;
  b[ids[2]] = 0.5;
  b[ids[3]] = 0.5;
  const MongePipeline p = audited(tri, make_measure(tri, a), make_measure(tri, b));
  std::vector<PointIndex> expected{ids[0], ids[1]};
  std::sort(expected.begin(), expected.end());
  const auto& st = p.decomposition.structure;
  const auto& dg = p.solution.diagnostics;
  const bool tripod = st.aplus == expected && st.aminus.empty() && dg.branch_mu0_mass == 1.0 &&
                      dg.reassigned_mass == 1.0 && std::abs(p.solution.gap) <= 1e-9;
  report(3, failures == 0 && tripod,
         fmt("%zu classes, %zu chain failures; tripod A+ = {u, c}: %s, branch mu0 mass %.3g reported",
             classes, failures, tripod ? "yes" : "no", dg.branch_mu0_mass));
}

std::vector<Instance> spheres;
std::vector<MongePipeline> sphere_runs;

void criterion4() {
  std::vector<double> fractions;
  bool bounded = true;
  std::string detail;
  for (std::size_t n : {100u, 200u, 400u, 800u}) {
    spheres.push_back(hemisphere_instance(n));
    sphere_runs.push_back(audited(spheres.back().model.space, spheres.back().mu0, spheres.back().mu1));
    const MongePipeline& p = sphere_runs.back();
    const DualityReport dr = duality_report(p.solution, p.kantorovich);
    bounded = bounded && dr.within_bound;
    fractions.push_back(p.solution.diagnostics.branch_weight_fraction);
    detail += fmt("n=%zu frac %.4g gap %.2g bound %.2g; ", n, fractions.back(), dr.gap, dr.bound);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < fractions.size(); ++i) monotone = monotone && fractions[i] <= 1.2 * fractions[i - 1];
  report(4, monotone && bounded, detail + (monotone ? "decreasing" : "not decreasing"));
}

std::vector<PointIndex> random_subset(std::mt19937_64& rng, const std::vector<PointIndex>& from) {
  std::vector<PointIndex> out;
  for (PointIndex x : from) {
    if (rng() % 2) out.push_back(x);
  }
  if (out.empty()) out.push_back(from[rng() % from.size()]);
  return out;
}

struct McpTally {
  std::size_t triples = 0;
  std::size_t nonempty = 0;  // triples where A meets C_delta
  double worst = std::numeric_limits<double>::infinity();
};

// One (A, delta, t) triple on a pipeline: delta is the potential at a random point of T.
void mcp_triple(std::mt19937_64& rng, const MetricMeasureSpace& space, const MongePipeline& p,
                const CurvatureParams& params, McpTally& t) {
  const auto& T = p.decomposition.structure.t;
  const double delta = p.kantorovich.potential[T[rng() % T.size()]];
  const EvolutionSetup setup = audited_setup(space, p.decomposition, T, delta);
  const double time = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto rows = mcp_check(params, setup, p.decomposition.rays, p.rays, random_subset(rng, T), {time});
  t.worst = std::min(t.worst, rows.front().residual);
  ++t.triples;
  if (rows.front().mass_a > 0.0) ++t.nonempty;
}

void criterion6() {
  std::mt19937_64 rng(31);
  McpTally flat;
  while (flat.triples < 50) {
    const bool grid = rng() % 2;
    const ModelKind kind = grid ? ModelKind::EuclideanGrid : ModelKind::Interval;
    const std::size_t n = grid ? 3 + rng() % 6 : 5 + rng() % 40;
    const ModelSpace m = generate_model(kind, {n, 1.0 + static_cast<double>(rng() % 5), 0});
    const std::size_t size = m.space.size(), k = 1 + rng() % std::min<std::size_t>(size / 2, 8);
    std::vector<double> a(size, 0.0), b(size, 0.0);
    std::vector<PointIndex> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < k; ++i) {
      a[order[i]] = 1.0 / static_cast<double>(k);
      b[order[k + i]] = 1.0 / static_cast<double>(k);
    }
    const MongePipeline p = audited(m.space, make_measure(m.space, a), make_measure(m.space, b));
    if (p.decomposition.structure.t.empty()) continue;
    mcp_triple(rng, m.space, p, {0.0, grid ? 2.0 : 1.0}, flat);
  }

  McpTally sphere;
  const double mesh = spheres[1].model.mesh;
  while (sphere.triples < 20) {
    mcp_triple(rng, spheres[1].model.space, sphere_runs[1], {1.0, 2.0}, sphere);
  }

  const MetricMeasureSpace line = midpoint_interval(10);
  std::vector<double> a(10, 0.0), b(10, 0.0);
  for (std::size_t i = 0; i < 5; ++i) a[i] = 0.2;
  b[9] = 1.0;
  const MongePipeline p = audited(line, make_measure(line, a), make_measure(line, b));
  const EvolutionSetup setup =
      audited_setup(line, p.decomposition, p.decomposition.structure.t, p.kantorovich.potential[9]);
  const auto rows = mcp_check({0.0, 1.0}, setup, p.decomposition.rays, p.rays, {0, 1, 2, 3, 4}, {0.5});
  const double closed = std::abs(rows.front().mass_at - 0.25);

  report(6, flat.worst >= -1e-9 && sphere.worst >= -2.0 * mesh && closed <= 1e-12,
         fmt("%zu flat triples (%zu non-empty) min residual %.3g; %zu sphere triples (%zu non-empty) min "
             "residual %.3g (2 mesh %.3g); m(A_1/2) error %.3g",
             flat.triples, flat.nonempty, flat.worst, sphere.triples, sphere.nonempty, sphere.worst,
             2.0 * mesh, closed));
}

void criterion7() {
  const Instance& inst = spheres[3];
  const MongePipeline& p = sphere_runs[3];
  const double tol = 2.0 * inst.model.mesh;
  std::size_t total = 0, ok = 0, zero = 0;
  double worst = 0.0;
  for (const auto& ray : p.rays) {
    const DensityReport r = density_bound_check(ray, {1.0, 2.0}, 20000, 5);
    zero += r.zero_density;
    for (const auto& row : r.rows) {
      if (row.endpoint) continue;
      ++total;
      worst = std::max(worst, row.violation);
      if (row.violation <= tol) ++ok;
    }
  }
  const double frac = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;

  const ModelSpace m = generate_model(ModelKind::Interval, {40, 1.0, 0});
  std::vector<double> a(40, 0.0), b(40, 0.0);
  a[0] = 1.0;
  b[39] = 1.0;
  const MongePipeline flat = audited(m.space, make_measure(m.space, a), make_measure(m.space, b));
  std::size_t flat_rows = 0, flat_bad = 0;
  for (const auto& ray : flat.rays) {
    for (const auto& row : density_bound_check(ray, {0.0, 2.0}, 200000).rows) {
      ++flat_rows;
      if (row.violation > 0.0) ++flat_bad;
    }
  }
  report(7, total > 0 && frac >= 0.99 && flat_rows > 0 && flat_bad == 0,
         fmt("n=800: %zu/%zu interior quadruples within %.3g (%.4f, max violation %.3g), %zu zero-density "
             "skips; interval constant h: %zu/%zu exact",
             ok, total, tol, frac, worst, zero, flat_rows - flat_bad, flat_rows));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9() {
  const fs::path root = fs::temp_directory_path() / "mongerays_acceptance";
  fs::remove_all(root);
  std::ostringstream log_a, log_b, err;
  const int ra = run({"mongerays", "selftest", "--out-dir", (root / "a").string(), "--seed", "17"}, log_a, err);
  const int rb = run({"mongerays", "selftest", "--out-dir", (root / "b").string(), "--seed", "17"}, log_b, err);
  std::size_t files = 0, differ = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    if (slurp(entry.path()) != slurp(root / "b" / entry.path().filename())) ++differ;
  }
  report(9, ra == 0 && rb == 0 && files > 0 && differ == 0 && log_a.str() == log_b.str(),
         fmt("%zu artifacts, %zu differ, exit codes %d %d", files, differ, ra, rb));
  fs::remove_all(root);
}

}  // namespace

int main() try {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  // 5 and 8 aggregate over every pipeline above and below
  criterion6();
  criterion7();
  report(5, tally.reassembly <= 1e-12,
         fmt("%zu pipelines, max reassembly residual %.3g", tally.pipelines, tally.reassembly));
  report(8, tally.monotone_violations == 0 && tally.d2_failures == 0,
         fmt("%zu supports with %zu cycle violations; %zu evolution setups with %zu order failures",
             tally.supports, tally.monotone_violations, tally.setups, tally.d2_failures));
  criterion9();
  return all_passed ? 0 : 1;
} catch (const std::exception& e) {
  std::printf("FAIL acceptance aborted: %s\n", e.what());
  return 1;
}
