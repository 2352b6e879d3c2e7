#include "mongerays/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "mongerays/error.hpp"
#include "mongerays/kantorovich.hpp"

namespace mongerays {

namespace {

void check_params(double K, double N) {
  if (!std::isfinite(K) || !(N >= 1.0)) {
    throw Error(ErrorKind::DomainError, "need finite K and N >= 1");
  }
}

// Comparison function of the model space: sin, identity or sinh of x sqrt(|K|/(N-1)).
double comparison(double K, double N, double x) {
  if (K == 0.0) return x;
  const double a = x * std::sqrt(std::abs(K) / (N - 1.0));
  if (K > 0.0) {
    if (a >= std::numbers::pi) {
      throw Error(ErrorKind::DomainError, "distance " + std::to_string(x) +
                                              " reaches the diameter bound for K=" +
                                              std::to_string(K));
    }
    return std::sin(a);
  }
  return std::sinh(a);
}

}  // namespace

double distortion_coefficient(double K, double N, double t, double theta) {
  check_params(K, N);
  if (theta < 0.0) throw Error(ErrorKind::DomainError, "negative distance");
  if (N == 1.0) return 1.0;
  if (K == 0.0 || theta == 0.0) return 1.0 - t;
  return comparison(K, N, (1.0 - t) * theta) / comparison(K, N, theta);
}

double max_ray_spacing(const RayDecomposition& decomposition) {
  double spacing = 0.0;
  for (const auto& ray : decomposition.rays) {
    for (std::size_t i = 0; i + 1 < ray.t.size(); ++i) {
      spacing = std::max(spacing, ray.t[i + 1] - ray.t[i]);
    }
  }
  return spacing;
}

EvolutionSetup build_evolution(const MetricMeasureSpace& space, const Decomposition& decomposition,
                               std::vector<PointIndex> c, double delta, double level_tol) {
  const GammaStructure& structure = decomposition.structure;
  const GammaSet& gamma = structure.gamma;
  const auto& phi = gamma.potential();
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (PointIndex x : c) {
    if (x >= space.size() || !structure.in_t[x]) {
      throw Error(ErrorKind::InputError,
                  "evolution set must lie in T; " +
                      (x < space.size() ? space.id(x) : std::to_string(x)) + " does not");
    }
  }

  EvolutionSetup setup;
  setup.c = c;
  setup.delta = delta;
  setup.level_tol = level_tol > 0.0 ? level_tol : max_ray_spacing(decomposition.rays);
  if (!(setup.level_tol > 0.0)) setup.level_tol = space.geo_tol();
  for (PointIndex x = 0; x < space.size(); ++x) {
    if (std::abs(phi[x] - delta) <= setup.level_tol) setup.level_set.push_back(x);
  }
  if (setup.level_set.empty()) {
    throw Error(ErrorKind::EmptyLevelSet, "no point within " + std::to_string(setup.level_tol) +
                                              " of level " + std::to_string(delta));
  }
  std::vector<char> on_level(space.size(), 0);
  for (PointIndex y : setup.level_set) on_level[y] = 1;

  std::vector<std::pair<double, double>> certificate;
  for (PointIndex x : c) {
    std::optional<PointIndex> best;
    auto consider = [&](PointIndex y) {
      if (!on_level[y]) return;
      const double gap = std::abs(phi[y] - delta);
      if (!best || gap < std::abs(phi[*best] - delta) ||
          (gap == std::abs(phi[*best] - delta) && y < *best)) {
        best = y;
      }
    };
    for (PointIndex y : gamma.image(x)) consider(y);
    for (PointIndex y : gamma.preimage(x)) consider(y);
    if (!best) {
      setup.no_partner.push_back(x);
      continue;
    }
    setup.c_delta.push_back(x);
    setup.target.push_back(*best);
    setup.target_coord.push_back(decomposition.rays.coordinate[x] + phi[x] - delta);
    certificate.emplace_back(phi[x], delta);
  }
  setup.d2_order = check_d2_monotone_order(certificate);
  return setup;
}

EvolvedSet evolve(const EvolutionSetup& setup, const RayDecomposition& decomposition,
                  const std::vector<PointIndex>& a, double t) {
  EvolvedSet out;
  for (PointIndex x : a) {
    const auto it = std::lower_bound(setup.c_delta.begin(), setup.c_delta.end(), x);
    if (it == setup.c_delta.end() || *it != x) continue;
    const std::size_t k = static_cast<std::size_t>(it - setup.c_delta.begin());
    const double s0 = decomposition.coordinate[x];
    const double s = s0 + t * (setup.target_coord[k] - s0);
    out.origin.push_back(x);
    out.coord.push_back(s);
    if (t >= 1.0) {
      out.nodes.push_back(setup.target[k]);
      continue;
    }
    const Ray& ray = decomposition.rays[decomposition.class_of[x]];
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < ray.t.size(); ++i) {
      if (std::abs(ray.t[i] - s) < std::abs(ray.t[nearest] - s)) nearest = i;
    }
    out.nodes.push_back(ray.nodes[nearest]);
  }
  std::sort(out.nodes.begin(), out.nodes.end());
  out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
  return out;
}

std::vector<McpRow> mcp_check(const CurvatureParams& params, const EvolutionSetup& setup,
                              const RayDecomposition& decomposition,
                              const std::vector<RayProblem1D>& rays,
                              const std::vector<PointIndex>& a, const std::vector<double>& ts) {
  check_params(params.K, params.N);
  std::vector<McpRow> out;
  for (double t : ts) {
    McpRow row;
    row.t = t;
    row.coefficient = 1.0;
    for (std::size_t k = 0; k < setup.c_delta.size(); ++k) {
      const double theta =
          std::abs(setup.target_coord[k] - decomposition.coordinate[setup.c_delta[k]]);
      const double coef = distortion_coefficient(params.K, params.N, t, theta);
      row.coefficient = std::min(row.coefficient, std::pow(coef, params.N - 1.0));
    }
    for (PointIndex x : a) {
      const auto it = std::lower_bound(setup.c_delta.begin(), setup.c_delta.end(), x);
      if (it == setup.c_delta.end() || *it != x) continue;
      const std::size_t k = static_cast<std::size_t>(it - setup.c_delta.begin());
      const std::size_t cls = decomposition.class_of[x];
      const RayProblem1D& ray = rays[cls];
      const auto pos = std::find(ray.nodes.begin(), ray.nodes.end(), x) - ray.nodes.begin();
      const auto i = static_cast<std::size_t>(pos);
      const double lo = ray.ts[i] - ray.cell_lo[i];
      const double hi = ray.ts[i] + ray.cell_hi[i];
      const double tau = setup.target_coord[k];
      row.mass_a += ray.q_mass * integrate_h(ray, lo, hi);
      row.mass_at += ray.q_mass * integrate_h(ray, (1.0 - t) * lo + t * tau, (1.0 - t) * hi + t * tau);
    }
    row.bound = (1.0 - t) * row.coefficient * row.mass_a;
    row.residual = row.mass_at - row.bound;
    out.push_back(row);
  }
  return out;
}

DensityReport density_bound_check(const RayProblem1D& ray, const CurvatureParams& params,
                                  std::size_t samples, std::uint64_t seed) {
  check_params(params.K, params.N);
  DensityReport report;
  const std::size_t n = ray.ts.size();
  if (n < 3) return report;
  const double K = params.K, N = params.N;

  auto evaluate = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    if (ray.h[j] == 0.0) {
      ++report.zero_density;
      return;
    }
    DensityRow row;
    row.sigma_minus = ray.ts[i];
    row.s = ray.ts[j];
    row.tau = ray.ts[k];
    row.sigma_plus = ray.ts[l];
    row.ratio = ray.h[k] / ray.h[j];
    if (N == 1.0) {
      row.lower = row.upper = 1.0;
    } else {
      row.lower = std::pow(comparison(K, N, row.sigma_plus - row.tau) /
                               comparison(K, N, row.sigma_plus - row.s),
                           N - 1.0);
      row.upper = std::pow(comparison(K, N, row.tau - row.sigma_minus) /
                               comparison(K, N, row.s - row.sigma_minus),
                           N - 1.0);
    }
    row.violation = std::max(row.lower - row.ratio, row.ratio - row.upper);
    row.endpoint = i == 0 || l == n - 1;
    report.rows.push_back(row);
  };

  // Quadruples i < j <= k < l: C(n,4) with j < k plus C(n,3) with j == k.
  const double nn = static_cast<double>(n);
  const double count = nn * (nn - 1) * (nn - 2) * (nn - 3) / 24.0 + nn * (nn - 1) * (nn - 2) / 6.0;
  if (count <= static_cast<double>(samples)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j; k < n; ++k)
          for (std::size_t l = k + 1; l < n; ++l) evaluate(i, j, k, l);
    return report;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t drawn = 0;
  while (drawn < samples) {
    std::array<std::size_t, 4> q{pick(rng), pick(rng), pick(rng), pick(rng)};
    std::sort(q.begin(), q.end());
    if (q[0] == q[1] || q[2] == q[3]) continue;
    ++drawn;
    evaluate(q[0], q[1], q[2], q[3]);
  }
  return report;
}

}  // namespace mongerays
