#include "mongerays/kantorovich.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "mongerays/error.hpp"
#include "mongerays/network_simplex.hpp"

namespace mongerays {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond this many plan components the constants come from one shortest-path tree.
constexpr std::size_t kMaxCentredComponents = 400;

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

// Solves c_a - c_b <= bound[a][b] and returns the mean of the shortest-path solutions
// over all roots; a constraint is tight in the result only if every root makes it tight.
std::vector<double> centred_constants(const std::vector<std::vector<double>>& bound) {
  const std::size_t k = bound.size();
  if (k == 1) return {0.0};
  // Edge b -> a with weight bound[a][b]; dist[r][a] satisfies dist[r][a] <= dist[r][b] + w.
  std::vector<std::vector<double>> dist(k, std::vector<double>(k, kInf));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) dist[b][a] = std::min(dist[b][a], bound[a][b]);
  }
  for (std::size_t a = 0; a < k; ++a) dist[a][a] = std::min(dist[a][a], 0.0);

  std::vector<double> c(k, 0.0);
  if (k <= kMaxCentredComponents) {
    for (std::size_t via = 0; via < k; ++via) {
      const auto& row_via = dist[via];
      for (std::size_t i = 0; i < k; ++i) {
        const double di = dist[i][via];
        if (di == kInf) continue;
        auto& row_i = dist[i];
        for (std::size_t j = 0; j < k; ++j) {
          const double cand = di + row_via[j];
          if (cand < row_i[j]) row_i[j] = cand;
        }
      }
    }
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t a = 0; a < k; ++a) c[a] += dist[r][a];
    }
    for (double& v : c) v /= static_cast<double>(k);
  } else {
    // SPFA from component 0.
    std::vector<double> d(k, kInf);
    std::vector<char> queued(k, 0);
    std::deque<std::size_t> queue{0};
    d[0] = 0.0;
    queued[0] = 1;
    std::size_t relaxations = 0;
    while (!queue.empty()) {
      const std::size_t b = queue.front();
      queue.pop_front();
      queued[b] = 0;
      for (std::size_t a = 0; a < k; ++a) {
        const double cand = d[b] + dist[b][a];
        if (cand < d[a] - 1e-15) {
          d[a] = cand;
          if (!queued[a]) {
            queue.push_back(a);
            queued[a] = 1;
          }
        }
      }
      if (++relaxations > k * k) {
        throw Error(ErrorKind::NumericFailure, "potential constraints have a negative cycle");
      }
    }
    c = d;
  }
  for (double v : c) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NumericFailure, "unbounded potential offset");
  }
  return c;
}

void normalize_per_component(const MetricMeasureSpace& space, std::vector<double>& phi) {
  const std::size_t n = space.size();
  std::vector<std::size_t> comp(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != n) continue;
    double lo = kInf;
    for (std::size_t x = 0; x < n; ++x) {
      if (std::isfinite(space.dist(s, x))) {
        comp[x] = s;
        lo = std::min(lo, phi[x]);
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (comp[x] == s) phi[x] -= lo;
    }
  }
}

}  // namespace

std::size_t tighten_potential(const MetricMeasureSpace& space, std::vector<double>& potential) {
  const std::size_t n = space.size();
  std::size_t changed_sweeps = 0;
  for (std::size_t sweep = 0; sweep <= n; ++sweep) {
    bool changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      double best = potential[x];
      for (std::size_t y = 0; y < n; ++y) {
        const double cand = space.dist(x, y) + potential[y];
        if (cand < best) best = cand;
      }
      if (best < potential[x] - 1e-14 * (1.0 + std::abs(potential[x]))) changed = true;
      potential[x] = best;
    }
    if (!changed) break;
    ++changed_sweeps;
  }
  return changed_sweeps;
}

double lipschitz_excess(const MetricMeasureSpace& space, const std::vector<double>& potential) {
  double worst = -kInf;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (x == y || !std::isfinite(space.dist(x, y))) continue;
      worst = std::max(worst, std::abs(potential[x] - potential[y]) - space.dist(x, y));
    }
  }
  return worst;
}

KantorovichSolution solve_w1(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                             const ProbabilityMeasure& mu1) {
  const std::size_t n = space.size();
  if (mu0.size() != n || mu1.size() != n) {
    throw Error(ErrorKind::InputError, "measures do not match the space");
  }
  const double t0 = std::accumulate(mu0.mass.begin(), mu0.mass.end(), 0.0);
  const double t1 = std::accumulate(mu1.mass.begin(), mu1.mass.end(), 0.0);
  if (std::abs(t0 - t1) > 1e-12) {
    throw Error(ErrorKind::Infeasible, "marginal masses differ");
  }

  KantorovichSolution sol;
  bool identical = true;
  for (std::size_t x = 0; x < n; ++x) identical = identical && mu0[x] == mu1[x];
  if (identical) {
    for (std::size_t x = 0; x < n; ++x) {
      if (mu0[x] > 0.0) sol.plan.entries.push_back({x, x, mu0[x]});
    }
    sol.potential.assign(n, 0.0);
    return sol;
  }

  std::vector<PointIndex> sources, sinks;
  for (std::size_t x = 0; x < n; ++x) {
    if (mu0[x] > 0.0) sources.push_back(x);
    if (mu1[x] > 0.0) sinks.push_back(x);
  }
  const std::size_t m = sources.size();
  const std::size_t k = sinks.size();
  TransportProblem problem;
  for (auto s : sources) problem.supply.push_back(mu0[s]);
  for (auto t : sinks) problem.demand.push_back(mu1[t]);
  // Rescale to the supply total so tiny rounding in the inputs cannot unbalance the LP.
  const double ds = std::accumulate(problem.demand.begin(), problem.demand.end(), 0.0);
  for (double& v : problem.demand) v *= t0 / ds;
  problem.cost.resize(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = space.dist(sources[i], sinks[j]);
      if (!std::isfinite(d)) {
        throw Error(ErrorKind::Disconnected, "source and target in different components");
      }
      problem.cost[i * k + j] = d;
    }
  }
  const TransportResult lp = solve_transport(problem);

  for (const auto& f : lp.flows) {
    sol.plan.entries.push_back({sources[f.source], sinks[f.sink], f.mass});
  }
  std::sort(sol.plan.entries.begin(), sol.plan.entries.end(), [](const auto& a, const auto& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  for (const auto& e : sol.plan.entries) sol.plan.cost += e.mass * space.dist(e.x, e.y);
  sol.value = sol.plan.cost;

  // Bipartite support graph: sources 0..m-1, sinks m..m+k-1.
  UnionFind uf(m + k);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(m + k);
  for (const auto& f : lp.flows) {
    const double d = problem.cost[f.source * k + f.sink];
    uf.unite(f.source, m + f.sink);
    adj[f.source].emplace_back(m + f.sink, -d);
    adj[m + f.sink].emplace_back(f.source, d);
  }
  std::vector<std::size_t> comp_of(m + k);
  std::vector<std::size_t> comp_ids;
  for (std::size_t v = 0; v < m + k; ++v) {
    const std::size_t r = uf.find(v);
    auto it = std::find(comp_ids.begin(), comp_ids.end(), r);
    if (it == comp_ids.end()) {
      comp_ids.push_back(r);
      comp_of[v] = comp_ids.size() - 1;
    } else {
      comp_of[v] = static_cast<std::size_t>(it - comp_ids.begin());
    }
  }
  // phi(sink) = phi(source) - d on every support arc.
  std::vector<double> offset(m + k, kInf);
  for (std::size_t v = 0; v < m + k; ++v) {
    if (offset[v] != kInf) continue;
    offset[v] = 0.0;
    std::vector<std::size_t> stack{v};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (auto [y, step] : adj[x]) {
        if (offset[y] == kInf) {
          offset[y] = offset[x] + step;
          stack.push_back(y);
        }
      }
    }
  }

  const std::size_t comps = comp_ids.size();
  std::vector<std::vector<double>> bound(comps, std::vector<double>(comps, kInf));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = comp_of[i];
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t b = comp_of[m + j];
      const double v = problem.cost[i * k + j] - offset[i] + offset[m + j];
      if (v < bound[a][b]) bound[a][b] = v;
    }
  }
  for (std::size_t a = 0; a < comps; ++a) {
    if (bound[a][a] < -1e-9 * (1.0 + space.diameter())) {
      throw Error(ErrorKind::NumericFailure, "simplex plan is not optimal within tolerance");
    }
  }
  const std::vector<double> constant = centred_constants(bound);

  std::vector<double> sink_phi(k);
  for (std::size_t j = 0; j < k; ++j) sink_phi[j] = constant[comp_of[m + j]] + offset[m + j];
  sol.potential.assign(n, kInf);
  for (std::size_t z = 0; z < n; ++z) {
    double best = kInf;
    for (std::size_t j = 0; j < k; ++j) best = std::min(best, space.dist(z, sinks[j]) + sink_phi[j]);
    sol.potential[z] = best;
  }
  for (double& v : sol.potential) {
    if (!std::isfinite(v)) v = 0.0;
  }
  tighten_potential(space, sol.potential);
  normalize_per_component(space, sol.potential);

  sol.dual_value = 0.0;
  for (std::size_t x = 0; x < n; ++x) sol.dual_value += sol.potential[x] * (mu0[x] - mu1[x]);
  return sol;
}

GammaSet::GammaSet(std::vector<std::vector<PointIndex>> forward, std::vector<double> potential,
                   double tol)
    : forward_(std::move(forward)), backward_(forward_.size()), potential_(std::move(potential)),
      tol_(tol) {
  for (auto& row : forward_) std::sort(row.begin(), row.end());
  for (PointIndex x = 0; x < forward_.size(); ++x) {
    for (PointIndex y : forward_[x]) backward_[y].push_back(x);
  }
}

bool GammaSet::contains(PointIndex x, PointIndex y) const {
  const auto& row = forward_[x];
  return std::binary_search(row.begin(), row.end(), y);
}

std::size_t GammaSet::size() const {
  std::size_t total = 0;
  for (const auto& row : forward_) total += row.size();
  return total;
}

std::vector<std::pair<PointIndex, PointIndex>> GammaSet::pairs() const {
  std::vector<std::pair<PointIndex, PointIndex>> out;
  for (PointIndex x = 0; x < forward_.size(); ++x) {
    for (PointIndex y : forward_[x]) out.emplace_back(x, y);
  }
  return out;
}

double default_eps_gamma(const MetricMeasureSpace& space) { return 1e-9 + space.geo_tol(); }

GammaSet build_gamma(const MetricMeasureSpace& space, const std::vector<double>& potential,
                     double eps_gamma) {
  const std::size_t n = space.size();
  if (potential.size() != n) throw Error(ErrorKind::InputError, "potential size mismatch");
  std::vector<std::vector<PointIndex>> forward(n);
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y = 0; y < n; ++y) {
      const double d = space.dist(x, y);
      if (x == y || (std::isfinite(d) && potential[x] - potential[y] >= d - eps_gamma)) {
        forward[x].push_back(y);
      }
    }
  }
  return GammaSet(std::move(forward), potential, eps_gamma);
}

GammaSet build_gamma(const MetricMeasureSpace& space, const KantorovichSolution& solution,
                     double eps_gamma) {
  return build_gamma(space, solution.potential, eps_gamma);
}

GammaSet geodesic_closure(const MetricMeasureSpace& space, const GammaSet& gamma) {
  const std::size_t n = space.size();
  const auto& phi = gamma.potential();
  const double slack = gamma.tol() + space.geo_tol();
  std::vector<unsigned char> member(n * n, 0);
  std::vector<std::vector<PointIndex>> forward(n);
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y : gamma.image(x)) member[x * n + y] = 1;
  }
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y : gamma.image(x)) {
      if (x == y) continue;
      const DiscreteGeodesic path = shortest_path(space, x, y);
      const auto& nodes = path.nodes;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          const PointIndex a = nodes[i], b = nodes[j];
          if (member[a * n + b]) continue;
          const double defect = space.dist(a, b) - (phi[a] - phi[b]);
          if (defect > slack) {
            throw Error(ErrorKind::ClosureInflation,
                        "pair (" + space.id(a) + "," + space.id(b) + ") on the geodesic from " +
                            space.id(x) + " to " + space.id(y) + " misses the potential by " +
                            std::to_string(defect));
          }
          member[a * n + b] = 1;
        }
      }
    }
  }
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y = 0; y < n; ++y) {
      if (member[x * n + y]) forward[x].push_back(y);
    }
  }
  return GammaSet(std::move(forward), phi, gamma.tol());
}

std::vector<MonotoneViolation> check_d_monotone(
    const MetricMeasureSpace& space, const std::vector<std::pair<PointIndex, PointIndex>>& pairs,
    std::size_t max_cycle_len, std::uint64_t seed, std::size_t samples, std::size_t limit) {
  std::vector<MonotoneViolation> out;
  const std::size_t p = pairs.size();
  if (max_cycle_len < 2 || p < 2) return out;

  auto test = [&](const std::vector<std::size_t>& idx) {
    double own = 0.0, shifted = 0.0;
    const std::size_t len = idx.size();
    for (std::size_t i = 0; i < len; ++i) {
      own += space.dist(pairs[idx[i]].first, pairs[idx[i]].second);
      shifted += space.dist(pairs[idx[i]].first, pairs[idx[(i + 1) % len]].second);
    }
    if (own > shifted + 1e-9 && out.size() < limit) {
      MonotoneViolation v;
      for (auto i : idx) v.cycle.push_back(pairs[i]);
      v.excess = own - shifted;
      out.push_back(std::move(v));
    }
  };

  std::vector<std::size_t> idx(2);
  for (std::size_t i = 0; i < p && out.size() < limit; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      idx = {i, j};
      test(idx);
    }
  }
  if (max_cycle_len >= 3) {
    for (std::size_t i = 0; i < p && out.size() < limit; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        for (std::size_t k = i + 1; k < p; ++k) {
          if (k == j) continue;
          idx = {i, j, k};
          test(idx);
        }
      }
    }
  }
  if (max_cycle_len >= 4) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, p - 1);
    for (std::size_t len = 4; len <= max_cycle_len && len <= p; ++len) {
      for (std::size_t s = 0; s < samples && out.size() < limit; ++s) {
        idx.assign(len, 0);
        for (auto& v : idx) v = pick(rng);
        test(idx);
      }
    }
  }
  return out;
}

bool check_d2_monotone_order(const std::vector<std::pair<double, double>>& potential_pairs) {
  for (std::size_t i = 0; i < potential_pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < potential_pairs.size(); ++j) {
      const auto [x0, y0] = potential_pairs[i];
      const auto [x1, y1] = potential_pairs[j];
      if ((y1 - y0) * (x1 - x0) < -1e-12) return false;
    }
  }
  return true;
}

bool check_d2_monotone_order(const std::vector<std::pair<PointIndex, PointIndex>>& pairs,
                             const std::vector<double>& potential) {
  std::vector<std::pair<double, double>> values;
  values.reserve(pairs.size());
  for (auto [x, y] : pairs) values.emplace_back(potential[x], potential[y]);
  return check_d2_monotone_order(values);
}

std::vector<std::pair<PointIndex, PointIndex>> plan_support(const TransportPlan& plan) {
  std::vector<std::pair<PointIndex, PointIndex>> out;
  for (const auto& e : plan.entries) out.emplace_back(e.x, e.y);
  return out;
}

}  // namespace mongerays
