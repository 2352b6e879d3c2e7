#include "mongerays/mmspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void index_ids(const std::vector<std::string>& ids,
               std::unordered_map<std::string, PointIndex>& index) {
  index.clear();
  for (PointIndex i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorKind::InputError, "duplicate point id '" + ids[i] + "'");
    }
  }
}

void check_common(const std::vector<std::string>& ids, const std::vector<double>& weights) {
  if (ids.empty()) throw Error(ErrorKind::InputError, "space has no points");
  if (ids.size() > kMaxDensePoints) {
    throw Error(ErrorKind::InputError, "more than " + std::to_string(kMaxDensePoints) +
                                           " points exceeds dense storage limit");
  }
  if (weights.size() != ids.size()) {
    throw Error(ErrorKind::InputError, "weights length does not match points");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InputError, "weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::ZeroMeasure, "total reference weight is zero");
}

void validate_metric(const std::vector<std::string>& ids, const std::vector<double>& d,
                     double geo_tol) {
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i * n + i] != 0.0) {
      throw Error(ErrorKind::InputError, "dist(" + ids[i] + "," + ids[i] + ") is not zero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = d[i * n + j];
      const double b = d[j * n + i];
      if (std::isnan(a) || std::isnan(b) || a < 0.0 || b < 0.0) {
        throw Error(ErrorKind::InputError, "distances must be nonnegative numbers");
      }
      if (a == 0.0) {
        throw Error(ErrorKind::InputError,
                    "distinct points " + ids[i] + "," + ids[j] + " at distance zero");
      }
      const bool both_inf = std::isinf(a) && std::isinf(b);
      if (!both_inf && std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) {
        throw Error(ErrorKind::AsymmetricDistance, "dist(" + ids[i] + "," + ids[j] +
                                                       ") != dist(" + ids[j] + "," + ids[i] + ")");
      }
    }
  }
  double worst = 0.0;
  std::size_t wi = 0, wj = 0, wk = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = &d[i * n];
    for (std::size_t k = 0; k < n; ++k) {
      const double dik = di[k];
      if (std::isinf(dik)) continue;
      const double* dk = &d[k * n];
      for (std::size_t j = 0; j < n; ++j) {
        const double excess = di[j] - (dik + dk[j]);
        if (excess > worst) {
          worst = excess;
          wi = i;
          wj = j;
          wk = k;
        }
      }
    }
  }
  if (worst > geo_tol) {
    std::ostringstream os;
    os << "worst triple (" << ids[wi] << "," << ids[wk] << "," << ids[wj] << "): dist("
       << ids[wi] << "," << ids[wj] << ") exceeds the two-step route by " << worst;
    throw Error(ErrorKind::TriangleViolation, os.str());
  }
}

double finite_diameter(const std::vector<double>& d) {
  double diam = 0.0;
  for (double v : d) {
    if (std::isfinite(v)) diam = std::max(diam, v);
  }
  return diam;
}

}  // namespace

std::optional<PointIndex> MetricMeasureSpace::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

MetricMeasureSpace build_space(std::vector<std::string> ids, std::vector<double> dist,
                               std::vector<double> weights, double geo_tol) {
  check_common(ids, weights);
  if (dist.size() != ids.size() * ids.size()) {
    throw Error(ErrorKind::InputError, "distance matrix is not n x n");
  }
  if (!(geo_tol >= 0.0)) throw Error(ErrorKind::InputError, "geo_tol must be nonnegative");
  validate_metric(ids, dist, geo_tol);

  MetricMeasureSpace space;
  index_ids(ids, space.index_);
  space.ids_ = std::move(ids);
  space.dist_ = std::move(dist);
  space.weights_ = std::move(weights);
  space.geo_tol_ = geo_tol;
  space.total_weight_ = std::accumulate(space.weights_.begin(), space.weights_.end(), 0.0);
  space.diameter_ = finite_diameter(space.dist_);
  return space;
}

MetricMeasureSpace build_space_from_graph(std::vector<std::string> ids,
                                          const std::vector<std::array<double, 3>>& edges,
                                          std::vector<double> weights, double geo_tol) {
  check_common(ids, weights);
  const std::size_t n = ids.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& e : edges) {
    const auto a = static_cast<std::size_t>(e[0]);
    const auto b = static_cast<std::size_t>(e[1]);
    if (a >= n || b >= n) throw Error(ErrorKind::InputError, "edge endpoint out of range");
    if (!(e[2] > 0.0) || !std::isfinite(e[2])) {
      throw Error(ErrorKind::InputError, "edge lengths must be positive and finite");
    }
    if (a == b) continue;
    adj[a].emplace_back(b, e[2]);
    adj[b].emplace_back(a, e[2]);
  }

  std::vector<double> dist(n * n, kInf);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    double* row = &dist[s * n];
    row[s] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > row[u]) continue;
      for (auto [v, w] : adj[u]) {
        if (du + w < row[v]) {
          row[v] = du + w;
          heap.emplace(row[v], v);
        }
      }
    }
  }
  // Symmetrize exactly; Dijkstra sums can differ in the last bit between directions.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(dist[i * n + j], dist[j * n + i]);
      dist[i * n + j] = dist[j * n + i] = v;
    }
  }

  MetricMeasureSpace space = build_space(std::move(ids), std::move(dist), std::move(weights),
                                         geo_tol);
  space.edges_ = edges;
  return space;
}

DiscreteGeodesic shortest_path(const MetricMeasureSpace& space, PointIndex x, PointIndex y) {
  if (x >= space.size() || y >= space.size()) {
    throw Error(ErrorKind::InputError, "shortest_path: point out of range");
  }
  DiscreteGeodesic path;
  if (x == y) {
    path.nodes = {x};
    path.params = {0.0};
    return path;
  }
  const double dxy = space.dist(x, y);
  if (std::isinf(dxy)) {
    throw Error(ErrorKind::Disconnected, space.id(x) + " and " + space.id(y) + " not connected");
  }
  const double tol = space.geo_tol();

  std::vector<std::pair<double, PointIndex>> between;
  for (PointIndex z = 0; z < space.size(); ++z) {
    if (z == x || z == y) continue;
    const double dxz = space.dist(x, z);
    if (dxz + space.dist(z, y) <= dxy + tol) between.emplace_back(dxz, z);
  }
  std::sort(between.begin(), between.end());

  std::vector<double> cumulative{0.0};
  path.nodes.push_back(x);
  PointIndex cur = x;
  std::size_t next = 0;
  while (next < between.size()) {
    const double cum = cumulative.back();
    const double d_cur_y = space.dist(cur, y);
    bool stepped = false;
    for (std::size_t k = next; k < between.size(); ++k) {
      const auto [dxw, w] = between[k];
      if (dxw <= space.dist(x, cur)) continue;
      const double step = space.dist(cur, w);
      if (std::abs(cum + step - dxw) > tol) continue;
      if (std::abs(step + space.dist(w, y) - d_cur_y) > tol) continue;
      path.nodes.push_back(w);
      cumulative.push_back(cum + step);
      cur = w;
      next = k + 1;
      stepped = true;
      break;
    }
    if (!stepped) break;
  }
  path.nodes.push_back(y);
  cumulative.push_back(cumulative.back() + space.dist(cur, y));

  path.length = cumulative.back();
  path.params.reserve(cumulative.size());
  for (double c : cumulative) path.params.push_back(c / path.length);
  path.params.back() = 1.0;
  return path;
}

double geodesic_defect(const MetricMeasureSpace& space, const DiscreteGeodesic& path) {
  double worst = 0.0;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < path.nodes.size(); ++j) {
      const double expect = (path.params[j] - path.params[i]) * path.length;
      worst = std::max(worst, std::abs(space.dist(path.nodes[i], path.nodes[j]) - expect));
    }
  }
  return worst;
}

ProbabilityMeasure make_measure(const MetricMeasureSpace& space, std::vector<double> mass) {
  if (mass.size() != space.size()) {
    throw Error(ErrorKind::InputError, "measure length does not match space");
  }
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::InputError, "measure masses must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::InputError, "measure total mass is " + std::to_string(total) +
                                           ", expected 1");
  }
  for (double& m : mass) m /= total;
  return ProbabilityMeasure{std::move(mass)};
}

ProbabilityMeasure reference_measure(const MetricMeasureSpace& space) {
  std::vector<double> mass(space.weights().begin(), space.weights().end());
  for (double& m : mass) m /= space.total_weight();
  return ProbabilityMeasure{std::move(mass)};
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "interval") return ModelKind::Interval;
  if (name == "circle") return ModelKind::Circle;
  if (name == "sphere2_sample") return ModelKind::Sphere2Sample;
  if (name == "euclidean_grid") return ModelKind::EuclideanGrid;
  if (name == "tripod") return ModelKind::Tripod;
  if (name == "binary_tree") return ModelKind::BinaryTree;
  return std::nullopt;
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Interval: return "interval";
    case ModelKind::Circle: return "circle";
    case ModelKind::Sphere2Sample: return "sphere2_sample";
    case ModelKind::EuclideanGrid: return "euclidean_grid";
    case ModelKind::Tripod: return "tripod";
    case ModelKind::BinaryTree: return "binary_tree";
  }
  return "unknown";
}

namespace {

std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

double max_nearest_neighbour(const std::vector<double>& d, std::size_t n) {
  double mesh = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, d[i * n + j]);
    }
    if (std::isfinite(best)) mesh = std::max(mesh, best);
  }
  return mesh;
}

ModelSpace interval_model(const ModelParams& p) {
  ModelSpace model;
  const std::size_t n = p.n;
  const double h = p.size / static_cast<double>(n - 1);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = p.size * static_cast<double>(i) / static_cast<double>(n - 1);
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(x[i] - x[j]);
  }
  for (double xi : x) model.coords.push_back({xi, 0.0, 0.0});
  model.space = build_space(numbered_ids(n), std::move(d), std::vector<double>(n, 1.0 / n));
  model.mesh = h;
  return model;
}

ModelSpace circle_model(const ModelParams& p) {
  ModelSpace model;
  const std::size_t n = p.n;
  const double step = p.size / static_cast<double>(n);
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      d[i * n + j] = static_cast<double>(std::min(k, n - k)) * step;
    }
    model.coords.push_back({2.0 * std::numbers::pi * static_cast<double>(i) / n, 0.0, 0.0});
  }
  model.space = build_space(numbered_ids(n), std::move(d), std::vector<double>(n, 1.0 / n));
  model.mesh = step;
  return model;
}

ModelSpace grid_model(const ModelParams& p) {
  ModelSpace model;
  const std::size_t side = p.n;
  const std::size_t n = side * side;
  const double h = p.size / static_cast<double>(side - 1);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      model.coords.push_back({static_cast<double>(c) * h, static_cast<double>(r) * h, 0.0});
    }
  }
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = std::hypot(model.coords[i][0] - model.coords[j][0],
                                model.coords[i][1] - model.coords[j][1]);
    }
  }
  model.space = build_space(numbered_ids(n), std::move(d), std::vector<double>(n, 1.0 / n));
  model.mesh = h;
  return model;
}

// Latitude-longitude sample: both poles plus (rings - 1) interior rings of `meridians`
// points each, so every meridian is an exact geodesic through sample points. Weights
// are the areas of the lat-long cells (polar caps for the poles).
ModelSpace sphere_model(const ModelParams& p) {
  ModelSpace model;
  const double target = static_cast<double>(p.n);
  const std::size_t rings = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(std::sqrt(target / 2.0))));
  const std::size_t meridians = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround((target - 2.0) / static_cast<double>(rings - 1))));
  const double dtheta = std::numbers::pi / static_cast<double>(rings);
  const double dlambda = 2.0 * std::numbers::pi / static_cast<double>(meridians);
  std::mt19937_64 rng(p.seed);
  const double offset =
      p.seed == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, dlambda)(rng);

  std::vector<double> weights;
  auto push = [&](double theta, double lambda, double area) {
    model.coords.push_back({std::sin(theta) * std::cos(lambda), std::sin(theta) * std::sin(lambda),
                            std::cos(theta)});
    model.polar.push_back(theta);
    weights.push_back(area);
  };
  const double cap = 2.0 * std::numbers::pi * (1.0 - std::cos(dtheta / 2.0));
  push(0.0, 0.0, cap);
  for (std::size_t i = 1; i < rings; ++i) {
    const double theta = static_cast<double>(i) * dtheta;
    const double band = 2.0 * std::numbers::pi *
                        (std::cos(theta - dtheta / 2.0) - std::cos(theta + dtheta / 2.0));
    for (std::size_t j = 0; j < meridians; ++j) {
      push(theta, offset + static_cast<double>(j) * dlambda, band / static_cast<double>(meridians));
    }
  }
  push(std::numbers::pi, 0.0, cap);
  model.polar.back() = std::numbers::pi;

  const std::size_t n = model.coords.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = model.coords[i];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = model.coords[j];
      const double cx = a[1] * b[2] - a[2] * b[1];
      const double cy = a[2] * b[0] - a[0] * b[2];
      const double cz = a[0] * b[1] - a[1] * b[0];
      const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      d[i * n + j] = i == j ? 0.0 : std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    }
  }
  // Exact along meridians: same-longitude pairs get the polar-angle difference.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool pole_i = i == 0 || i == n - 1;
      const bool pole_j = j == 0 || j == n - 1;
      const bool same_meridian =
          pole_i || pole_j || ((i - 1) % meridians == (j - 1) % meridians);
      if (i != j && same_meridian) d[i * n + j] = std::abs(model.polar[i] - model.polar[j]);
    }
  }
  model.mesh = max_nearest_neighbour(d, n);
  model.space = build_space(numbered_ids(n), std::move(d), std::move(weights));
  return model;
}

// Star with three legs of p.n nodes each; edge length p.size / p.n.
ModelSpace tripod_model(const ModelParams& p) {
  ModelSpace model;
  const double edge = p.size / static_cast<double>(p.n);
  std::vector<std::string> ids{"c"};
  std::vector<std::array<double, 3>> edges;
  for (const char* leg : {"u", "v", "w"}) {
    std::size_t prev = 0;
    for (std::size_t k = 1; k <= p.n; ++k) {
      ids.push_back(std::string(leg) + std::to_string(k));
      edges.push_back({static_cast<double>(prev), static_cast<double>(ids.size() - 1), edge});
      prev = ids.size() - 1;
    }
  }
  const std::size_t n = ids.size();
  model.space = build_space_from_graph(std::move(ids), edges, std::vector<double>(n, 1.0 / n));
  model.mesh = edge;
  return model;
}

// Complete binary tree with p.n levels and unit edges.
ModelSpace binary_tree_model(const ModelParams& p) {
  ModelSpace model;
  if (p.n > 12) throw Error(ErrorKind::BadResolution, "binary_tree supports at most 12 levels");
  const std::size_t n = (std::size_t{1} << p.n) - 1;
  std::vector<std::array<double, 3>> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.push_back({static_cast<double>((i - 1) / 2), static_cast<double>(i), 1.0});
  }
  model.space = build_space_from_graph(numbered_ids(n), edges, std::vector<double>(n, 1.0 / n));
  model.mesh = 1.0;
  return model;
}

}  // namespace

ModelSpace generate_model(ModelKind kind, const ModelParams& params) {
  if (params.n < 2) throw Error(ErrorKind::BadResolution, "resolution n must be at least 2");
  if (!(params.size > 0.0)) throw Error(ErrorKind::BadResolution, "size must be positive");
  ModelSpace model;
  switch (kind) {
    case ModelKind::Interval: model = interval_model(params); break;
    case ModelKind::Circle: model = circle_model(params); break;
    case ModelKind::Sphere2Sample: model = sphere_model(params); break;
    case ModelKind::EuclideanGrid: model = grid_model(params); break;
    case ModelKind::Tripod: model = tripod_model(params); break;
    case ModelKind::BinaryTree: model = binary_tree_model(params); break;
  }
  model.kind = kind;
  return model;
}

}  // namespace mongerays
