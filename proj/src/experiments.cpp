#include "mongerays/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

std::vector<PointIndex> subset(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<PointIndex> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[draw(rng, i, n - 1)]);
  all.resize(k);
  return all;
}

}  // namespace

MetricMeasureSpace tripod_fixture() {
  return build_space_from_graph({"u", "c", "v", "w"}, {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}},
                                {1.0, 1.0, 1.0, 1.0});
}

MetricMeasureSpace midpoint_interval(std::size_t n) {
  std::vector<std::string> ids;
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("p" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      dist[i * n + j] = std::abs(static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(n);
    }
  }
  return build_space(std::move(ids), std::move(dist), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Instance hemisphere_instance(std::size_t n, std::uint64_t seed) {
  Instance inst;
  inst.model = generate_model(ModelKind::Sphere2Sample, {n, 1.0, seed});
  const auto& space = inst.model.space;
  std::vector<double> a(space.size(), 0.0), b(space.size(), 0.0);
  const double equator = std::numbers::pi / 2.0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const double theta = inst.model.polar[x];
    const double c = std::cos(theta);
    if (theta < equator - 1e-12) a[x] = space.weight(x) * c;
    if (theta > equator + 1e-12) b[x] = -space.weight(x) * c;
  }
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  for (auto& v : a) v /= sa;
  for (auto& v : b) v /= sb;
  inst.mu0 = make_measure(space, std::move(a));
  inst.mu1 = make_measure(space, std::move(b));
  inst.label = "sphere2_sample n=" + std::to_string(n);
  return inst;
}

Instance random_instance(std::mt19937_64& rng, std::size_t max_n) {
  static constexpr ModelKind kinds[] = {ModelKind::Interval, ModelKind::EuclideanGrid,
                                        ModelKind::Circle};
  const ModelKind kind = kinds[rng() % 3];
  std::size_t n = 0;
  ModelParams params;
  if (kind == ModelKind::EuclideanGrid) {
    const auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(max_n)));
    params.n = draw(rng, 2, std::max<std::size_t>(2, side));
    n = params.n * params.n;
  } else {
    params.n = draw(rng, 3, max_n);
    n = params.n;
  }
  params.size = static_cast<double>(draw(rng, 1, 10));
  Instance inst;
  inst.model = generate_model(kind, params);
  const std::size_t k = draw(rng, 1, std::max<std::size_t>(1, std::min<std::size_t>(n / 2, 12)));
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (PointIndex x : subset(rng, n, k)) a[x] = 1.0 / static_cast<double>(k);
  for (PointIndex x : subset(rng, n, k)) b[x] = 1.0 / static_cast<double>(k);
  inst.mu0 = make_measure(inst.model.space, std::move(a));
  inst.mu1 = make_measure(inst.model.space, std::move(b));
  inst.label = std::string(to_string(kind)) + " n=" + std::to_string(n) + " k=" + std::to_string(k);
  return inst;
}

std::vector<PointIndex> parse_point_list(const MetricMeasureSpace& space,
                                         const std::vector<std::string>& ids) {
  std::vector<PointIndex> out;
  for (const auto& id : ids) {
    const auto x = space.index_of(id);
    if (!x) throw Error(ErrorKind::InputError, "unknown point id " + id);
    out.push_back(*x);
  }
  return out;
}

}  // namespace mongerays
