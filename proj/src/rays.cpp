#include "mongerays/rays.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

std::vector<PointIndex> flagged(const std::vector<char>& flags) {
  std::vector<PointIndex> out;
  for (PointIndex x = 0; x < flags.size(); ++x) {
    if (flags[x]) out.push_back(x);
  }
  return out;
}

// First (z, w) in lexicographic order among `partners` (excluding x) with (z,w) not in R.
std::optional<std::pair<PointIndex, PointIndex>> find_branch(
    const MetricMeasureSpace& space, const GammaSet& gamma, PointIndex x,
    const std::vector<PointIndex>& partners) {
  for (std::size_t i = 0; i < partners.size(); ++i) {
    if (partners[i] == x) continue;
    for (std::size_t j = i + 1; j < partners.size(); ++j) {
      if (partners[j] == x) continue;
      if (!in_r(space, gamma, partners[i], partners[j])) {
        return std::make_pair(partners[i], partners[j]);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

bool in_r(const MetricMeasureSpace& space, const GammaSet& gamma, PointIndex z, PointIndex w) {
  if (z == w) return true;
  const double d = space.dist(z, w);
  if (!std::isfinite(d)) return false;
  const auto& phi = gamma.potential();
  return std::abs(phi[z] - phi[w]) >= d - gamma.tol();
}

GammaStructure transport_sets(const GammaSet& gamma) {
  const std::size_t n = gamma.points();
  GammaStructure s;
  s.gamma = gamma;
  s.in_te.assign(n, 0);
  std::vector<char> has_out(n, 0), has_in(n, 0);
  for (PointIndex x = 0; x < n; ++x) {
    for (PointIndex y : gamma.image(x)) {
      if (x == y) continue;
      has_out[x] = 1;
      has_in[y] = 1;
    }
  }
  for (PointIndex x = 0; x < n; ++x) {
    s.in_te[x] = has_out[x] || has_in[x];
    if (!has_in[x]) s.a.push_back(x);
    if (!has_out[x]) s.b.push_back(x);
  }
  s.te = flagged(s.in_te);
  s.in_aplus.assign(n, 0);
  s.in_aminus.assign(n, 0);
  s.in_t = s.in_te;
  s.t = s.te;
  return s;
}

void detect_branching(const MetricMeasureSpace& space, GammaStructure& s) {
  const GammaSet& gamma = s.gamma;
  s.witnesses.clear();
  for (PointIndex x : s.te) {
    if (auto hit = find_branch(space, gamma, x, gamma.image(x))) {
      s.in_aplus[x] = 1;
      s.witnesses.push_back({x, hit->first, hit->second, BranchDirection::Forward,
                             shortest_path(space, x, hit->first).nodes,
                             shortest_path(space, x, hit->second).nodes});
    }
    if (auto hit = find_branch(space, gamma, x, gamma.preimage(x))) {
      s.in_aminus[x] = 1;
      s.witnesses.push_back({x, hit->first, hit->second, BranchDirection::Backward,
                             shortest_path(space, hit->first, x).nodes,
                             shortest_path(space, hit->second, x).nodes});
    }
  }
  s.aplus = flagged(s.in_aplus);
  s.aminus = flagged(s.in_aminus);
  for (PointIndex x = 0; x < s.in_te.size(); ++x) {
    s.in_t[x] = s.in_te[x] && !s.in_aplus[x] && !s.in_aminus[x];
  }
  s.t = flagged(s.in_t);
}

std::optional<PointIndex> RayDecomposition::ray_point(std::size_t cls, double t, double tol) const {
  const Ray& ray = rays.at(cls);
  for (std::size_t i = 0; i < ray.t.size(); ++i) {
    if (std::abs(ray.t[i] - t) <= tol) return ray.nodes[i];
  }
  return std::nullopt;
}

RayDecomposition build_equivalence(const MetricMeasureSpace& space,
                                   const GammaStructure& structure) {
  const std::size_t n = space.size();
  const GammaSet& gamma = structure.gamma;
  const auto& in_t = structure.in_t;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (PointIndex x : structure.t) {
    for (PointIndex y : gamma.image(x)) {
      if (in_t[y]) {
        const std::size_t a = find(x), b = find(y);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  RayDecomposition dec;
  dec.class_of.assign(n, kNoClass);
  for (PointIndex x : structure.t) {
    const std::size_t root = find(x);
    if (dec.class_of[root] == kNoClass) {
      dec.class_of[root] = dec.classes.size();
      dec.classes.emplace_back();
    }
    dec.class_of[x] = dec.class_of[root];
    dec.classes[dec.class_of[x]].push_back(x);
  }

  for (const auto& cls : dec.classes) {
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (std::size_t j = i + 1; j < cls.size(); ++j) {
        if (in_r(space, gamma, cls[i], cls[j])) continue;
        // BFS from cls[i] inside the class; the first node on the path not R-related to
        // cls[i] closes the offending triple.
        const PointIndex from = cls[i], to = cls[j];
        std::vector<PointIndex> prev(n, n);
        std::queue<PointIndex> queue;
        queue.push(from);
        prev[from] = from;
        while (!queue.empty() && prev[to] == n) {
          const PointIndex x = queue.front();
          queue.pop();
          auto visit = [&](PointIndex y) {
            if (in_t[y] && prev[y] == n) {
              prev[y] = x;
              queue.push(y);
            }
          };
          for (PointIndex y : gamma.image(x)) visit(y);
          for (PointIndex y : gamma.preimage(x)) visit(y);
        }
        std::vector<PointIndex> path{to};
        while (path.back() != from) path.push_back(prev[path.back()]);
        std::reverse(path.begin(), path.end());
        std::size_t k = 1;
        while (k < path.size() && in_r(space, gamma, from, path[k])) ++k;
        throw Error(ErrorKind::TransitivityFailure,
                    "(" + space.id(from) + "," + space.id(path[k - 1]) + ") and (" +
                        space.id(path[k - 1]) + "," + space.id(path[k]) + ") in R but (" +
                        space.id(from) + "," + space.id(path[k]) + ") is not");
      }
    }
  }
  return dec;
}

void cross_section(RayDecomposition& dec, const std::vector<double>& potential) {
  dec.representative.clear();
  dec.section.resize(dec.class_of.size());
  std::iota(dec.section.begin(), dec.section.end(), 0);
  for (const auto& cls : dec.classes) {
    std::vector<PointIndex> order = cls;
    std::sort(order.begin(), order.end(), [&](PointIndex l, PointIndex r) {
      return potential[l] != potential[r] ? potential[l] < potential[r] : l < r;
    });
    const std::size_t k = order.size();
    const PointIndex rep = k % 2 == 1 ? order[k / 2] : std::min(order[k / 2 - 1], order[k / 2]);
    dec.representative.push_back(rep);
    for (PointIndex x : cls) dec.section[x] = rep;
  }
}

void ray_map(const MetricMeasureSpace& space, RayDecomposition& dec,
             const std::vector<double>& potential, double tol) {
  dec.rays.clear();
  dec.coordinate.assign(dec.class_of.size(), 0.0);
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    Ray ray;
    ray.representative = dec.representative.at(c);
    ray.nodes = dec.classes[c];
    std::sort(ray.nodes.begin(), ray.nodes.end(), [&](PointIndex l, PointIndex r) {
      return potential[l] != potential[r] ? potential[l] > potential[r] : l < r;
    });
    const double rep_phi = potential[ray.representative];
    for (PointIndex x : ray.nodes) {
      const double d = space.dist(x, ray.representative);
      ray.t.push_back(potential[x] > rep_phi ? -d : d);
      dec.coordinate[x] = ray.t.back();
    }
    for (std::size_t i = 0; i + 1 < ray.nodes.size(); ++i) {
      const PointIndex p = ray.nodes[i], q = ray.nodes[i + 1];
      const double dphi = potential[p] - potential[q];
      const double dt = ray.t[i + 1] - ray.t[i];
      const double d = space.dist(p, q);
      if (!(dphi > 0.0) || std::abs(dphi - dt) > tol || std::abs(dt - d) > tol) {
        throw Error(ErrorKind::NotAChain,
                    "consecutive ray nodes " + space.id(p) + "," + space.id(q) +
                        ": dphi=" + std::to_string(dphi) + " dt=" + std::to_string(dt) +
                        " dist=" + std::to_string(d));
      }
    }
    dec.rays.push_back(std::move(ray));
  }
}

Decomposition decompose(const MetricMeasureSpace& space, const std::vector<double>& potential,
                        double eps_gamma) {
  const GammaSet gamma = geodesic_closure(space, build_gamma(space, potential, eps_gamma));
  Decomposition out;
  out.structure = transport_sets(gamma);
  detect_branching(space, out.structure);
  out.rays = build_equivalence(space, out.structure);
  cross_section(out.rays, potential);
  ray_map(space, out.rays, potential, eps_gamma + space.geo_tol());
  return out;
}

}  // namespace mongerays
