#include "mongerays/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mongerays/error.hpp"

namespace mongerays {

std::vector<RayProblem1D> disintegrate_reference(const MetricMeasureSpace& space,
                                                 const RayDecomposition& decomposition) {
  std::vector<RayProblem1D> out;
  double q_total = 0.0;
  for (std::size_t c = 0; c < decomposition.rays.size(); ++c) {
    const Ray& ray = decomposition.rays[c];
    RayProblem1D p;
    p.ray = c;
    p.rep = ray.representative;
    p.nodes = ray.nodes;
    p.ts = ray.t;
    const std::size_t k = p.nodes.size();
    for (PointIndex x : p.nodes) p.q_mass += space.weight(x);
    p.degenerate = !(p.q_mass > 0.0);
    p.m_y.resize(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      p.m_y[i] = p.degenerate ? 0.0 : space.weight(p.nodes[i]) / p.q_mass;
    }
    p.cell_lo.resize(k);
    p.cell_hi.resize(k);
    if (k == 1) {
      p.cell_lo[0] = p.cell_hi[0] = 0.5;
    } else {
      for (std::size_t i = 0; i < k; ++i) {
        const double left = i > 0 ? p.ts[i] - p.ts[i - 1] : p.ts[1] - p.ts[0];
        const double right = i + 1 < k ? p.ts[i + 1] - p.ts[i] : p.ts[k - 1] - p.ts[k - 2];
        p.cell_lo[i] = left / 2.0;
        p.cell_hi[i] = right / 2.0;
      }
    }
    p.h.resize(k);
    for (std::size_t i = 0; i < k; ++i) p.h[i] = p.m_y[i] / p.cell(i);
    q_total += p.q_mass;
    out.push_back(std::move(p));
  }
  for (auto& p : out) p.q_norm = q_total > 0.0 ? p.q_mass / q_total : 0.0;
  return out;
}

Restriction restrict_to_transport_set(const MetricMeasureSpace& space,
                                      const ProbabilityMeasure& mu0, const ProbabilityMeasure& mu1,
                                      const TransportPlan& plan, const GammaStructure& structure) {
  const std::size_t n = space.size();
  Restriction r;
  r.mu0 = mu0.mass;
  r.mu1 = mu1.mass;
  r.fixed.assign(n, 0.0);
  for (PointIndex x = 0; x < n; ++x) {
    if (structure.in_te[x]) continue;
    if (std::abs(mu0[x] - mu1[x]) > 1e-12) {
      throw Error(ErrorKind::LeakOutsideTe,
                  "mass changes at " + space.id(x) + " which lies outside the transport set");
    }
    r.fixed[x] = std::min(mu0[x], mu1[x]);
    r.mu0[x] -= r.fixed[x];
    r.mu1[x] -= r.fixed[x];
    r.diagonal_mass += r.fixed[x];
  }
  for (const auto& e : plan.entries) {
    if (e.x == e.y && !structure.in_te[e.x]) continue;
    if (e.x != e.y && !structure.gamma.contains(e.x, e.y)) {
      throw Error(ErrorKind::LeakOutsideTe, "plan moves mass along (" + space.id(e.x) + "," +
                                                space.id(e.y) + ") which is not in Gamma");
    }
    r.plan.entries.push_back(e);
    r.plan.cost += e.mass * space.dist(e.x, e.y);
  }
  return r;
}

PlanDisintegration disintegrate_plan(const MetricMeasureSpace& space, const TransportPlan& plan,
                                     const GammaStructure& structure,
                                     const RayDecomposition& dec,
                                     std::vector<RayProblem1D>& rays) {
  PlanDisintegration out;
  std::vector<std::vector<EtaEntry>> raw(rays.size());
  std::vector<double> reassigned(rays.size(), 0.0);

  for (const auto& e : plan.entries) {
    std::size_t cls = kNoClass;
    PointIndex anchor = e.x;
    if (structure.in_t[e.x]) {
      cls = dec.class_of[e.x];
    } else {
      for (PointIndex z : shortest_path(space, e.x, e.y).nodes) {
        if (structure.in_t[z]) {
          cls = dec.class_of[z];
          anchor = z;
          break;
        }
      }
    }
    if (cls == kNoClass) {
      out.orphans.push_back(e);
      out.orphan_mass += e.mass;
      continue;
    }
    const double t_anchor = dec.coordinate[anchor];
    const double s = t_anchor - space.dist(e.x, anchor);
    const double t = dec.class_of[e.y] == cls ? dec.coordinate[e.y]
                                              : t_anchor + space.dist(anchor, e.y);
    raw[cls].push_back({s, e.x, t, e.y, e.mass});
    if (anchor != e.x) {
      reassigned[cls] += e.mass;
      out.reassigned_mass += e.mass;
    }
  }
  out.off_ray_source_mass = out.reassigned_mass + out.orphan_mass;

  for (std::size_t c = 0; c < rays.size(); ++c) {
    RayProblem1D& ray = rays[c];
    ray.q_mu0 = 0.0;
    for (const auto& en : raw[c]) ray.q_mu0 += en.mass;
    ray.reassigned_mass = reassigned[c];
    ray.eta_y.clear();
    Measure1D mu0_atoms, mu1_atoms;
    for (auto en : raw[c]) {
      en.mass /= ray.q_mu0;
      ray.eta_y.push_back(en);
      mu0_atoms.push_back({en.s, en.x, en.mass});
      mu1_atoms.push_back({en.t, en.y, en.mass});
    }
    ray.mu0_y = canonical(std::move(mu0_atoms));
    ray.mu1_y = canonical(std::move(mu1_atoms));
  }
  return out;
}

double reference_reassembly_error(const MetricMeasureSpace& space,
                                  const std::vector<RayProblem1D>& rays,
                                  const GammaStructure& structure) {
  std::vector<double> rebuilt(space.size(), 0.0);
  for (const auto& ray : rays) {
    for (std::size_t i = 0; i < ray.nodes.size(); ++i) rebuilt[ray.nodes[i]] += ray.q_mass * ray.m_y[i];
  }
  double worst = 0.0;
  for (PointIndex x : structure.t) worst = std::max(worst, std::abs(rebuilt[x] - space.weight(x)));
  return worst;
}

double plan_reassembly_error(const TransportPlan& plan, const std::vector<RayProblem1D>& rays,
                             const PlanDisintegration& split) {
  std::map<std::pair<PointIndex, PointIndex>, double> rebuilt;
  for (const auto& ray : rays) {
    for (const auto& en : ray.eta_y) rebuilt[{en.x, en.y}] += ray.q_mu0 * en.mass;
  }
  for (const auto& e : split.orphans) rebuilt[{e.x, e.y}] += e.mass;
  double worst = 0.0;
  for (const auto& e : plan.entries) {
    auto it = rebuilt.find({e.x, e.y});
    const double got = it == rebuilt.end() ? 0.0 : it->second;
    worst = std::max(worst, std::abs(got - e.mass));
    if (it != rebuilt.end()) rebuilt.erase(it);
  }
  for (const auto& [key, m] : rebuilt) worst = std::max(worst, std::abs(m));
  return worst;
}

double eta_marginal_error(const std::vector<RayProblem1D>& rays) {
  double worst = 0.0;
  for (const auto& ray : rays) {
    Measure1D first;
    for (const auto& en : ray.eta_y) first.push_back({en.s, en.x, en.mass});
    first = canonical(std::move(first));
    if (first.size() != ray.mu0_y.size()) return 1.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
      worst = std::max(worst, std::abs(first[i].mass - ray.mu0_y[i].mass));
    }
  }
  return worst;
}

double interpolate_h(const RayProblem1D& ray, double t) {
  const auto& ts = ray.ts;
  if (t <= ts.front()) return ray.h.front();
  if (t >= ts.back()) return ray.h.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return (1.0 - w) * ray.h[i - 1] + w * ray.h[i];
}

double integrate_h(const RayProblem1D& ray, double lo, double hi) {
  if (hi < lo) std::swap(lo, hi);
  std::vector<double> breaks{lo};
  for (double t : ray.ts) {
    if (t > lo && t < hi) breaks.push_back(t);
  }
  breaks.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += 0.5 * (breaks[i + 1] - breaks[i]) *
             (interpolate_h(ray, breaks[i]) + interpolate_h(ray, breaks[i + 1]));
  }
  return total;
}

}  // namespace mongerays
