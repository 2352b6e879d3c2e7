#include "mongerays/oned.hpp"

#include <algorithm>
#include <cmath>

namespace mongerays {

double cdf(const Measure1D& measure, double s) {
  double below = 0.0;
  for (const auto& a : measure) {
    if (a.t < s) below += a.mass;
  }
  return below;
}

Measure1D canonical(Measure1D measure) {
  std::sort(measure.begin(), measure.end(), [](const Atom1D& l, const Atom1D& r) {
    return l.t != r.t ? l.t < r.t : l.point < r.point;
  });
  Measure1D out;
  for (const auto& a : measure) {
    if (!(a.mass > 0.0)) continue;
    if (!out.empty() && out.back().t == a.t && out.back().point == a.point) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

Coupling1D monotone_rearrangement(const Measure1D& mu0, const Measure1D& mu1) {
  const Measure1D src = canonical(mu0);
  const Measure1D dst = canonical(mu1);
  Coupling1D out;
  double total = 0.0;
  for (const auto& a : src) total += a.mass;
  const double eps = 1e-14 * std::max(total, 1e-300);

  std::size_t i = 0, j = 0;
  double rem_src = src.empty() ? 0.0 : src[0].mass;
  double rem_dst = dst.empty() ? 0.0 : dst[0].mass;
  std::vector<std::size_t> pieces_per_source(src.size(), 0);
  while (i < src.size() && j < dst.size()) {
    const double m = std::min(rem_src, rem_dst);
    if (m > 0.0) {
      out.pieces.push_back({src[i].t, src[i].point, dst[j].t, dst[j].point, m});
      ++pieces_per_source[i];
    }
    rem_src -= m;
    rem_dst -= m;
    const bool src_done = rem_src <= eps;
    const bool dst_done = rem_dst <= eps;
    if (src_done && ++i < src.size()) rem_src = src[i].mass;
    if (dst_done && ++j < dst.size()) rem_dst = dst[j].mass;
  }

  bool splits = false;
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (pieces_per_source[k] > 1) {
      splits = true;
      out.split_mass += src[k].mass;
    }
  }
  if (!splits) out.map_form = out.pieces;
  out.cost = cost_1d(out);
  return out;
}

double cost_1d(const Coupling1D& coupling) {
  double cost = 0.0;
  for (const auto& p : coupling.pieces) cost += p.mass * std::abs(p.t - p.s);
  return cost;
}

bool is_monotone(const Coupling1D& coupling) {
  const auto& ps = coupling.pieces;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    for (std::size_t b = 0; b < ps.size(); ++b) {
      if (ps[a].s < ps[b].s && ps[a].t > ps[b].t) return false;
    }
  }
  return true;
}

}  // namespace mongerays
