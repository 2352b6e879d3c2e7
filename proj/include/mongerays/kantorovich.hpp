#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mongerays/mmspace.hpp"

namespace mongerays {

struct PlanEntry {
  PointIndex x = 0;
  PointIndex y = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;  // sorted by (x, y), positive masses
  double cost = 0.0;
};

struct KantorovichSolution {
  TransportPlan plan;
  std::vector<double> potential;  // 1-Lipschitz Kantorovich potential, min = 0
  double value = 0.0;             // W1
  double dual_value = 0.0;        // sum phi dmu0 - sum phi dmu1
};

// Kantorovich problem for the distance cost. The plan comes from the network simplex on
// the bipartite support graph. The potential is fixed by the plan inside each connected
// component of its support; components are offset by the centre (mean over all root
// choices) of the difference constraints that keep the potential 1-Lipschitz, then
// extended to every point by phi(z) = min_y d(z,y) + phi(y) over the target support.
// Throws Infeasible and NumericFailure.
KantorovichSolution solve_w1(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                             const ProbabilityMeasure& mu1);

// Iterates phi(x) <- min_y (d(x,y) + phi(y)) to a fixpoint. Returns the number of sweeps
// that changed a value.
std::size_t tighten_potential(const MetricMeasureSpace& space, std::vector<double>& potential);

// Largest |phi(x) - phi(y)| - d(x,y) over all pairs (<= 0 for 1-Lipschitz).
double lipschitz_excess(const MetricMeasureSpace& space, const std::vector<double>& potential);

// Gamma := {(x,y) : phi(x) - phi(y) >= d(x,y) - tol}, diagonal included.
class GammaSet {
 public:
  GammaSet() = default;
  GammaSet(std::vector<std::vector<PointIndex>> forward, std::vector<double> potential,
           double tol);

  std::size_t points() const { return forward_.size(); }
  double tol() const { return tol_; }
  const std::vector<double>& potential() const { return potential_; }
  // Gamma(x), sorted.
  const std::vector<PointIndex>& image(PointIndex x) const { return forward_[x]; }
  // Gamma^{-1}(x), sorted.
  const std::vector<PointIndex>& preimage(PointIndex x) const { return backward_[x]; }
  bool contains(PointIndex x, PointIndex y) const;
  std::size_t size() const;
  std::vector<std::pair<PointIndex, PointIndex>> pairs() const;

 private:
  std::vector<std::vector<PointIndex>> forward_;
  std::vector<std::vector<PointIndex>> backward_;
  std::vector<double> potential_;
  double tol_ = 0.0;
};

// eps_gamma default: 1e-9 + geo_tol.
double default_eps_gamma(const MetricMeasureSpace& space);

GammaSet build_gamma(const MetricMeasureSpace& space, const KantorovichSolution& solution,
                     double eps_gamma);
GammaSet build_gamma(const MetricMeasureSpace& space, const std::vector<double>& potential,
                     double eps_gamma);

// Adds every ordered pair of nodes along shortest_path(x, y) for (x, y) in gamma.
// Throws ClosureInflation if an added pair misses the potential identity by more than
// tol + geo_tol.
GammaSet geodesic_closure(const MetricMeasureSpace& space, const GammaSet& gamma);

struct MonotoneViolation {
  std::vector<std::pair<PointIndex, PointIndex>> cycle;
  double excess = 0.0;  // sum d(x_i, y_i) - sum d(x_i, y_{i+1})
};

// Cycles over `pairs` where shifting targets lowers the total distance by more than 1e-9.
// Exhaustive for cycle lengths 2 and 3, `samples` random cycles per longer length.
// At most `limit` violations are returned.
std::vector<MonotoneViolation> check_d_monotone(
    const MetricMeasureSpace& space, const std::vector<std::pair<PointIndex, PointIndex>>& pairs,
    std::size_t max_cycle_len, std::uint64_t seed = 0, std::size_t samples = 20000,
    std::size_t limit = 64);

// (phi(y1) - phi(y0)) * (phi(x1) - phi(x0)) >= -1e-12 for all couples of pairs.
bool check_d2_monotone_order(const std::vector<std::pair<PointIndex, PointIndex>>& pairs,
                             const std::vector<double>& potential);
// Same certificate with explicit (phi(x), phi(y)) values per pair.
bool check_d2_monotone_order(const std::vector<std::pair<double, double>>& potential_pairs);

std::vector<std::pair<PointIndex, PointIndex>> plan_support(const TransportPlan& plan);

}  // namespace mongerays
