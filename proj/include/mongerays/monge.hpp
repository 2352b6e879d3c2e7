#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mongerays/disintegration.hpp"
#include "mongerays/kantorovich.hpp"
#include "mongerays/oned.hpp"
#include "mongerays/rays.hpp"

namespace mongerays {

struct MongeConfig {
  std::optional<double> eps_gamma;  // default_eps_gamma(space) when unset
  std::optional<double> max_gap;    // GapExceeded when |gap| is larger
  std::size_t threads = 0;          // per-ray fan-out, 0 = hardware concurrency
};

struct MongeDiagnostics {
  double reassigned_mass = 0.0;
  double orphan_mass = 0.0;
  double split_mass = 0.0;
  double branch_mu0_mass = 0.0;       // mu0 mass sitting on A+ u A-
  double branch_weight_fraction = 0.0;  // reference weight of A+ u A- over that of Te
  double diagonal_mass = 0.0;         // identity mass outside Te
  double pushforward_error = 0.0;
  double additivity_residual = 0.0;
  double gamma_excess = 0.0;          // max d(x,y) - (phi(x) - phi(y)) over assignment pairs
  double diameter = 0.0;
  std::size_t n_rays = 0;
  std::size_t n_aplus = 0;
  std::size_t n_aminus = 0;
};

struct RayCost {
  std::size_t ray = 0;
  PointIndex representative = 0;
  double length = 0.0;
  std::size_t n_nodes = 0;
  double cost_1d = 0.0;
  double q_mu0 = 0.0;
};

struct VirtualAtom {
  PointIndex x = 0;
  std::size_t index = 0;  // sub-atom number within x
  PointIndex y = 0;
  double mass = 0.0;
};

struct MongeSolution {
  std::vector<PlanEntry> assignment;  // sorted by (x, y)
  bool is_map = false;                // one target per source
  double cost = 0.0;
  double w1 = 0.0;
  double gap = 0.0;                   // signed cost - W1
  MongeDiagnostics diagnostics;
  std::vector<RayCost> ray_costs;
  std::optional<std::vector<VirtualAtom>> virtual_map;
};

// Every intermediate stage, kept for reporting and tests.
struct MongePipeline {
  KantorovichSolution kantorovich;
  Decomposition decomposition;
  Restriction restriction;
  std::vector<RayProblem1D> rays;
  PlanDisintegration plan_split;
  std::vector<Coupling1D> couplings;
  MongeSolution solution;
};

MongePipeline run_monge_pipeline(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                                 const ProbabilityMeasure& mu1, const MongeConfig& config = {});

MongeSolution solve_monge(const MetricMeasureSpace& space, const ProbabilityMeasure& mu0,
                          const ProbabilityMeasure& mu1, const MongeConfig& config = {});

// Equal-mass sub-atoms making the assignment a map. Needs every positive mu0 atom to carry
// the same mass and every split fraction to be a multiple of 1/k for some k <= cap.
std::optional<std::vector<VirtualAtom>> virtual_map(const std::vector<PlanEntry>& assignment,
                                                    const ProbabilityMeasure& mu0,
                                                    std::size_t cap = 64);

struct DualityReport {
  double w1 = 0.0;
  double dual_value = 0.0;
  double cost = 0.0;
  double gap = 0.0;
  double ray_cost_sum = 0.0;  // sum of q_mu0 * cost_1d
  double additivity_residual = 0.0;
  double reassigned_mass = 0.0;
  double branch_mu0_mass = 0.0;
  double bound = 0.0;         // reassigned mass times diameter
  bool within_bound = false;  // |gap| <= bound + 1e-9
  std::vector<RayCost> rays;
};

DualityReport duality_report(const MongeSolution& solution, const KantorovichSolution& kantorovich);

}  // namespace mongerays
