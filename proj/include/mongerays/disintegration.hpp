#pragma once

#include <vector>

#include "mongerays/kantorovich.hpp"
#include "mongerays/oned.hpp"
#include "mongerays/rays.hpp"

namespace mongerays {

struct EtaEntry {
  double s = 0.0;
  PointIndex x = 0;
  double t = 0.0;
  PointIndex y = 0;
  double mass = 0.0;  // normalized within the ray
};

struct RayProblem1D {
  std::size_t ray = 0;
  PointIndex rep = 0;
  std::vector<PointIndex> nodes;
  std::vector<double> ts;
  std::vector<double> m_y;     // conditional reference masses, sum 1
  std::vector<double> cell_lo;  // cell of node i is [ts[i] - cell_lo[i], ts[i] + cell_hi[i]]
  std::vector<double> cell_hi;
  std::vector<double> h;       // m_y / cell length
  double q_mass = 0.0;         // reference weight of the class
  double q_norm = 0.0;         // q_mass / sum of q_mass over rays
  bool degenerate = false;     // q_mass == 0

  Measure1D mu0_y;  // conditional marginals on ray coordinates, sum 1
  Measure1D mu1_y;
  std::vector<EtaEntry> eta_y;
  double q_mu0 = 0.0;  // plan mass carried by the ray
  double reassigned_mass = 0.0;

  double length() const { return ts.empty() ? 0.0 : ts.back() - ts.front(); }
  double cell(std::size_t i) const { return cell_lo[i] + cell_hi[i]; }
};

// Cells are midpoint cells; an end node mirrors its single neighbour gap, so equally
// spaced equal weights give a constant density. A single-node ray has a unit cell.
std::vector<RayProblem1D> disintegrate_reference(const MetricMeasureSpace& space,
                                                 const RayDecomposition& decomposition);

struct Restriction {
  std::vector<double> mu0;    // minus the mass fixed outside Te
  std::vector<double> mu1;
  std::vector<double> fixed;  // identity-transported mass per point outside Te
  double diagonal_mass = 0.0;
  TransportPlan plan;         // plan without the diagonal entries outside Te
};

// Throws LeakOutsideTe if plan mass leaves or enters a point outside Te, or an
// off-diagonal plan pair is not in Gamma.
Restriction restrict_to_transport_set(const MetricMeasureSpace& space,
                                      const ProbabilityMeasure& mu0, const ProbabilityMeasure& mu1,
                                      const TransportPlan& plan, const GammaStructure& structure);

struct PlanDisintegration {
  std::vector<PlanEntry> orphans;  // entries with no ray node between source and target
  double reassigned_mass = 0.0;    // plan mass with source in A+ u A-, attached to a ray
  double orphan_mass = 0.0;
  double off_ray_source_mass = 0.0;  // reassigned + orphan
};

// Groups plan mass by the ray of its source. A source in A+ u A- is attached to the
// ray of the nearest T node on its geodesic to the target and placed at the extended
// coordinate t(z) - d(x, z); off-ray targets sit at t(z) + d(z, y).
PlanDisintegration disintegrate_plan(const MetricMeasureSpace& space, const TransportPlan& plan,
                                     const GammaStructure& structure,
                                     const RayDecomposition& decomposition,
                                     std::vector<RayProblem1D>& rays);

// max over x in T of |sum_y q(y) m_y(x) - weight(x)|.
double reference_reassembly_error(const MetricMeasureSpace& space,
                                  const std::vector<RayProblem1D>& rays,
                                  const GammaStructure& structure);

// max entrywise |sum_y q_mu0(y) eta_y + orphans - plan|.
double plan_reassembly_error(const TransportPlan& plan, const std::vector<RayProblem1D>& rays,
                             const PlanDisintegration& split);

// max |first marginal of eta_y - mu0_y| over rays.
double eta_marginal_error(const std::vector<RayProblem1D>& rays);

// Piecewise-linear interpolation of h between nodes, constant beyond the end nodes.
double interpolate_h(const RayProblem1D& ray, double t);
// Exact integral of the interpolated density over [lo, hi].
double integrate_h(const RayProblem1D& ray, double lo, double hi);

}  // namespace mongerays
