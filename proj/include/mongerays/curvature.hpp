#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mongerays/disintegration.hpp"
#include "mongerays/rays.hpp"

namespace mongerays {

struct CurvatureParams {
  double K = 0.0;
  double N = 1.0;
};

// sin((1-t) theta k) / sin(theta k) with k = sqrt(K/(N-1)); (1-t) when K = 0 or theta = 0,
// the sinh ratio when K < 0, and 1 when N = 1. Throws DomainError when theta k >= pi.
double distortion_coefficient(double K, double N, double t, double theta);

struct EvolutionSetup {
  std::vector<PointIndex> c;           // C, sorted
  double delta = 0.0;
  double level_tol = 0.0;
  std::vector<PointIndex> level_set;   // |phi - delta| <= level_tol
  std::vector<PointIndex> c_delta;     // sorted
  std::vector<PointIndex> target;      // per c_delta entry, a node of the level set
  std::vector<double> target_coord;    // per c_delta entry, ray coordinate of phi = delta
  std::vector<PointIndex> no_partner;  // points of C without a Gamma partner on the level set
  bool d2_order = false;               // d^2-order certificate of the target graph
};

// Largest gap between consecutive nodes over all rays.
double max_ray_spacing(const RayDecomposition& decomposition);

// C must lie in T (InputError otherwise). level_tol <= 0 selects max_ray_spacing.
// Throws EmptyLevelSet.
EvolutionSetup build_evolution(const MetricMeasureSpace& space, const Decomposition& decomposition,
                               std::vector<PointIndex> c, double delta, double level_tol = 0.0);

struct EvolvedSet {
  std::vector<PointIndex> nodes;   // snapped images, sorted, duplicates collapsed
  std::vector<PointIndex> origin;  // evaluated points of A, in input order
  std::vector<double> coord;       // continuous image coordinate per origin
};

// Points of A outside C_delta are ignored.
EvolvedSet evolve(const EvolutionSetup& setup, const RayDecomposition& decomposition,
                  const std::vector<PointIndex>& a, double t);

struct McpRow {
  double t = 0.0;
  double mass_a = 0.0;
  double mass_at = 0.0;
  double coefficient = 0.0;  // inf over C_delta of the distortion coefficient to the power N-1
  double bound = 0.0;        // (1-t) * coefficient * mass_a
  double residual = 0.0;     // mass_at - bound
};

// Masses use the interpolated ray densities weighted by the class reference mass; the
// image of the cell of x under the contraction replaces the snapped node.
std::vector<McpRow> mcp_check(const CurvatureParams& params, const EvolutionSetup& setup,
                              const RayDecomposition& decomposition,
                              const std::vector<RayProblem1D>& rays,
                              const std::vector<PointIndex>& a, const std::vector<double>& ts);

struct DensityRow {
  double sigma_minus = 0.0, s = 0.0, tau = 0.0, sigma_plus = 0.0;
  double ratio = 0.0;  // h(tau) / h(s)
  double lower = 0.0;
  double upper = 0.0;
  double violation = 0.0;  // max(lower - ratio, ratio - upper), positive when violated
  bool endpoint = false;   // sigma_minus or sigma_plus is an end node of the ray
};

struct DensityReport {
  std::vector<DensityRow> rows;
  std::size_t zero_density = 0;  // quadruples skipped because h(s) = 0
};

// All quadruples of ray nodes sigma_- < s <= tau < sigma_+ when there are at most
// `samples`, a seeded random selection otherwise.
DensityReport density_bound_check(const RayProblem1D& ray, const CurvatureParams& params,
                                  std::size_t samples = 20000, std::uint64_t seed = 0);

}  // namespace mongerays
