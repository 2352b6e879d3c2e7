#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mongerays/kantorovich.hpp"
#include "mongerays/mmspace.hpp"

namespace mongerays {

inline constexpr std::size_t kNoClass = static_cast<std::size_t>(-1);

enum class BranchDirection { Forward, Backward };

// x carries two Gamma partners (Gamma^{-1} partners when Backward) z, w with (z,w) not in R.
struct BranchWitness {
  PointIndex x = 0;
  PointIndex z = 0;
  PointIndex w = 0;
  BranchDirection direction = BranchDirection::Forward;
  std::vector<PointIndex> chain_to_z;
  std::vector<PointIndex> chain_to_w;
};

struct GammaStructure {
  GammaSet gamma;
  std::vector<PointIndex> te;  // transport set with end points
  std::vector<PointIndex> a;   // initial points
  std::vector<PointIndex> b;   // final points
  std::vector<PointIndex> aplus;
  std::vector<PointIndex> aminus;
  std::vector<PointIndex> t;   // Te minus (A+ u A-)
  std::vector<BranchWitness> witnesses;

  std::vector<char> in_te, in_t, in_aplus, in_aminus;
};

// R membership by the Gamma band: |phi(z) - phi(w)| >= d(z,w) - tol.
bool in_r(const MetricMeasureSpace& space, const GammaSet& gamma, PointIndex z, PointIndex w);

// Te, a, b from the positive-distance pairs of gamma. A+/A- left empty, T = Te.
GammaStructure transport_sets(const GammaSet& gamma);

// Populates A+, A-, witnesses and T.
void detect_branching(const MetricMeasureSpace& space, GammaStructure& structure);

struct Ray {
  PointIndex representative = 0;
  std::vector<PointIndex> nodes;  // decreasing potential
  std::vector<double> t;          // signed distance from the representative
};

struct RayDecomposition {
  std::vector<std::vector<PointIndex>> classes;  // sorted members, ordered by first member
  std::vector<std::size_t> class_of;             // kNoClass outside T
  std::vector<PointIndex> representative;        // per class (the cross-section S)
  std::vector<PointIndex> section;               // f: point -> representative; self outside T
  std::vector<Ray> rays;                         // per class, filled by ray_map
  std::vector<double> coordinate;                // t-coordinate per point in T

  // g(class, t): the ray node at coordinate t (within tol), if any.
  std::optional<PointIndex> ray_point(std::size_t cls, double t, double tol) const;
};

// Classes are the connected components of R restricted to T. Throws TransitivityFailure
// with an offending triple.
RayDecomposition build_equivalence(const MetricMeasureSpace& space,
                                   const GammaStructure& structure);

// Representative per class: median potential, smaller id among the two middle nodes.
void cross_section(RayDecomposition& decomposition, const std::vector<double>& potential);

// Orders each class by decreasing potential and assigns signed coordinates. Throws
// NotAChain when consecutive nodes do not satisfy |d phi| = d t = distance within tol.
void ray_map(const MetricMeasureSpace& space, RayDecomposition& decomposition,
             const std::vector<double>& potential, double tol);

struct Decomposition {
  GammaStructure structure;
  RayDecomposition rays;
};

// build_gamma -> geodesic_closure -> transport_sets -> detect_branching ->
// build_equivalence -> cross_section -> ray_map.
Decomposition decompose(const MetricMeasureSpace& space, const std::vector<double>& potential,
                        double eps_gamma);

}  // namespace mongerays
