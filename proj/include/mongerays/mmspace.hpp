#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mongerays {

using PointIndex = std::size_t;

inline constexpr double kExactTol = 1e-9;
// Dense storage guard; larger inputs are rejected.
inline constexpr std::size_t kMaxDensePoints = 5000;

// Finite metric measure space (X, d, m). Immutable after build.
class MetricMeasureSpace {
 public:
  MetricMeasureSpace() = default;

  std::size_t size() const { return ids_.size(); }
  double dist(PointIndex x, PointIndex y) const { return dist_[x * ids_.size() + y]; }
  std::span<const double> weights() const { return weights_; }
  double weight(PointIndex x) const { return weights_[x]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(PointIndex x) const { return ids_[x]; }
  std::optional<PointIndex> index_of(std::string_view id) const;
  double geo_tol() const { return geo_tol_; }
  double total_weight() const { return total_weight_; }
  double diameter() const { return diameter_; }
  // Graph adjacency when built from edges; empty in matrix mode.
  const std::vector<std::array<double, 3>>& edges() const { return edges_; }
  bool graph_mode() const { return !edges_.empty(); }

 private:
  friend MetricMeasureSpace build_space(std::vector<std::string>, std::vector<double>,
                                        std::vector<double>, double);
  friend MetricMeasureSpace build_space_from_graph(std::vector<std::string>,
                                                   const std::vector<std::array<double, 3>>&,
                                                   std::vector<double>, double);

  std::vector<std::string> ids_;
  std::unordered_map<std::string, PointIndex> index_;
  std::vector<double> dist_;
  std::vector<double> weights_;
  std::vector<std::array<double, 3>> edges_;
  double geo_tol_ = kExactTol;
  double total_weight_ = 0.0;
  double diameter_ = 0.0;
};

// Validates metric axioms; throws AsymmetricDistance, TriangleViolation, ZeroMeasure.
// `dist` is row-major n x n.
MetricMeasureSpace build_space(std::vector<std::string> ids, std::vector<double> dist,
                               std::vector<double> weights, double geo_tol = kExactTol);

// Edges are (a, b, length) triples over point indices; distances are completed by
// all-pairs shortest paths. Unreachable pairs keep an infinite distance.
MetricMeasureSpace build_space_from_graph(std::vector<std::string> ids,
                                          const std::vector<std::array<double, 3>>& edges,
                                          std::vector<double> weights,
                                          double geo_tol = kExactTol);

struct DiscreteGeodesic {
  std::vector<PointIndex> nodes;
  std::vector<double> params;  // cumulative arc length / length, in [0, 1]
  double length = 0.0;
};

// Finest discrete geodesic from x to y: repeatedly steps to the nearest node that stays
// on a geodesic within geo_tol (smallest id on ties). Throws Disconnected.
DiscreteGeodesic shortest_path(const MetricMeasureSpace& space, PointIndex x, PointIndex y);

// Largest |d(a,b) - |params_a - params_b| * length| over node pairs.
double geodesic_defect(const MetricMeasureSpace& space, const DiscreteGeodesic& path);

struct ProbabilityMeasure {
  std::vector<double> mass;  // indexed by point

  double operator[](PointIndex x) const { return mass[x]; }
  std::size_t size() const { return mass.size(); }
};

// Checks nonnegativity and unit total mass (within 1e-9), then renormalizes exactly.
ProbabilityMeasure make_measure(const MetricMeasureSpace& space, std::vector<double> mass);

// Normalized reference measure m / m(X).
ProbabilityMeasure reference_measure(const MetricMeasureSpace& space);

enum class ModelKind { Interval, Circle, Sphere2Sample, EuclideanGrid, Tripod, BinaryTree };

std::optional<ModelKind> parse_model_kind(std::string_view name);
const char* to_string(ModelKind kind);

struct ModelParams {
  std::size_t n = 11;   // resolution; meaning depends on kind
  double size = 1.0;    // interval length, circumference, grid side, tripod leg length
  std::uint64_t seed = 0;
};

struct ModelSpace {
  MetricMeasureSpace space;
  ModelKind kind = ModelKind::Interval;
  double mesh = 0.0;  // largest nearest-neighbour distance
  // Exact embedding: interval (x,0,0), circle (angle,0,0), grid (x,y,0),
  // sphere (unit vector). Empty for trees.
  std::vector<std::array<double, 3>> coords;
  // Sphere only: polar angle from the north pole.
  std::vector<double> polar;
};

// Model spaces used by tests and the CLI. Throws BadResolution for n < 2.
ModelSpace generate_model(ModelKind kind, const ModelParams& params);

}  // namespace mongerays
