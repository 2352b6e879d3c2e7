#pragma once

#include <random>
#include <string>
#include <vector>

#include "mongerays/mmspace.hpp"

namespace mongerays {

// Star graph u - c - v, c - w with unit edges and uniform weights.
MetricMeasureSpace tripod_fixture();

// n points at the cell midpoints (i + 1/2)/n of [0, 1] with uniform weights.
MetricMeasureSpace midpoint_interval(std::size_t n);

struct Instance {
  ModelSpace model;
  ProbabilityMeasure mu0;
  ProbabilityMeasure mu1;
  std::string label;
};

// Smooth densities on a sphere sample: mu0 proportional to weight * cos(polar) on the
// northern hemisphere, mu1 its mirror image in the south.
Instance hemisphere_instance(std::size_t n, std::uint64_t seed = 0);

// Interval, circle or grid with n <= max_n points; mu0 and mu1 are uniform on two random
// k-point subsets (same k), so every atom carries mass 1/k.
Instance random_instance(std::mt19937_64& rng, std::size_t max_n);

std::vector<PointIndex> parse_point_list(const MetricMeasureSpace& space,
                                         const std::vector<std::string>& ids);

}  // namespace mongerays
