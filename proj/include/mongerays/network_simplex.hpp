#pragma once

#include <cstddef>
#include <vector>

namespace mongerays {

// Balanced transportation problem: ship `supply` to `demand` over a complete bipartite
// graph with row-major `cost` (supply.size() x demand.size()).
struct TransportProblem {
  std::vector<double> supply;
  std::vector<double> demand;
  std::vector<double> cost;
};

struct TransportFlow {
  std::size_t source = 0;
  std::size_t sink = 0;
  double mass = 0.0;
};

struct TransportResult {
  std::vector<TransportFlow> flows;  // strictly positive flows, sorted by (source, sink)
  double cost = 0.0;
  std::size_t pivots = 0;
};

// Primal network simplex with a strongly feasible spanning tree rooted at an artificial
// node (big-M start) and block-search pricing. Throws Infeasible on unbalanced input and
// NumericFailure when the pivot guard is exceeded.
TransportResult solve_transport(const TransportProblem& problem);

}  // namespace mongerays
