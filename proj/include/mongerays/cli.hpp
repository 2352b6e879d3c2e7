#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mongerays {

struct RunConfig {
  std::optional<double> eps_gamma;
  std::optional<double> geo_tol;
  std::optional<double> level_tol;
  std::optional<double> max_gap;
  std::uint64_t seed = 0;
};

// Subcommands generate, solve, decompose, solve-monge, check-curvature, report and
// selftest. Returns 0 on success, 2 for input errors, 3 for numeric failures and 4 for
// gap or invariant violations.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mongerays
