#pragma once

#include <iosfwd>
#include <string>

#include "mongerays/cli.hpp"
#include "mongerays/monge.hpp"

namespace mongerays {

std::string rays_csv(const MongeSolution& solution);
std::string branch_csv(const MetricMeasureSpace& space, const MongePipeline& pipeline,
                       const ProbabilityMeasure& mu0, const ProbabilityMeasure& mu1);

// Runs the built-in property suite, writes selftest.json and CSV tables into out_dir and
// prints one PASS/FAIL line per check. Returns 0 when all checks pass, 4 otherwise.
int selftest(const RunConfig& config, const std::string& out_dir, std::ostream& out);

}  // namespace mongerays
