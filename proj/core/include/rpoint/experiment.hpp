// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rpoint/config.hpp"
#include "rpoint/ensemble.hpp"
#include "rpoint/report.hpp"

namespace rpoint {

/// Runs the configured experiment over the n grid and compares every
/// estimate against targets recomputed from the exact formulas.
/// Throws ConfigError for an invalid config and HorizonError when the
/// simulated horizon cannot cover a requested time.
Report run_experiment(const ExperimentConfig& config);

/// run_experiment with rows ordered by n and annotated for monotone
/// convergence.
Report convergence_table(const ExperimentConfig& config);

/// Scaling constants used for each convention variant of a run, with the
/// quantity suffix ("" when the conventions coincide).
struct ConventionVariant {
  ScalingConstants constants;
  std::string suffix;
};

std::vector<ConventionVariant> convention_variants(const Model& model, std::uint32_t n,
                                                   ConventionChoice choice);

/// The built-in csbm-table requests used when a config lists none.
CsbmTableParams default_csbm_table();

/// Path dump: one JSON object per line and generation,
/// {"replicate":i,"n":n,"generation":m,"time":m/n,"atoms":[[x_1,...,x_d,mass],...]}.
/// Empty atoms mark the extinction generation.
void dump_paths(std::ostream& out, const Ensemble& ensemble, std::uint64_t count);

}  // namespace rpoint
