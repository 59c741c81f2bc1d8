// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpoint/branching.hpp"
#include "rpoint/csbm.hpp"
#include "rpoint/measure.hpp"

namespace rpoint {

enum class ExperimentKind { Moments, Survival, Fdd, Identity, CsbmTable };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment_kind(std::string_view name);

/// Standard, MomentMatched, or Both (which collapses to one run when gamma = 1).
enum class ConventionChoice { Standard, MomentMatched, Both };

struct ModelConfig {
  std::string offspring = "binary";
  std::vector<double> pmf;
  std::string kernel = "nearest_neighbor";
  int radius = 1;
  int dimension = 1;

  Model build() const;
};

/// Pass rule: |estimate - target| <= se_multiplier * SE + bias(n), with
/// bias(n) = bias_absolute + bias_inverse_n / n.
struct ToleranceConfig {
  double se_multiplier = 4.0;
  double bias_absolute = 0.0;
  double bias_inverse_n = 0.0;
  double identity_relative = 1e-9;

  double bias(std::uint32_t n) const noexcept {
    return bias_absolute + bias_inverse_n / static_cast<double>(n);
  }
};

struct WeightedRequest {
  double s = 0.0;
  csbm::MomentSpec spec;
};

struct TruncatedRequest {
  double s = 0.0;
  double lambda = 0.0;
};

struct FddParams {
  double b = 1.0;
  double epsilon = 1.0;
  double ks_alpha = 0.001;
  double ks_allowance = 0.0;
  std::vector<WeightedRequest> weighted;
  std::vector<TruncatedRequest> truncated;
};

struct TailRequest {
  double b = 1.0;
  double lambda = 0.0;
};
struct MassMomentRequest {
  double b = 1.0;
  int p = 1;
};
struct ExpMomentRequest {
  double epsilon = 1.0;
  double theta = 0.0;
};

struct CsbmTableParams {
  std::vector<double> epsilons;
  std::vector<TailRequest> tails;
  std::vector<MassMomentRequest> mass_moments;
  std::vector<ExpMomentRequest> exp_moments;
  std::vector<csbm::MomentSpec> moments;
};

/// One experiment, parsed from a versioned JSON document (schema version 1).
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  ExperimentKind kind = ExperimentKind::CsbmTable;
  ModelConfig model;
  std::vector<std::uint32_t> n_grid;
  std::uint64_t replicates = 0;
  double horizon_time = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ConventionChoice convention = ConventionChoice::Both;

  std::vector<csbm::MomentSpec> moments;
  std::vector<double> survival_epsilons;
  FddParams fdd;
  CsbmTableParams csbm;

  ToleranceConfig tolerance;
  QuadratureConfig quadrature;
  std::optional<std::filesystem::path> output;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

/// Parses and validates; unknown keys are errors.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& file);

}  // namespace rpoint
