// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "rpoint/csbm.hpp"
#include "rpoint/ensemble.hpp"

namespace rpoint {

using csbm::MomentSpec;

/// Weighted replicate mean with its standard error.
struct EstimateWithCI {
  Complex value;
  double std_err = 0.0;
  std::uint64_t replicates = 0;
  double weight = 0.0;
};

using PathFunctional = std::function<Complex(const Sample&)>;

/// Several estimators evaluated in a single sweep over an ensemble.
///
/// Each replicate is simulated once and offered to every registered
/// estimator. Accumulation is per fixed-size block in replicate order,
/// then across blocks in block order, so results are bit-identical for
/// any thread count.
class EvaluationPass {
 public:
  explicit EvaluationPass(const Ensemble& ensemble) : ensemble_(ensemble) {}

  /// weight * mean(f) with standard error |weight| * sd / sqrt(R).
  /// `required_time` is checked against the ensemble horizon.
  std::size_t add_weighted_expectation(PathFunctional f, double weight,
                                       double required_time = 0.0);
  /// Same, with the ensemble weight c3 * n.
  std::size_t add_expectation(PathFunctional f, double required_time = 0.0) {
    return add_weighted_expectation(std::move(f), ensemble_.constants().weight(), required_time);
  }
  /// c3 * n * P(S > eps) with binomial standard error.
  std::size_t add_survival(double eps);
  /// X_b(1) over replicates with S > eps, in replicate order.
  std::size_t add_conditional_mass(double b, double eps);

  struct Result {
    std::vector<EstimateWithCI> estimates;
    std::vector<std::vector<double>> samples;
  };

  Result run() const;

 private:
  struct Expectation {
    PathFunctional functional;
    double weight;
    bool binomial;
  };
  struct Conditional {
    double b;
    double eps;
  };

  const Ensemble& ensemble_;
  std::vector<Expectation> expectations_;
  std::vector<Conditional> conditionals_;
};

/// Latest time every path in the ensemble covers: floor(n T) / n.
double path_horizon_time(const Ensemble& ensemble);

/// (c3 n / R) sum_j f(path_j).
EstimateWithCI mu_expectation(const Ensemble& ensemble, const PathFunctional& functional,
                              double required_time = 0.0);

/// prod_i X_{t_i}(phi_{k_i}) on one path.
Complex moment_product(const MeasurePath& path, const MomentSpec& spec);

/// E_{mu_n}[prod_i X_{t_i}(phi_{k_i})].
EstimateWithCI empirical_moment(const Ensemble& ensemble, const MomentSpec& spec);

/// mu_n(S > eps); requires eps < path horizon time.
EstimateWithCI survival_weight(const Ensemble& ensemble, double eps);

struct Weighted {
  double s;
};
struct Truncated {
  double s;
  double lambda;
};
using FunctionalMode = std::variant<Weighted, Truncated>;

/// E_{mu_n}[X_s(1) F] (weighted) or E_{mu_n}[F 1{X_s(1) > lambda}]
/// (truncated) with F = prod_i X_{t_i}(phi_{k_i}); an empty spec means F = 1.
EstimateWithCI functional_moment(const Ensemble& ensemble, const FunctionalMode& mode,
                                 const MomentSpec& spec);

/// X^n_b(1) for every replicate with S > eps.
std::vector<double> conditional_mass_sample(const Ensemble& ensemble, double b, double eps);

/// Both sides of the r-point identity on the same realizations.
struct RPointIdentity {
  /// (c1^l c3 / n^{l-1}) times the replicate mean of the raw-lattice Fourier
  /// product at generations floor(n t_i) and frequencies k_i / (c2 sqrt n).
  EstimateWithCI lhs;
  /// empirical_moment on the rescaled paths.
  EstimateWithCI rhs;
  /// |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish.
  double relative_error = 0.0;
};

RPointIdentity rpoint_identity(const Ensemble& ensemble, const MomentSpec& spec);

/// Exact E_{mu_n}[prod_i X_{t_i}(phi_{k_i})] for the lattice model:
/// c3 n (c1/n)^l times the first-step recursion at generations floor(n t_i)
/// and frequencies k_i / (c2 sqrt n). One factor uses the closed form
/// c1 c3 D-hat(k / (c2 sqrt n))^{floor(n t)}.
Complex lattice_exact_moment(const Model& model, const ScalingConstants& constants,
                             const MomentSpec& spec);

}  // namespace rpoint
