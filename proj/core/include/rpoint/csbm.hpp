// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "rpoint/quadrature.hpp"

namespace rpoint {

/// Exact quantities of the canonical measure N_0 of super-Brownian motion
/// started from the origin, with branching and diffusion parameters 1.
namespace csbm {

using Complex = std::complex<double>;

/// Times t_1..t_l (> 0) and frequencies k_1..k_l of a mixed Fourier moment.
struct MomentSpec {
  std::vector<double> times;
  std::vector<std::vector<double>> frequencies;

  std::size_t order() const noexcept { return times.size(); }
  /// Throws DomainError for mismatched lengths, ragged dimensions or t_i <= 0.
  void validate() const;
};

/// Density of N_0(X_b(1) in dx \ {0}): (2/b)^2 e^{-2x/b}.
double mass_density(double b, double x);

/// N_0(X_b(1) > lambda) = (2/b) e^{-2 lambda / b}.
double mass_tail(double b, double lambda);

/// N_0(S > eps) = 2/eps.
double survival_mass(double eps);

/// N_0[X_b(1)^p] = p! (b/2)^{p-1}.
double mass_moment(double b, int p);

/// N_0[e^{theta X_eps(1)} 1{X_eps(1) > 0}] = 4 / (eps (2 - eps theta)).
/// Throws DivergenceError when theta >= 2/eps.
double exp_moment_truncated(double eps, double theta);

/// N_0[prod_i X_{t_i}(phi_{k_i})].
///
/// One factor: e^{-|k|^2 t / 2}. Two or more: integral over the first
/// branch time s in [0, min t) of e^{-|sum k|^2 s / 2} times the sum over
/// unordered splits {I, I^c} of the product of the two sub-moments at
/// times t - s. Two-factor sub-moments are integrated in closed form;
/// larger ones by nested adaptive Simpson with the tolerance shared out
/// across levels.
Complex moment_function(const MomentSpec& spec, const QuadratureConfig& quad = {});

}  // namespace csbm
}  // namespace rpoint
