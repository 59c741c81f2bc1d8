// SPDX-License-Identifier: Apache-2.0
#include "rpoint/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rpoint {

namespace {

void check_time(const Ensemble& ensemble, double t, const char* what) {
  if (!(t >= 0.0)) throw DomainError(std::string(what) + " must be nonnegative");
  if (t > path_horizon_time(ensemble)) {
    throw HorizonError(std::string(what) + " = " + std::to_string(t) +
                       " exceeds the ensemble horizon " +
                       std::to_string(path_horizon_time(ensemble)));
  }
}

void check_spec(const Ensemble& ensemble, const MomentSpec& spec, bool allow_empty) {
  if (allow_empty && spec.times.empty() && spec.frequencies.empty()) return;
  spec.validate();
  if (static_cast<int>(spec.frequencies.front().size()) != ensemble.model().dimension()) {
    throw DomainError("moment frequencies have dimension " +
                      std::to_string(spec.frequencies.front().size()) + ", model has " +
                      std::to_string(ensemble.model().dimension()));
  }
  for (double t : spec.times) check_time(ensemble, t, "moment time");
}

double max_time(const MomentSpec& spec) {
  double m = 0.0;
  for (double t : spec.times) m = std::max(m, t);
  return m;
}

struct BlockPartial {
  std::vector<Complex> sums;
  std::vector<double> m2;
  std::vector<std::vector<double>> samples;
  std::uint64_t count = 0;
};

}  // namespace

double path_horizon_time(const Ensemble& ensemble) {
  return static_cast<double>(ensemble.horizon_generation()) / static_cast<double>(ensemble.n());
}

std::size_t EvaluationPass::add_weighted_expectation(PathFunctional f, double weight,
                                                     double required_time) {
  check_time(ensemble_, required_time, "required time");
  expectations_.push_back({std::move(f), weight, false});
  return expectations_.size() - 1;
}

std::size_t EvaluationPass::add_survival(double eps) {
  if (!(eps > 0.0)) throw DomainError("survival threshold eps must be positive");
  if (!(eps < path_horizon_time(ensemble_))) {
    throw HorizonError("survival threshold eps = " + std::to_string(eps) +
                       " must lie strictly inside the horizon " +
                       std::to_string(path_horizon_time(ensemble_)));
  }
  const std::uint64_t cutoff = generation_index(ensemble_.n(), eps);
  expectations_.push_back(
      {[cutoff](const Sample& s) {
         const auto& ext = s.trajectory().extinct_generation;
         return Complex(!ext || *ext > cutoff ? 1.0 : 0.0, 0.0);
       },
       ensemble_.constants().weight(), true});
  return expectations_.size() - 1;
}

std::size_t EvaluationPass::add_conditional_mass(double b, double eps) {
  if (!(b > 0.0) || !(eps > 0.0)) throw DomainError("b and eps must be positive");
  check_time(ensemble_, b, "b");
  check_time(ensemble_, eps, "eps");
  conditionals_.push_back({b, eps});
  return conditionals_.size() - 1;
}

EvaluationPass::Result EvaluationPass::run() const {
  const std::size_t n_exp = expectations_.size();
  const std::size_t n_cond = conditionals_.size();

  const auto per_block = [&](std::uint64_t first, std::uint64_t last) {
    BlockPartial partial;
    partial.count = last - first;
    partial.sums.assign(n_exp, Complex{});
    partial.m2.assign(n_exp, 0.0);
    partial.samples.resize(n_cond);
    std::vector<std::vector<Complex>> values(n_exp);
    for (auto& v : values) v.reserve(partial.count);

    ensemble_.visit_range(first, last, [&](const Sample& sample) {
      for (std::size_t e = 0; e < n_exp; ++e) {
        values[e].push_back(expectations_[e].functional(sample));
      }
      for (std::size_t c = 0; c < n_cond; ++c) {
        const MeasurePath& path = sample.path();
        if (path.survives_past(conditionals_[c].eps)) {
          partial.samples[c].push_back(path.at(conditionals_[c].b).total_mass());
        }
      }
    });

    const double count = static_cast<double>(partial.count);
    for (std::size_t e = 0; e < n_exp; ++e) {
      Complex sum{};
      for (const Complex& v : values[e]) sum += v;
      const Complex mean = sum / count;
      double m2 = 0.0;
      for (const Complex& v : values[e]) m2 += std::norm(v - mean);
      partial.sums[e] = sum;
      partial.m2[e] = m2;
    }
    return partial;
  };

  const auto blocks = ensemble_.map_blocks<BlockPartial>(per_block);

  Result result;
  const auto replicates = ensemble_.replicates();
  const double r = static_cast<double>(replicates);
  result.estimates.resize(n_exp);
  for (std::size_t e = 0; e < n_exp; ++e) {
    Complex total{};
    for (const auto& block : blocks) total += block.sums[e];
    const Complex mean = total / r;
    const double weight = expectations_[e].weight;

    double sd = 0.0;
    if (expectations_[e].binomial) {
      const double p = mean.real();
      sd = std::sqrt(std::max(0.0, p * (1.0 - p)));
    } else if (replicates > 1) {
      double m2 = 0.0;
      for (const auto& block : blocks) {
        const Complex block_mean = block.sums[e] / static_cast<double>(block.count);
        m2 += block.m2[e] + static_cast<double>(block.count) * std::norm(block_mean - mean);
      }
      sd = std::sqrt(m2 / (r - 1.0));
    }
    result.estimates[e] = EstimateWithCI{weight * mean, std::abs(weight) * sd / std::sqrt(r),
                                         replicates, weight};
  }
  result.samples.resize(n_cond);
  for (std::size_t c = 0; c < n_cond; ++c) {
    for (const auto& block : blocks) {
      result.samples[c].insert(result.samples[c].end(), block.samples[c].begin(),
                               block.samples[c].end());
    }
  }
  return result;
}

EstimateWithCI mu_expectation(const Ensemble& ensemble, const PathFunctional& functional,
                              double required_time) {
  EvaluationPass pass(ensemble);
  pass.add_expectation(functional, required_time);
  return pass.run().estimates.front();
}

Complex moment_product(const MeasurePath& path, const MomentSpec& spec) {
  Complex product(1.0, 0.0);
  for (std::size_t i = 0; i < spec.times.size(); ++i) {
    product *= integrate(path.at(spec.times[i]), spec.frequencies[i]);
  }
  return product;
}

EstimateWithCI empirical_moment(const Ensemble& ensemble, const MomentSpec& spec) {
  check_spec(ensemble, spec, false);
  return mu_expectation(
      ensemble, [&spec](const Sample& s) { return moment_product(s.path(), spec); },
      max_time(spec));
}

EstimateWithCI survival_weight(const Ensemble& ensemble, double eps) {
  EvaluationPass pass(ensemble);
  pass.add_survival(eps);
  return pass.run().estimates.front();
}

EstimateWithCI functional_moment(const Ensemble& ensemble, const FunctionalMode& mode,
                                 const MomentSpec& spec) {
  check_spec(ensemble, spec, true);
  if (const auto* w = std::get_if<Weighted>(&mode)) {
    const double s = w->s;
    check_time(ensemble, s, "s");
    return mu_expectation(
        ensemble,
        [&spec, s](const Sample& sample) {
          const MeasurePath& path = sample.path();
          return path.at(s).total_mass() * moment_product(path, spec);
        },
        std::max(s, max_time(spec)));
  }
  const auto& tr = std::get<Truncated>(mode);
  if (!(tr.lambda >= 0.0)) throw DomainError("truncation level lambda must be nonnegative");
  check_time(ensemble, tr.s, "s");
  const double s = tr.s;
  const double lambda = tr.lambda;
  return mu_expectation(
      ensemble,
      [&spec, s, lambda](const Sample& sample) {
        const MeasurePath& path = sample.path();
        if (!(path.at(s).total_mass() > lambda)) return Complex{};
        return moment_product(path, spec);
      },
      std::max(s, max_time(spec)));
}

std::vector<double> conditional_mass_sample(const Ensemble& ensemble, double b, double eps) {
  EvaluationPass pass(ensemble);
  pass.add_conditional_mass(b, eps);
  return std::move(pass.run().samples.front());
}

namespace {

/// Raw-lattice Fourier product prod_i sum_x count(x) e^{i q_i . x}.
Complex lattice_fourier_product(const Trajectory& traj, std::span<const std::uint64_t> gens,
                                std::span<const std::vector<double>> scaled_k) {
  Complex product(1.0, 0.0);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i] >= traj.configurations.size()) return Complex{};
    const auto& config = traj.configurations[gens[i]];
    double re = 0.0;
    double im = 0.0;
    for (std::size_t a = 0; a < config.occupied_sites(); ++a) {
      const auto site = config.site(a);
      double phase = 0.0;
      for (std::size_t j = 0; j < site.size(); ++j) {
        phase += scaled_k[i][j] * static_cast<double>(site[j]);
      }
      const auto count = static_cast<double>(config.count(a));
      re += count * std::cos(phase);
      im += count * std::sin(phase);
    }
    product *= Complex(re, im);
  }
  return product;
}

std::vector<std::vector<double>> lattice_frequencies(const MomentSpec& spec,
                                                     const ScalingConstants& constants) {
  const double scale = constants.c2 * std::sqrt(static_cast<double>(constants.n));
  std::vector<std::vector<double>> scaled = spec.frequencies;
  for (auto& k : scaled) {
    for (double& kj : k) kj /= scale;
  }
  return scaled;
}

std::vector<std::uint64_t> lattice_generations(const MomentSpec& spec, std::uint32_t n) {
  std::vector<std::uint64_t> gens;
  gens.reserve(spec.times.size());
  for (double t : spec.times) gens.push_back(generation_index(n, t));
  return gens;
}

}  // namespace

RPointIdentity rpoint_identity(const Ensemble& ensemble, const MomentSpec& spec) {
  check_spec(ensemble, spec, false);
  const auto& constants = ensemble.constants();
  const auto l = static_cast<double>(spec.order());
  const double lhs_weight = std::pow(constants.c1, l) * constants.c3 /
                            std::pow(static_cast<double>(constants.n), l - 1.0);
  const auto gens = lattice_generations(spec, constants.n);
  const auto scaled_k = lattice_frequencies(spec, constants);

  EvaluationPass pass(ensemble);
  const auto lhs_index = pass.add_weighted_expectation(
      [&](const Sample& s) { return lattice_fourier_product(s.trajectory(), gens, scaled_k); },
      lhs_weight, max_time(spec));
  const auto rhs_index = pass.add_expectation(
      [&spec](const Sample& s) { return moment_product(s.path(), spec); }, max_time(spec));
  const auto result = pass.run();

  RPointIdentity identity;
  identity.lhs = result.estimates[lhs_index];
  identity.rhs = result.estimates[rhs_index];
  const double scale = std::max(std::abs(identity.lhs.value), std::abs(identity.rhs.value));
  identity.relative_error =
      scale > 0.0 ? std::abs(identity.lhs.value - identity.rhs.value) / scale : 0.0;
  return identity;
}

Complex lattice_exact_moment(const Model& model, const ScalingConstants& constants,
                             const MomentSpec& spec) {
  spec.validate();
  constants.validate();
  if (static_cast<int>(spec.frequencies.front().size()) != model.dimension()) {
    throw DomainError("moment frequencies do not match the model dimension");
  }
  const auto gens = lattice_generations(spec, constants.n);
  const auto scaled_k = lattice_frequencies(spec, constants);
  const double n = static_cast<double>(constants.n);
  if (spec.order() == 1) {
    const double dhat = step_char(model.kernel, scaled_k.front());
    return {constants.c1 * constants.c3 * std::pow(dhat, static_cast<double>(gens.front())), 0.0};
  }
  OracleBudget unlimited;
  unlimited.max_factors = spec.order();
  unlimited.max_total_generations = std::numeric_limits<std::uint64_t>::max();
  const Complex raw = exact_small_oracle(model.law, model.kernel, gens, scaled_k, unlimited);
  return constants.c3 * n * std::pow(constants.c1 / n, static_cast<double>(spec.order())) * raw;
}

}  // namespace rpoint
