// SPDX-License-Identifier: Apache-2.0
#include "rpoint/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "rpoint/error.hpp"
#include "rpoint/estimator.hpp"
#include "rpoint/stats.hpp"

namespace rpoint {

namespace {

std::string join_numbers(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += fmt::format("{:g}", values[i]);
  }
  return out;
}

std::string label(const csbm::MomentSpec& spec) {
  std::string ks;
  for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
    if (i > 0) ks.push_back('/');
    ks += join_numbers(spec.frequencies[i], ':');
  }
  return "t=" + join_numbers(spec.times, '/') + ";k=" + ks;
}

ReportRow make_row(std::uint32_t n, std::string quantity, Complex estimate, double std_err,
                   Complex target, double allowed) {
  ReportRow row;
  row.n = n;
  row.quantity = std::move(quantity);
  row.estimate = estimate;
  row.std_err = std_err;
  row.target = target;
  set_deviation(row);
  row.pass = std::abs(estimate - target) <= allowed;
  return row;
}

/// Row compared at se_multiplier * SE + bias(n).
ReportRow statistical_row(const ExperimentConfig& config, std::uint32_t n, std::string quantity,
                          const EstimateWithCI& est, Complex target) {
  const double allowed = config.tolerance.se_multiplier * est.std_err + config.tolerance.bias(n);
  return make_row(n, std::move(quantity), est.value, est.std_err, target, allowed);
}

/// Row compared at se_multiplier * SE against an exact lattice value; the
/// 1e-12 relative slack covers only floating-point rounding.
ReportRow lattice_row(const ExperimentConfig& config, std::uint32_t n, std::string quantity,
                      const EstimateWithCI& est, Complex target) {
  const double allowed = config.tolerance.se_multiplier * est.std_err +
                         1e-12 * std::max(1.0, std::abs(target));
  return make_row(n, std::move(quantity), est.value, est.std_err, target, allowed);
}

csbm::MomentSpec weighted_spec(const WeightedRequest& request, int dimension) {
  csbm::MomentSpec spec;
  spec.times.push_back(request.s);
  spec.frequencies.emplace_back(static_cast<std::size_t>(dimension), 0.0);
  spec.times.insert(spec.times.end(), request.spec.times.begin(), request.spec.times.end());
  spec.frequencies.insert(spec.frequencies.end(), request.spec.frequencies.begin(),
                          request.spec.frequencies.end());
  return spec;
}

void run_moments(const ExperimentConfig& config, const Ensemble& ens, const std::string& suffix,
                 std::vector<ReportRow>& rows) {
  const std::uint32_t n = ens.n();
  EvaluationPass pass(ens);
  std::vector<std::size_t> ids;
  double required = 0.0;
  for (const auto& spec : config.moments) {
    required = *std::max_element(spec.times.begin(), spec.times.end());
    ids.push_back(pass.add_expectation(
        [&spec](const Sample& s) { return moment_product(s.path(), spec); }, required));
  }
  const auto result = pass.run();
  for (std::size_t i = 0; i < config.moments.size(); ++i) {
    const auto& spec = config.moments[i];
    const auto& est = result.estimates[ids[i]];
    const Complex limit = csbm::moment_function(spec, config.quadrature);
    const Complex lattice = lattice_exact_moment(ens.model(), ens.constants(), spec);
    const std::string name = label(spec);
    rows.push_back(statistical_row(config, n, "moment[" + name + "]" + suffix, est, limit));
    rows.push_back(lattice_row(config, n, "moment_lattice[" + name + "]" + suffix, est, lattice));
    rows.push_back(make_row(n, "lattice_vs_limit[" + name + "]" + suffix, lattice, 0.0, limit,
                            config.tolerance.bias(n)));
  }
}

void run_survival(const ExperimentConfig& config, const Ensemble& ens, const std::string& suffix,
                  std::vector<ReportRow>& rows) {
  EvaluationPass pass(ens);
  std::vector<std::size_t> ids;
  for (double eps : config.survival_epsilons) ids.push_back(pass.add_survival(eps));
  const auto result = pass.run();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double eps = config.survival_epsilons[i];
    rows.push_back(statistical_row(config, ens.n(), fmt::format("survival[eps={:g}]", eps) + suffix,
                                   result.estimates[ids[i]], csbm::survival_mass(eps)));
  }
}

void run_fdd(const ExperimentConfig& config, const Ensemble& ens, const std::string& suffix,
             std::vector<ReportRow>& rows) {
  const auto& fdd = config.fdd;
  const std::uint32_t n = ens.n();
  const int d = ens.model().dimension();

  EvaluationPass pass(ens);
  const auto survival_id = pass.add_survival(fdd.epsilon);
  const auto sample_id = pass.add_conditional_mass(fdd.b, fdd.epsilon);
  std::vector<csbm::MomentSpec> weighted_specs;
  std::vector<std::size_t> weighted_ids;
  for (const auto& w : fdd.weighted) weighted_specs.push_back(weighted_spec(w, d));
  for (std::size_t i = 0; i < fdd.weighted.size(); ++i) {
    const double s = fdd.weighted[i].s;
    const csbm::MomentSpec* spec = &fdd.weighted[i].spec;
    double required = s;
    for (double t : spec->times) required = std::max(required, t);
    weighted_ids.push_back(pass.add_expectation(
        [s, spec](const Sample& sample) {
          const MeasurePath& path = sample.path();
          return path.at(s).total_mass() * moment_product(path, *spec);
        },
        required));
  }
  std::vector<std::size_t> truncated_ids;
  for (const auto& tr : fdd.truncated) {
    const double s = tr.s;
    const double lambda = tr.lambda;
    truncated_ids.push_back(pass.add_expectation(
        [s, lambda](const Sample& sample) {
          return Complex(sample.path().at(s).total_mass() > lambda ? 1.0 : 0.0, 0.0);
        },
        s));
  }
  const auto result = pass.run();

  rows.push_back(statistical_row(config, n, fmt::format("survival[eps={:g}]", fdd.epsilon) + suffix,
                                 result.estimates[survival_id], csbm::survival_mass(fdd.epsilon)));

  const auto& sample = result.samples[sample_id];
  const std::string cond = fmt::format("b={:g};eps={:g}", fdd.b, fdd.epsilon);
  // Given S > eps with b >= eps: atom 1 - eps/b at zero, else Exp(mean b/2).
  const double zero_atom = 1.0 - fdd.epsilon / fdd.b;
  const double cond_mean = 0.5 * fdd.epsilon;
  if (sample.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(make_row(n, "cond_mass_mean[" + cond + "]" + suffix, nan, nan, cond_mean, 0.0));
    rows.push_back(make_row(n, "ks[" + cond + "]" + suffix, nan, 0.0, 0.0, 0.0));
  } else {
    double sum = 0.0;
    for (double x : sample) sum += x;
    const double mean = sum / static_cast<double>(sample.size());
    double m2 = 0.0;
    for (double x : sample) m2 += (x - mean) * (x - mean);
    const double se = sample.size() > 1
                          ? std::sqrt(m2 / static_cast<double>(sample.size() - 1) /
                                      static_cast<double>(sample.size()))
                          : 0.0;
    rows.push_back(statistical_row(config, n, "cond_mass_mean[" + cond + "]" + suffix,
                                   EstimateWithCI{mean, se, sample.size(), 1.0}, cond_mean));
    const double b = fdd.b;
    const auto reference = [zero_atom, b](double x) {
      return x < 0.0 ? 0.0 : 1.0 - (1.0 - zero_atom) * std::exp(-2.0 * x / b);
    };
    const KsResult ks = ks_test(sample, reference, fdd.ks_alpha, fdd.ks_allowance);
    ReportRow row = make_row(n, "ks[" + cond + "]" + suffix, ks.statistic, 0.0,
                             ks.threshold + ks.allowance, 0.0);
    row.pass = ks.pass;
    rows.push_back(row);
  }

  for (std::size_t i = 0; i < fdd.weighted.size(); ++i) {
    const auto& full = weighted_specs[i];
    const std::string name =
        fmt::format("s={:g}", fdd.weighted[i].s) +
        (fdd.weighted[i].spec.times.empty() ? std::string{} : ";" + label(fdd.weighted[i].spec));
    const auto& est = result.estimates[weighted_ids[i]];
    rows.push_back(statistical_row(config, n, "weighted[" + name + "]" + suffix, est,
                                   csbm::moment_function(full, config.quadrature)));
    rows.push_back(lattice_row(config, n, "weighted_lattice[" + name + "]" + suffix, est,
                               lattice_exact_moment(ens.model(), ens.constants(), full)));
  }
  for (std::size_t i = 0; i < fdd.truncated.size(); ++i) {
    const auto& tr = fdd.truncated[i];
    rows.push_back(statistical_row(
        config, n, fmt::format("truncated[s={:g};lambda={:g}]", tr.s, tr.lambda) + suffix,
        result.estimates[truncated_ids[i]], csbm::mass_tail(tr.s, tr.lambda)));
  }
}

void run_identity(const ExperimentConfig& config, const Ensemble& ens, const std::string& suffix,
                  std::vector<ReportRow>& rows) {
  const std::uint32_t n = ens.n();
  for (const auto& spec : config.moments) {
    const RPointIdentity identity = rpoint_identity(ens, spec);
    const std::string name = label(spec);
    ReportRow row = make_row(n, "rpoint_identity[" + name + "]" + suffix, identity.lhs.value,
                             identity.rhs.std_err, identity.rhs.value, 0.0);
    row.pass = identity.relative_error <= config.tolerance.identity_relative;
    rows.push_back(row);
    if (spec.order() == 1) {
      // Exact B-hat from the first-step recursion against the closed form.
      const auto& c = ens.constants();
      const double scale = c.c2 * std::sqrt(static_cast<double>(n));
      std::vector<double> k = spec.frequencies.front();
      for (double& kj : k) kj /= scale;
      const std::vector<std::uint64_t> gens{generation_index(n, spec.times.front())};
      const std::vector<std::vector<double>> freqs{k};
      OracleBudget budget;
      budget.max_total_generations = std::numeric_limits<std::uint64_t>::max();
      const Complex bhat = exact_small_oracle(ens.model().law, ens.model().kernel, gens, freqs, budget);
      const Complex lhs_exact = c.c1 * c.c3 * bhat;
      const Complex closed = lattice_exact_moment(ens.model(), c, spec);
      ReportRow exact = make_row(n, "rpoint_exact_bhat[" + name + "]" + suffix, lhs_exact, 0.0,
                                 closed, 0.0);
      exact.pass = std::abs(lhs_exact - closed) <=
                   config.tolerance.identity_relative * std::max(std::abs(closed), 1e-300);
      rows.push_back(exact);
    }
  }
}

/// Check value for [lo, hi] integrals by adaptive Simpson at the config tolerance.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               const QuadratureConfig& quad) {
  QuadratureConfig tight = quad;
  tight.abs_tolerance = std::min(quad.abs_tolerance, 1e-10);
  tight.max_depth = std::max(quad.max_depth, 40);
  return integrate_adaptive(f, lo, hi, tight);
}

void run_csbm_table(const ExperimentConfig& config, std::vector<ReportRow>& rows) {
  CsbmTableParams table = config.csbm;
  if (table.epsilons.empty() && table.tails.empty() && table.mass_moments.empty() &&
      table.exp_moments.empty() && table.moments.empty()) {
    table = default_csbm_table();
  }
  const auto& quad = config.quadrature;
  const auto check = [](double value, double target) {
    return std::abs(value - target) <= 1e-6 * std::max(1.0, std::abs(target));
  };
  const auto push = [&](std::string quantity, double value, double target) {
    ReportRow row = make_row(0, std::move(quantity), value, 0.0, target, 0.0);
    row.pass = check(value, target);
    rows.push_back(row);
  };

  for (double eps : table.epsilons) {
    push(fmt::format("survival_mass[eps={:g}]", eps), csbm::survival_mass(eps),
         csbm::mass_tail(eps, 0.0));
  }
  for (const auto& t : table.tails) {
    const double rate = 2.0 / t.b;
    const double upper = t.lambda + 40.0 / rate;
    const double integral =
        simpson([&](double x) { return csbm::mass_density(t.b, x); }, std::max(t.lambda, 1e-300),
                upper, quad);
    push(fmt::format("mass_tail[b={:g};lambda={:g}]", t.b, t.lambda),
         csbm::mass_tail(t.b, t.lambda), integral);
  }
  for (const auto& m : table.mass_moments) {
    const double value = csbm::mass_moment(m.b, m.p);
    double target = value;
    if (m.p >= 1 && m.p <= 5) {
      csbm::MomentSpec spec;
      spec.times.assign(static_cast<std::size_t>(m.p), m.b);
      spec.frequencies.assign(static_cast<std::size_t>(m.p), std::vector<double>{0.0});
      target = csbm::moment_function(spec, quad).real();
    }
    push(fmt::format("mass_moment[b={:g};p={}]", m.b, m.p), value, target);
  }
  for (const auto& e : table.exp_moments) {
    const double value = csbm::exp_moment_truncated(e.epsilon, e.theta);
    const double decay = 2.0 / e.epsilon - e.theta;
    const double integral = simpson(
        [&](double x) { return std::exp(e.theta * x) * csbm::mass_density(e.epsilon, std::max(x, 1e-300)); },
        0.0, 60.0 / decay, quad);
    push(fmt::format("exp_moment[eps={:g};theta={:g}]", e.epsilon, e.theta), value, integral);
  }
  for (const auto& spec : table.moments) {
    const double value = csbm::moment_function(spec, quad).real();
    // Same moment with the factors in reverse order.
    csbm::MomentSpec reversed = spec;
    std::reverse(reversed.times.begin(), reversed.times.end());
    std::reverse(reversed.frequencies.begin(), reversed.frequencies.end());
    push("moment_function[" + label(spec) + "]", value,
         csbm::moment_function(reversed, quad).real());
  }
}

}  // namespace

std::vector<ConventionVariant> convention_variants(const Model& model, std::uint32_t n,
                                                   ConventionChoice choice) {
  const bool unit_gamma = std::abs(model.law.variance() - 1.0) <= 1e-12;
  switch (choice) {
    case ConventionChoice::Standard:
      return {{ScalingConstants::for_model(model, n, ConstantConvention::Standard), ""}};
    case ConventionChoice::MomentMatched:
      return {{ScalingConstants::for_model(model, n, ConstantConvention::MomentMatched), ""}};
    case ConventionChoice::Both:
      if (unit_gamma) return {{ScalingConstants::for_model(model, n, ConstantConvention::Standard), ""}};
      return {{ScalingConstants::for_model(model, n, ConstantConvention::Standard), "@standard"},
              {ScalingConstants::for_model(model, n, ConstantConvention::MomentMatched),
               "@matched"}};
  }
  return {};
}

CsbmTableParams default_csbm_table() {
  CsbmTableParams table;
  table.epsilons = {0.5, 1.0, 2.0};
  table.tails = {{1.0, 0.5}, {2.0, 1.0}};
  table.mass_moments = {{1.0, 1}, {1.0, 2}, {2.0, 3}, {1.0, 4}};
  table.exp_moments = {{1.0, 0.0}, {1.0, 1.0}, {0.5, 2.0}};
  table.moments = {{{1.0}, {{0.0}}},
                   {{1.0}, {{1.0}}},
                   {{0.5, 1.0}, {{0.0}, {0.0}}},
                   {{1.0, 1.0}, {{1.0}, {-1.0}}},
                   {{1.0, 1.0, 1.0}, {{0.0}, {0.0}, {0.0}}}};
  return table;
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  Report report;
  if (config.kind == ExperimentKind::CsbmTable) {
    run_csbm_table(config, report.rows);
    annotate(report);
    return report;
  }

  const auto model = std::make_shared<const Model>(config.model.build());
  for (std::uint32_t n : config.n_grid) {
    for (const auto& variant : convention_variants(*model, n, config.convention)) {
      const Ensemble ens(model, variant.constants, config.replicates, config.horizon_time,
                         config.seed, config.threads);
      switch (config.kind) {
        case ExperimentKind::Moments:
          run_moments(config, ens, variant.suffix, report.rows);
          break;
        case ExperimentKind::Survival:
          run_survival(config, ens, variant.suffix, report.rows);
          break;
        case ExperimentKind::Fdd:
          run_fdd(config, ens, variant.suffix, report.rows);
          break;
        case ExperimentKind::Identity:
          run_identity(config, ens, variant.suffix, report.rows);
          break;
        case ExperimentKind::CsbmTable:
          break;
      }
    }
  }
  annotate(report);
  return report;
}

Report convergence_table(const ExperimentConfig& config) {
  Report report = run_experiment(config);
  annotate(report);
  return report;
}

void dump_paths(std::ostream& out, const Ensemble& ensemble, std::uint64_t count) {
  count = std::min(count, ensemble.replicates());
  for (std::uint64_t i = 0; i < count; ++i) {
    const Trajectory traj = ensemble.trajectory(i);
    const MeasurePath path = rescale(traj, ensemble.constants());
    const auto measures = path.measures();
    for (std::size_t m = 0; m < measures.size(); ++m) {
      nlohmann::json atoms = nlohmann::json::array();
      for (std::size_t a = 0; a < measures[m].size(); ++a) {
        nlohmann::json atom = nlohmann::json::array();
        for (double x : measures[m].position(a)) atom.push_back(x);
        atom.push_back(measures[m].mass(a));
        atoms.push_back(std::move(atom));
      }
      nlohmann::json record = {{"replicate", i},
                               {"n", ensemble.n()},
                               {"generation", m},
                               {"time", static_cast<double>(m) / ensemble.n()},
                               {"atoms", std::move(atoms)}};
      out << record.dump() << '\n';
    }
  }
}

}  // namespace rpoint
