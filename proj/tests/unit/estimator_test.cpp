// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "rpoint/estimator.hpp"

using namespace rpoint;

namespace {

std::shared_ptr<const Model> model(OffspringLaw law = OffspringLaw::binary(), int d = 1) {
  return std::make_shared<const Model>(Model{std::move(law), StepKernel::nearest_neighbor(d)});
}

Ensemble ensemble(std::uint32_t n, std::uint64_t R, double horizon, std::uint64_t seed = 1,
                  unsigned threads = 1, std::shared_ptr<const Model> m = model()) {
  const auto c = ScalingConstants::for_model(*m, n);
  return Ensemble(m, c, R, horizon, seed, threads);
}

MomentSpec spec(std::vector<double> t, std::vector<double> k) {
  MomentSpec s;
  s.times = std::move(t);
  for (double kk : k) s.frequencies.push_back({kk});
  return s;
}

bool within(const EstimateWithCI& est, Complex target, double extra = 0.0) {
  return std::abs(est.value - target) <= 4.0 * est.std_err + extra;
}

}  // namespace

TEST(Ensemble, ReplicateStreamsAreStable) {
  const auto small = ensemble(10, 5, 2.0, 9);
  const auto large = ensemble(10, 5000, 2.0, 9);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto a = small.trajectory(i);
    const auto b = large.trajectory(i);
    ASSERT_EQ(a.configurations, b.configurations);
    EXPECT_EQ(a.provenance.replicate, i);
    EXPECT_EQ(a.provenance.scaling_n, 10u);
    EXPECT_EQ(a.provenance.master_seed, 9u);
  }
  EXPECT_EQ(large.block_count(), 5u);
  EXPECT_EQ(small.horizon_generation(), 20u);
}

TEST(MuExpectation, ConstantFunctional) {
  const auto ens = ensemble(37, 3000, 1.0);
  const auto est = mu_expectation(ens, [](const Sample&) { return Complex(1.0, 0.0); });
  EXPECT_EQ(est.value, Complex(37.0, 0.0));
  EXPECT_EQ(est.std_err, 0.0);
  EXPECT_EQ(est.replicates, 3000u);
  EXPECT_EQ(est.weight, 37.0);
}

TEST(MuExpectation, FirstMoment) {
  const auto ens = ensemble(100, 100000, 0.6);
  const auto est = mu_expectation(
      ens, [](const Sample& s) { return Complex(s.path().at(0.5).total_mass(), 0.0); }, 0.5);
  EXPECT_TRUE(within(est, 1.0)) << est.value << " " << est.std_err;
}

TEST(MuExpectation, HorizonChecked) {
  const auto ens = ensemble(10, 10, 1.0);
  EXPECT_THROW(mu_expectation(ens, [](const Sample&) { return Complex{}; }, 1.2), HorizonError);
  EXPECT_THROW(empirical_moment(ens, spec({1.5}, {0.0})), HorizonError);
  EXPECT_THROW(survival_weight(ens, 1.0), HorizonError);
  EXPECT_THROW(empirical_moment(ens, MomentSpec{{0.5}, {{0.0, 0.0}}}), DomainError);
}

TEST(EmpiricalMoment, Examples) {
  const auto ens = ensemble(100, 50000, 1.05, 2);
  const auto first = empirical_moment(ens, spec({1.0}, {0.0}));
  EXPECT_TRUE(within(first, 1.0));
  const auto fourier = empirical_moment(ens, spec({1.0}, {1.0}));
  const Complex exact = lattice_exact_moment(ens.model(), ens.constants(), spec({1.0}, {1.0}));
  EXPECT_NEAR(exact.real(), std::pow(std::cos(0.1), 100), 1e-15);
  EXPECT_TRUE(within(fourier, exact)) << fourier.value << " vs " << exact;
}

TEST(EmpiricalMoment, ExactConjugation) {
  const auto ens = ensemble(20, 3000, 2.0, 4);
  const auto a = empirical_moment(ens, spec({0.5, 1.5}, {1.3, -0.4}));
  const auto b = empirical_moment(ens, spec({0.5, 1.5}, {-1.3, 0.4}));
  EXPECT_EQ(b.value, std::conj(a.value));
  EXPECT_EQ(b.std_err, a.std_err);
}

TEST(EmpiricalMoment, LinearInWeight) {
  const auto ens = ensemble(20, 3000, 2.0, 4);
  ScalingConstants doubled = ens.constants();
  doubled.c3 *= 2.0;
  const auto twice = ens.with_constants(doubled);
  const auto s = spec({1.0}, {0.7});
  const auto a = empirical_moment(ens, s);
  const auto b = empirical_moment(twice, s);
  EXPECT_EQ(b.value, 2.0 * a.value);
  EXPECT_EQ(b.std_err, 2.0 * a.std_err);
}

TEST(EmpiricalMoment, OracleAgreementSmallN) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> grid{
      {{1.0}, {0.8}},           {{0.5, 1.0}, {0.0, 0.0}},  {{1.0, 1.0}, {1.2, -0.5}},
      {{0.25, 0.75}, {2.0, 1.0}}, {{0.5, 0.5, 1.0}, {0.3, 0.3, -0.6}}};
  for (std::uint32_t n : {2u, 4u}) {
    for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
      const auto m = model(law);
      const auto ens = ensemble(n, 50000, 2.0, 6, 1, m);
      for (const auto& [t, k] : grid) {
        const auto s = spec(t, k);
        const auto est = empirical_moment(ens, s);
        const Complex exact = lattice_exact_moment(*m, ens.constants(), s);
        EXPECT_TRUE(within(est, exact)) << "n=" << n << " " << est.value << " vs " << exact;
      }
    }
  }
}

TEST(EmpiricalMoment, DeterministicAcrossThreads) {
  const auto one = ensemble(16, 5000, 1.5, 3, 1);
  const auto four = one.with_threads(4);
  const auto s = spec({0.5, 1.0}, {0.4, -1.1});
  const auto a = empirical_moment(one, s);
  const auto b = empirical_moment(four, s);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_err, b.std_err);
}

TEST(SurvivalWeight, SmallEpsilonAndNesting) {
  const auto ens = ensemble(10, 20000, 2.0, 8);
  // Every path survives past eps < 1/n.
  const auto tiny = survival_weight(ens, 0.05);
  EXPECT_EQ(tiny.value.real(), 10.0);
  // eps in [1/n, 2/n): survival of generation 1.
  const auto first = survival_weight(ens, 0.1);
  std::uint64_t alive = 0;
  for (std::uint64_t i = 0; i < ens.replicates(); ++i) alive += ens.trajectory(i).total_count(1) > 0;
  EXPECT_DOUBLE_EQ(first.value.real(), 10.0 * double(alive) / double(ens.replicates()));
  const auto a = survival_weight(ens, 0.5);
  const auto b = survival_weight(ens, 1.5);
  EXPECT_LE(b.value.real(), a.value.real());
  EXPECT_THROW(survival_weight(ens, 0.0), DomainError);

  const auto via_mu = mu_expectation(ens, [](const Sample& s) {
    return Complex(s.path().survives_past(0.5) ? 1.0 : 0.0, 0.0);
  });
  EXPECT_EQ(via_mu.value, a.value);
}

TEST(FunctionalMoment, WeightedAndTruncated) {
  const auto ens = ensemble(50, 40000, 1.1, 12);
  const auto w = functional_moment(ens, Weighted{0.5}, MomentSpec{});
  EXPECT_TRUE(within(w, 1.0));
  const auto mixed = functional_moment(ens, Weighted{0.5}, spec({1.0}, {0.0}));
  const Complex lattice =
      lattice_exact_moment(ens.model(), ens.constants(), spec({0.5, 1.0}, {0.0, 0.0}));
  EXPECT_NEAR(lattice.real(), (1.0 + 25.0) / 50.0, 1e-12);
  EXPECT_TRUE(within(mixed, lattice));

  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.1, 0.5, 0.5, 1.0}) {
    const auto tr = functional_moment(ens, Truncated{1.0, lambda}, MomentSpec{});
    EXPECT_LE(tr.value.real(), previous);
    previous = tr.value.real();
  }
  EXPECT_THROW(functional_moment(ens, Truncated{1.0, -0.1}, MomentSpec{}), DomainError);
}

TEST(ConditionalMass, Properties) {
  // A seed whose single replicate dies at generation 1.
  std::uint64_t seed = 0;
  while (ensemble(5, 1, 3.0, seed).trajectory(0).extinct_generation != 1u) ++seed;
  EXPECT_TRUE(conditional_mass_sample(ensemble(5, 1, 3.0, seed), 1.0, 1.0).empty());

  const auto ens = ensemble(20, 20000, 1.5, 13);
  for (const auto& [b, eps] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.0, 1.0}}) {
    const auto sample = conditional_mass_sample(ens, b, eps);
    ASSERT_FALSE(sample.empty());
    for (double x : sample) ASSERT_GT(x, 0.0);
  }
  const auto survivors = conditional_mass_sample(ens, 1.0, 0.5).size();
  EXPECT_NEAR(survival_weight(ens, 0.5).value.real(),
              20.0 * double(survivors) / double(ens.replicates()), 1e-12);
}

TEST(RPointIdentity, AgreesAndMatchesClosedForm) {
  for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
    const auto m = model(law, 2);
    for (auto convention : {ConstantConvention::Standard, ConstantConvention::MomentMatched}) {
      const auto c = ScalingConstants::for_model(*m, 25, convention);
      const Ensemble ens(m, c, 2000, 1.2, 14);
      for (const MomentSpec& s :
           {MomentSpec{{1.0}, {{0.5, -1.0}}}, MomentSpec{{0.4, 1.0}, {{1.0, 0.0}, {0.0, 2.0}}},
            MomentSpec{{0.2, 0.6, 1.2}, {{0.0, 0.0}, {1.0, 1.0}, {-2.0, 0.5}}}}) {
        const auto id = rpoint_identity(ens, s);
        EXPECT_LE(id.relative_error, 1e-9);
      }
      const double k[] = {0.5, -1.0};
      const double u[] = {k[0] / (c.c2 * 5.0), k[1] / (c.c2 * 5.0)};
      const Complex closed = lattice_exact_moment(*m, c, MomentSpec{{1.0}, {{0.5, -1.0}}});
      EXPECT_NEAR(closed.real(), c.c1 * c.c3 * std::pow(step_char(m->kernel, u), 25), 1e-14);
      const std::uint64_t gens[] = {25};
      const std::vector<std::vector<double>> freqs{{u[0], u[1]}};
      OracleBudget budget;
      budget.max_total_generations = 100;
      const Complex bhat = exact_small_oracle(m->law, m->kernel, gens, freqs, budget);
      EXPECT_NEAR(std::abs(c.c1 * c.c3 * bhat - closed), 0.0, 1e-13);
    }
  }
}

TEST(RPointIdentity, ZeroFrequencyIsFirstMoment) {
  const auto ens = ensemble(30, 4000, 1.0, 15);
  const auto id = rpoint_identity(ens, spec({1.0}, {0.0}));
  double mean_z = 0.0;
  for (std::uint64_t i = 0; i < ens.replicates(); ++i) mean_z += double(ens.trajectory(i).total_count(30));
  mean_z /= double(ens.replicates());
  EXPECT_NEAR(id.lhs.value.real(), mean_z, 1e-12);
  EXPECT_NEAR(id.rhs.value.real(), mean_z, 1e-12);
}

TEST(LatticeExact, SecondMomentFormula) {
  const auto m = model();
  const auto c = ScalingConstants::for_model(*m, 200);
  EXPECT_NEAR(lattice_exact_moment(*m, c, spec({1.0, 1.0}, {0.0, 0.0})).real(), 1.005, 1e-12);
  const auto geo = model(OffspringLaw::geometric());
  const auto cm = ScalingConstants::for_model(*geo, 40, ConstantConvention::MomentMatched);
  // c3 c1^2 E[Z_m^2] / n = gamma (1 + gamma m) / (gamma^2 n).
  EXPECT_NEAR(lattice_exact_moment(*geo, cm, spec({1.0, 1.0}, {0.0, 0.0})).real(),
              (1.0 + 2.0 * 40) / (2.0 * 40), 1e-12);
}
