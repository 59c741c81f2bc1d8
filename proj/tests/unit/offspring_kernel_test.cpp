// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rpoint/error.hpp"
#include "rpoint/kernel.hpp"
#include "rpoint/offspring.hpp"

using namespace rpoint;

namespace {

// Mean and variance straight from the table, with long double accumulation.
std::pair<double, double> table_moments(std::span<const double> pmf) {
  long double m = 0, m2 = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    m += j * static_cast<long double>(pmf[j]);
    m2 += static_cast<long double>(j) * j * pmf[j];
  }
  return {static_cast<double>(m), static_cast<double>(m2 - m * m)};
}

}  // namespace

TEST(OffspringLaw, BuiltinsAreCritical) {
  struct Case {
    OffspringLaw law;
    double gamma;
  };
  const std::vector<Case> cases{{OffspringLaw::binary(), 1.0},
                                {OffspringLaw::poisson_one(), 1.0},
                                {OffspringLaw::geometric(), 2.0}};
  for (const auto& c : cases) {
    const auto [mean, var] = table_moments(c.law.pmf());
    EXPECT_NEAR(mean, 1.0, 1e-12) << to_string(c.law.kind());
    EXPECT_NEAR(var, c.gamma, 1e-12) << to_string(c.law.kind());
    EXPECT_NEAR(c.law.mean(), 1.0, 1e-12);
    EXPECT_NEAR(c.law.variance(), c.gamma, 1e-12);
    double total = 0.0;
    for (double p : c.law.pmf()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(OffspringLaw, FactorialMoments) {
  const auto b = OffspringLaw::binary();
  EXPECT_DOUBLE_EQ(b.factorial_moment(0), 1.0);
  EXPECT_DOUBLE_EQ(b.factorial_moment(1), 1.0);
  EXPECT_DOUBLE_EQ(b.factorial_moment(2), 1.0);
  EXPECT_DOUBLE_EQ(b.factorial_moment(3), 0.0);
  // Poisson(1): every factorial moment is 1.
  const auto p = OffspringLaw::poisson_one();
  for (unsigned q = 0; q <= 5; ++q) EXPECT_NEAR(p.factorial_moment(q), 1.0, 1e-12);
  // Geometric p(j) = 2^-(j+1): E[(xi)_q] = q!.
  const auto g = OffspringLaw::geometric();
  EXPECT_NEAR(g.factorial_moment(2), 2.0, 1e-12);
  EXPECT_NEAR(g.factorial_moment(3), 6.0, 1e-9);
}

TEST(OffspringLaw, CustomValidation) {
  EXPECT_THROW(OffspringLaw::custom({0.5, 0.5}), DomainError);            // mean 1/2
  EXPECT_THROW(OffspringLaw::custom({0.6, 0.0, 0.6}), DomainError);       // sum 1.2
  EXPECT_THROW(OffspringLaw::custom({-0.1, 1.2, -0.1}), DomainError);     // negative
  EXPECT_THROW(OffspringLaw::custom({0.0, 1.0}), DomainError);            // degenerate
  EXPECT_NO_THROW(OffspringLaw::custom({0.0, 1.0}, LawMode::Test));
  EXPECT_THROW(OffspringLaw::custom(std::vector<double>(66, 0.0)), DomainError);
  const auto law = OffspringLaw::custom({0.25, 0.5, 0.25});
  EXPECT_NEAR(law.variance(), 0.5, 1e-15);
}

TEST(OffspringLaw, InverseCdfUsesOneDraw) {
  const auto law = OffspringLaw::geometric();
  ReplicateStream s(3, 1, 0);
  for (int i = 0; i < 100; ++i) law.sample(s);
  EXPECT_EQ(s.draws(), 100u);
}

TEST(OffspringLaw, SampleFrequencies) {
  const auto law = OffspringLaw::custom({0.25, 0.5, 0.25});
  ReplicateStream s(4, 1, 0);
  const int count = 100000;
  std::array<int, 3> hist{};
  for (int i = 0; i < count; ++i) ++hist[law.sample(s)];
  for (int j = 0; j < 3; ++j) {
    const double p = law.pmf()[j];
    EXPECT_NEAR(hist[j] / double(count), p, 4.0 * std::sqrt(p * (1 - p) / count));
  }
}

TEST(StepChar, Examples) {
  const auto nn1 = StepKernel::nearest_neighbor(1);
  const auto nn2 = StepKernel::nearest_neighbor(2);
  const double zero[] = {0.0};
  const double half_pi[] = {std::numbers::pi / 2};
  const double pi_pi[] = {std::numbers::pi, std::numbers::pi};
  EXPECT_DOUBLE_EQ(step_char(nn1, zero), 1.0);
  EXPECT_NEAR(step_char(nn1, half_pi), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(step_char(nn2, pi_pi), -1.0);
  EXPECT_THROW(step_char(nn2, zero), DomainError);
}

TEST(StepChar, BoxMatchesDirectSum) {
  for (int d : {1, 2}) {
    for (int L : {1, 2}) {
      const auto box = StepKernel::spread_out_box(d, L);
      const std::vector<double> u = d == 1 ? std::vector<double>{0.7} : std::vector<double>{0.7, -1.3};
      double sum = 0.0;
      double sq = 0.0;
      int size = 0;
      for (int a = -L; a <= L; ++a) {
        for (int b = (d == 2 ? -L : 0); b <= (d == 2 ? L : 0); ++b) {
          if (a == 0 && b == 0) continue;
          sum += std::cos(u[0] * a + (d == 2 ? u[1] * b : 0.0));
          sq += a * a;
          ++size;
        }
      }
      EXPECT_NEAR(step_char(box, u), sum / size, 1e-14) << d << " " << L;
      EXPECT_NEAR(box.per_coordinate_variance(), sq / size, 1e-14);
    }
  }
}

TEST(StepChar, SymmetricAndBounded) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  const StepKernel kernels[] = {StepKernel::nearest_neighbor(1), StepKernel::nearest_neighbor(3),
                                StepKernel::spread_out_box(1, 3), StepKernel::spread_out_box(3, 2)};
  for (const auto& k : kernels) {
    std::vector<double> u(static_cast<std::size_t>(k.dimension()));
    std::vector<double> minus(u.size());
    for (int i = 0; i < 10000; ++i) {
      for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = unif(gen);
        minus[j] = -u[j];
      }
      const double v = step_char(k, u);
      ASSERT_EQ(v, step_char(k, minus));
      ASSERT_LE(std::abs(v), 1.0 + 1e-15);
    }
  }
}

TEST(StepKernel, SamplesStayInSupport) {
  const auto box = StepKernel::spread_out_box(2, 2);
  ReplicateStream s(8, 1, 0);
  std::vector<std::int64_t> step(2);
  double sq = 0.0;
  const int count = 50000;
  for (int i = 0; i < count; ++i) {
    box.sample(s, step);
    ASSERT_FALSE(step[0] == 0 && step[1] == 0);
    ASSERT_LE(std::abs(step[0]), 2);
    ASSERT_LE(std::abs(step[1]), 2);
    sq += double(step[0] * step[0]);
  }
  // Coordinate variance 2*(1+4)*5/24 = 50/24; fourth moment bounded by 16.
  EXPECT_NEAR(sq / count, box.per_coordinate_variance(), 4.0 * std::sqrt(16.0 / count));

  const auto nn = StepKernel::nearest_neighbor(3);
  std::vector<std::int64_t> unit(3);
  for (int i = 0; i < 1000; ++i) {
    nn.sample(s, unit);
    ASSERT_EQ(std::abs(unit[0]) + std::abs(unit[1]) + std::abs(unit[2]), 1);
  }
}
