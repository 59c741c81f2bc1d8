// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "rpoint/csbm.hpp"

using namespace rpoint;
using csbm::MomentSpec;
using csbm::Complex;

namespace {

MomentSpec spec(std::vector<double> t, std::vector<double> k) {
  MomentSpec s;
  s.times = std::move(t);
  for (double kk : k) s.frequencies.push_back({kk});
  return s;
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

// Integrand with the density factored out, zero where the density underflows.
double weighted_density(double b, double x, const std::function<double(double)>& g) {
  if (!(x > 0.0)) return 0.0;
  const double d = csbm::mass_density(b, x);
  return d == 0.0 ? 0.0 : g(x) * d;
}

// Independent d = 1 evaluation of the branching recursion up to three
// factors, with every level integrated numerically by Gauss-Kronrod.
double m1(double t, double k) { return std::exp(-k * k * t / 2); }

double m2(double t1, double t2, double k1, double k2) {
  const double K = k1 + k2;
  return gk([&](double s) { return std::exp(-K * K * s / 2) * m1(t1 - s, k1) * m1(t2 - s, k2); },
            0.0, std::min(t1, t2));
}

double m3(const std::array<double, 3>& t, const std::array<double, 3>& k) {
  const double K = k[0] + k[1] + k[2];
  const double upper = std::min({t[0], t[1], t[2]});
  return gk(
      [&](double s) {
        double splits = 0.0;
        for (int i = 0; i < 3; ++i) {
          const int a = (i + 1) % 3;
          const int b = (i + 2) % 3;
          splits += m1(t[i] - s, k[i]) * m2(t[a] - s, t[b] - s, k[a], k[b]);
        }
        return std::exp(-K * K * s / 2) * splits;
      },
      0.0, upper);
}

}  // namespace

TEST(MassLaw, Examples) {
  EXPECT_NEAR(csbm::mass_density(2.0, 1e-300), 1.0, 1e-15);
  EXPECT_NEAR(csbm::mass_tail(1.0, 0.5), 2.0 * std::exp(-1.0), 1e-15);
  for (double b : {0.5, 1.0, 2.0}) EXPECT_DOUBLE_EQ(csbm::mass_tail(b, 0.0), csbm::survival_mass(b));
  EXPECT_THROW(csbm::mass_density(0.0, 1.0), DomainError);
  EXPECT_THROW(csbm::mass_tail(-1.0, 1.0), DomainError);
  EXPECT_THROW(csbm::mass_tail(1.0, -1.0), DomainError);
}

TEST(MassLaw, TailIsIntegralOfDensity) {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double b : {0.5, 1.0, 3.0}) {
    for (double lambda : {0.0, 0.25, 2.0}) {
      const double integral = integrator.integrate(
          [&](double x) { return weighted_density(b, lambda + x, [](double) { return 1.0; }); }, 0.0,
          std::numeric_limits<double>::infinity());
      EXPECT_NEAR(csbm::mass_tail(b, lambda), integral, 1e-12);
    }
  }
}

TEST(SurvivalMass, Examples) {
  EXPECT_DOUBLE_EQ(csbm::survival_mass(2.0), 1.0);
  EXPECT_DOUBLE_EQ(csbm::survival_mass(0.5), 4.0);
  EXPECT_DOUBLE_EQ(csbm::survival_mass(1.0), 2.0);
  EXPECT_THROW(csbm::survival_mass(0.0), DomainError);
}

TEST(MassMoment, ExamplesAndIntegral) {
  EXPECT_DOUBLE_EQ(csbm::mass_moment(0.3, 1), 1.0);
  EXPECT_DOUBLE_EQ(csbm::mass_moment(1.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(csbm::mass_moment(2.0, 3), 6.0);
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double b : {0.5, 1.5}) {
    for (int p = 1; p <= 5; ++p) {
      const double integral = integrator.integrate(
          [&](double x) { return weighted_density(b, x, [p](double y) { return std::pow(y, p); }); }, 0.0,
          std::numeric_limits<double>::infinity());
      EXPECT_NEAR(csbm::mass_moment(b, p), integral, 1e-10 * csbm::mass_moment(b, p));
    }
  }
}

TEST(ExpMoment, ExamplesAndDivergence) {
  EXPECT_DOUBLE_EQ(csbm::exp_moment_truncated(1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(csbm::exp_moment_truncated(1.0, 1.0), 4.0);
  EXPECT_THROW(csbm::exp_moment_truncated(1.0, 2.0), DivergenceError);
  EXPECT_THROW(csbm::exp_moment_truncated(0.5, 5.0), DivergenceError);
  EXPECT_THROW(csbm::exp_moment_truncated(0.0, 0.0), DomainError);
}

TEST(ExpMoment, MatchesNumericalIntegration) {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double eps : {0.25, 0.5, 1.0, 2.0}) {
    for (double frac : {-1.0, 0.0, 0.25, 0.5, 0.75}) {
      const double theta = frac * 2.0 / eps;  // up to 1.5 / eps
      const double integral = integrator.integrate(
          [&](double x) {
            return weighted_density(eps, x, [theta](double y) { return std::exp(theta * y); });
          }, 0.0,
          std::numeric_limits<double>::infinity());
      EXPECT_NEAR(csbm::exp_moment_truncated(eps, theta), integral, 1e-9) << eps << " " << theta;
    }
  }
}

TEST(MomentFunction, Examples) {
  EXPECT_EQ(csbm::moment_function(spec({0.7}, {0.0})), Complex(1.0, 0.0));
  EXPECT_NEAR(csbm::moment_function(spec({0.7}, {1.2})).real(), std::exp(-1.44 * 0.35), 1e-15);
  EXPECT_NEAR(csbm::moment_function(spec({0.3, 0.8}, {0.0, 0.0})).real(), 0.3, 1e-9);
  EXPECT_NEAR(csbm::moment_function(spec({0.8, 0.3}, {0.0, 0.0})).real(), 0.3, 1e-9);
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(csbm::moment_function(spec({t, t, t}, {0, 0, 0})).real(), 1.5 * t * t, 1e-7);
  }
  EXPECT_THROW(csbm::moment_function(spec({1.0, 0.0}, {0.0, 0.0})), DomainError);
  MomentSpec ragged = spec({1.0, 1.0}, {0.0, 0.0});
  ragged.frequencies[1].push_back(1.0);
  EXPECT_THROW(csbm::moment_function(ragged), DomainError);
}

TEST(MomentFunction, MatchesMassMoments) {
  for (double b : {0.5, 1.0, 2.0}) {
    for (int l = 1; l <= 4; ++l) {
      const auto s = spec(std::vector<double>(l, b), std::vector<double>(l, 0.0));
      EXPECT_NEAR(csbm::moment_function(s).real(), csbm::mass_moment(b, l), 1e-6)
          << "b=" << b << " l=" << l;
    }
  }
}

TEST(MomentFunction, MatchesIndependentQuadrature) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> two{
      {{1.0, 1.0}, {1.0, -1.0}}, {{0.4, 1.3}, {0.7, 0.2}}, {{2.0, 0.9}, {-1.5, 0.5}}};
  for (const auto& [t, k] : two) {
    const Complex v = csbm::moment_function(spec(t, k));
    EXPECT_NEAR(v.real(), m2(t[0], t[1], k[0], k[1]), 1e-9);
    EXPECT_EQ(v.imag(), 0.0);
  }
  const std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>> three{
      {{1.0, 1.0, 1.0}, {0.5, -0.2, 0.9}}, {{0.5, 1.2, 0.8}, {1.0, 0.0, -1.0}}};
  for (const auto& [t, k] : three) {
    const Complex v = csbm::moment_function(spec({t[0], t[1], t[2]}, {k[0], k[1], k[2]}));
    EXPECT_NEAR(v.real(), m3(t, k), 1e-7);
  }
}

TEST(MomentFunction, HigherDimensionUsesEuclideanNorm) {
  MomentSpec s;
  s.times = {1.0, 0.6};
  s.frequencies = {{0.6, 0.8}, {0.0, -0.8}};
  // |k1|^2 = 1, |k2|^2 = 0.64, |k1 + k2|^2 = 0.36.
  const double expected = gk(
      [](double u) {
        return std::exp(-0.36 * u / 2) * std::exp(-(1.0 - u) / 2) * std::exp(-0.64 * (0.6 - u) / 2);
      },
      0.0, 0.6);
  EXPECT_NEAR(csbm::moment_function(s).real(), expected, 1e-9);
}

TEST(MomentFunction, SymmetriesAndDominance) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> time(0.2, 1.5);
  std::uniform_real_distribution<double> freq(-2.0, 2.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int l = 2 + trial % 3;
    std::vector<double> t(l), k(l), minus(l), zero(l, 0.0);
    for (int i = 0; i < l; ++i) {
      t[i] = time(gen);
      k[i] = freq(gen);
      minus[i] = -k[i];
    }
    const Complex base = csbm::moment_function(spec(t, k));
    const Complex conj = csbm::moment_function(spec(t, minus));
    EXPECT_NEAR(std::abs(conj - std::conj(base)), 0.0, 1e-8);
    std::vector<double> tr(t.rbegin(), t.rend()), kr(k.rbegin(), k.rend());
    EXPECT_NEAR(std::abs(csbm::moment_function(spec(tr, kr)) - base), 0.0, 1e-8);
    std::vector<double> tp = t, kp = k;
    std::swap(tp[0], tp[1]);
    std::swap(kp[0], kp[1]);
    EXPECT_NEAR(std::abs(csbm::moment_function(spec(tp, kp)) - base), 0.0, 1e-8);
    EXPECT_LE(std::abs(base), csbm::moment_function(spec(t, zero)).real() + 1e-8);
  }
}

TEST(MomentFunction, UnreachableToleranceThrows) {
  QuadratureConfig quad;
  quad.abs_tolerance = 1e-300;
  quad.max_depth = 3;
  EXPECT_THROW(csbm::moment_function(spec({1.0, 1.0, 1.0}, {1.0, 2.0, -0.5}), quad),
               QuadratureError);
}
