#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bftavail/errors.hpp"
#include "bftavail/solver.hpp"
#include "oracles.hpp"

namespace bftavail {
namespace {

Scenario raw_scenario(int h, int f, double xi = 0.015, double eta = 1.0) {
  return Scenario{SystemConfig{h + f, xi, eta}, f, h};
}

double linf(const StationaryDistribution& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

void expect_valid(const GeneratorMatrix& q, const StationaryDistribution& p) {
  double sum = 0.0;
  for (double v : p.probabilities()) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_LE(residual_norm(q, p), 1e-9 * q.max_row_scale());
}

TEST(SolveSvd, TwoStateClosedForm) {
  const double xi = 0.015;
  const double eta = 1.0;
  const auto q = build_generator(raw_scenario(1, 0, xi, eta));
  const auto p = solve_svd(q);
  EXPECT_NEAR(p[0], xi / (xi + eta), 1e-14);
  EXPECT_NEAR(p[1], eta / (xi + eta), 1e-14);
  EXPECT_NEAR(p[0], 0.0147783251231527, 1e-15);
  expect_valid(q, p);
}

TEST(SolveReplaced, TwoStateClosedForm) {
  const double xi = 0.015;
  const auto p = solve_replaced_equation(build_generator(raw_scenario(1, 0, xi, 1.0)));
  EXPECT_NEAR(p[0], xi / (xi + 1.0), 1e-14);
  EXPECT_NEAR(p[1], 1.0 / (xi + 1.0), 1e-14);
}

TEST(Solvers, BirthDeathClosedFormAtZeroFaults) {
  for (int h : {4, 10, 32, 64, 128}) {
    for (double rho : {50.0, 1.0 / 0.015, 100.0}) {
      const auto q = build_generator(raw_scenario(h, 0, 1.0 / rho, 1.0));
      const auto expected = oracle::birth_death_stationary(h, rho);
      const auto svd = solve_svd(q);
      const auto replaced = solve_replaced_equation(q);
      EXPECT_LE(linf(svd, expected), 1e-10) << "h=" << h << " rho=" << rho;
      EXPECT_LE(linf(replaced, expected), 1e-10) << "h=" << h << " rho=" << rho;
      expect_valid(q, svd);
      expect_valid(q, replaced);
    }
  }
}

TEST(Solvers, ProductFormWithByzantineDimension) {
  for (auto [h, f] : {std::pair{9, 3}, std::pair{14, 2}, std::pair{21, 10}}) {
    const double ratio = 0.02;
    const auto q = build_generator(raw_scenario(h, f, ratio, 1.0));
    const auto expected = oracle::closed_form_stationary(h, f, 1.0 / ratio);
    EXPECT_LE(linf(solve_svd(q), expected), 1e-10);
    EXPECT_LE(linf(solve_replaced_equation(q), expected), 1e-10);
  }
}

TEST(Solvers, AgreeOnRandomGrid) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> cluster(4, 40);
  const double ratios[] = {0.01, 0.015, 0.02, 0.1};
  for (int trial = 0; trial < 40; ++trial) {
    const int n = cluster(rng);
    std::uniform_int_distribution<int> faults(0, (n + 2) / 3 - 1);
    const int f = faults(rng);
    const double ratio = ratios[trial % 4];
    const auto q = build_generator(raw_scenario(n - f, f, ratio, 1.0));
    const auto a = solve_svd(q);
    const auto b = solve_replaced_equation(q);
    EXPECT_LE(linf(a, b.probabilities()), 1e-10) << "N=" << n << " f=" << f;
    expect_valid(q, a);
    expect_valid(q, b);
  }
}

TEST(Solvers, ScaleInvariance) {
  for (auto [h, f] : {std::pair{6, 1}, std::pair{14, 2}, std::pair{30, 9}}) {
    const auto base = solve_replaced_equation(build_generator(raw_scenario(h, f, 0.015, 1.0)));
    const auto scaled = solve_replaced_equation(build_generator(raw_scenario(h, f, 0.15, 10.0)));
    const auto scaled_svd = solve_svd(build_generator(raw_scenario(h, f, 1.5e-4, 0.01)));
    EXPECT_LE(linf(base, scaled.probabilities()), 1e-10);
    EXPECT_LE(linf(base, scaled_svd.probabilities()), 1e-10);
  }
}

TEST(Solvers, RejectNonUniqueNullSpace) {
  // Two disconnected two-state chains: the null space is two-dimensional.
  GeneratorMatrix::Sparse m(4, 4);
  for (int block : {0, 2}) {
    m.insert(block, block) = 1.0;
    m.insert(block, block + 1) = -0.5;
    m.insert(block + 1, block + 1) = 0.5;
    m.insert(block + 1, block) = -1.0;
  }
  const GeneratorMatrix q(raw_scenario(3, 0), m);
  EXPECT_THROW(solve_svd(q), SolverError);
  EXPECT_THROW(solve_replaced_equation(q), SolverError);
}

TEST(Solvers, RejectNonSingularMatrix) {
  GeneratorMatrix::Sparse m(2, 2);
  m.insert(0, 0) = 2.0;
  m.insert(1, 1) = 1.0;
  const GeneratorMatrix q(raw_scenario(1, 0), m);
  EXPECT_THROW(solve_svd(q), SolverError);
}

TEST(SolverPolicy, SelectsBySize) {
  SolverPolicy policy;
  EXPECT_EQ(policy.select(2500), SolverKind::kSvd);
  EXPECT_EQ(policy.select(2501), SolverKind::kReplacedEquation);
  EXPECT_EQ(parse_solver_policy("svd").select(5000), SolverKind::kSvd);
  EXPECT_EQ(parse_solver_policy("replaced").select(5), SolverKind::kReplacedEquation);
  EXPECT_THROW(parse_solver_policy("lu"), DomainError);
}

TEST(StationaryDistribution, LatticeAccess) {
  const auto s = raw_scenario(3, 2, 0.02, 1.0);
  const auto p = solve(build_generator(s));
  const auto expected = oracle::closed_form_stationary(3, 2, 50.0);
  EXPECT_NEAR(p.at({2, 1}), expected[flat_index(s, {2, 1})], 1e-12);
  double marginal = 0.0;
  for (int j = 0; j <= 2; ++j) marginal += p.at({3, j});
  EXPECT_NEAR(p.honest_marginal(3), marginal, 1e-15);
}

}  // namespace
}  // namespace bftavail
