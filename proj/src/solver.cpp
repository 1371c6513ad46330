#include "bftavail/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "bftavail/errors.hpp"

namespace bftavail {

namespace {

constexpr double kNullSpaceTolerance = 1e-10;
constexpr double kMaxCondition = 1e14;
constexpr double kNegativeNoise = 1e-12;
constexpr double kNormalizationTolerance = 1e-10;
constexpr double kResidualTolerance = 1e-9;

std::string describe(const Scenario& s) {
  return fmt::format("N={} h={} f={}", s.config.n_servers, s.honest_count, s.byzantine_count);
}

// Sign-fix, clamp numeric noise, renormalize, then check every invariant a
// stationary distribution must satisfy.
StationaryDistribution finalize(const GeneratorMatrix& q, Eigen::VectorXd v,
                                std::string_view solver) {
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  if (v[largest] < 0.0) v = -v;

  const double total = v.sum();
  if (!std::isfinite(total) || total <= 0.0) {
    throw SolverError(fmt::format("{} solver produced a degenerate vector for {}", solver,
                                  describe(q.scenario())));
  }
  v /= total;
  if (v.minCoeff() < -kNegativeNoise) {
    throw SolverError(fmt::format("{} solver produced negative probability {} for {}", solver,
                                  v.minCoeff(), describe(q.scenario())));
  }
  v = v.cwiseMax(0.0);
  v /= v.sum();

  std::vector<double> probabilities(v.data(), v.data() + v.size());
  StationaryDistribution result(q.scenario(), std::move(probabilities));

  double sum = 0.0;
  for (double p : result.probabilities()) sum += p;
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw SolverError(fmt::format("{} solver: probabilities sum to {} for {}", solver, sum,
                                  describe(q.scenario())));
  }
  const double residual = residual_norm(q, result);
  if (residual > kResidualTolerance * q.max_row_scale()) {
    throw SolverError(fmt::format("{} solver: residual {} too large for {}", solver, residual,
                                  describe(q.scenario())));
  }
  return result;
}

using ColMajorSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Hager's estimate of ||A^-1||_1 from an existing factorization.
template <typename Lu>
double inverse_one_norm_estimate(Lu& lu, Eigen::Index n) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  Eigen::Index previous = -1;
  for (int iteration = 0; iteration < 5; ++iteration) {
    const Eigen::VectorXd y = lu.solve(x);
    estimate = y.lpNorm<1>();
    const Eigen::VectorXd signs = y.unaryExpr([](double value) { return value >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lu.transpose().solve(signs);
    Eigen::Index j = 0;
    const double z_max = z.cwiseAbs().maxCoeff(&j);
    if (z_max <= z.dot(x) || j == previous) break;
    x.setZero();
    x[j] = 1.0;
    previous = j;
  }
  return estimate;
}

}  // namespace

StationaryDistribution::StationaryDistribution(Scenario scenario, std::vector<double> probabilities)
    : scenario_(scenario), probabilities_(std::move(probabilities)) {}

double StationaryDistribution::at(StateIndex state) const {
  return probabilities_[flat_index(scenario_, state)];
}

double StationaryDistribution::honest_marginal(int honest_up) const {
  double total = 0.0;
  for (int j = 0; j <= scenario_.byzantine_count; ++j) total += at({honest_up, j});
  return total;
}

SolverKind SolverPolicy::select(std::size_t states) const {
  switch (mode) {
    case Mode::kSvd:
      return SolverKind::kSvd;
    case Mode::kReplacedEquation:
      return SolverKind::kReplacedEquation;
    case Mode::kAuto:
      break;
  }
  return states <= svd_state_limit ? SolverKind::kSvd : SolverKind::kReplacedEquation;
}

SolverPolicy parse_solver_policy(std::string_view name) {
  SolverPolicy policy;
  if (name == "auto") {
    policy.mode = SolverPolicy::Mode::kAuto;
  } else if (name == "svd") {
    policy.mode = SolverPolicy::Mode::kSvd;
  } else if (name == "replaced") {
    policy.mode = SolverPolicy::Mode::kReplacedEquation;
  } else {
    throw DomainError(fmt::format("unknown solver '{}'", name));
  }
  return policy;
}

StationaryDistribution solve_svd(const GeneratorMatrix& q) {
  const auto n = static_cast<Eigen::Index>(q.dimension());
  if (n == 1) return StationaryDistribution(q.scenario(), {1.0});

  Eigen::BDCSVD<Eigen::MatrixXd> svd(q.dense(), Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma[0];
  if (sigma[n - 1] > kNullSpaceTolerance * sigma_max) {
    throw SolverError(fmt::format("coefficient matrix is not singular (sigma_min/sigma_max = {}) for {}",
                                  sigma[n - 1] / sigma_max, describe(q.scenario())));
  }
  if (sigma[n - 2] < kNullSpaceTolerance * sigma_max) {
    throw SolverError(fmt::format("null space is not one-dimensional for {}", describe(q.scenario())));
  }
  return finalize(q, svd.matrixV().col(n - 1), "svd");
}

StationaryDistribution solve_replaced_equation(const GeneratorMatrix& q) {
  const auto n = static_cast<Eigen::Index>(q.dimension());
  if (n == 1) return StationaryDistribution(q.scenario(), {1.0});

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(q.balance().nonZeros() + n));
  const auto& balance = q.balance();
  for (Eigen::Index r = 0; r < n - 1; ++r) {
    for (GeneratorMatrix::Sparse::InnerIterator it(balance, r); it; ++it) {
      entries.emplace_back(r, it.col(), it.value());
    }
  }
  for (Eigen::Index c = 0; c < n; ++c) entries.emplace_back(n - 1, c, 1.0);

  ColMajorSparse system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();

  Eigen::SparseLU<ColMajorSparse, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    throw SolverError(fmt::format("replaced-equation system is singular for {}: {}",
                                  describe(q.scenario()), lu.lastErrorMessage()));
  }

  double system_norm = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) system_norm = std::max(system_norm, system.col(c).cwiseAbs().sum());
  const double condition = system_norm * inverse_one_norm_estimate(lu, n);
  if (!std::isfinite(condition) || condition > kMaxCondition) {
    throw SolverError(fmt::format("replaced-equation system is ill-conditioned (estimate {:.3g}) for {}",
                                  condition, describe(q.scenario())));
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::VectorXd solution = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw SolverError(fmt::format("replaced-equation back-substitution failed for {}", describe(q.scenario())));
  }
  return finalize(q, std::move(solution), "replaced-equation");
}

StationaryDistribution solve(const GeneratorMatrix& q, const SolverPolicy& policy) {
  switch (policy.select(q.dimension())) {
    case SolverKind::kSvd:
      return solve_svd(q);
    case SolverKind::kReplacedEquation:
      return solve_replaced_equation(q);
  }
  return solve_replaced_equation(q);
}

double residual_norm(const GeneratorMatrix& q, const StationaryDistribution& p) {
  const Eigen::Map<const Eigen::VectorXd> v(p.probabilities().data(),
                                            static_cast<Eigen::Index>(p.size()));
  const Eigen::VectorXd r = q.balance() * v;
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace bftavail
