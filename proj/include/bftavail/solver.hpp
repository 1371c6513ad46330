#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "bftavail/ctmc_model.hpp"

namespace bftavail {

// Normalized stationary probabilities over the flattened state lattice.
class StationaryDistribution {
 public:
  StationaryDistribution(Scenario scenario, std::vector<double> probabilities);

  const Scenario& scenario() const { return scenario_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  std::size_t size() const { return probabilities_.size(); }

  double at(StateIndex state) const;
  double operator[](std::size_t flat) const { return probabilities_[flat]; }

  // Marginal probability that exactly `honest_up` honest nodes are up.
  double honest_marginal(int honest_up) const;

 private:
  Scenario scenario_;
  std::vector<double> probabilities_;
};

enum class SolverKind { kSvd, kReplacedEquation };

// Auto picks SVD up to svd_state_limit states and the replaced-equation
// solver above it.
struct SolverPolicy {
  enum class Mode { kAuto, kSvd, kReplacedEquation } mode = Mode::kAuto;
  std::size_t svd_state_limit = 2500;

  SolverKind select(std::size_t states) const;
};

SolverPolicy parse_solver_policy(std::string_view name);

// Right-singular vector of the smallest singular value, sign-fixed and
// normalized. Throws SolverError if the null space is not one-dimensional.
StationaryDistribution solve_svd(const GeneratorMatrix& q);

// Replaces the last balance equation with sum(P) = 1 and solves the
// resulting non-singular system by sparse LU. Throws SolverError if the
// condition estimate exceeds 1e14.
StationaryDistribution solve_replaced_equation(const GeneratorMatrix& q);

StationaryDistribution solve(const GeneratorMatrix& q, const SolverPolicy& policy = {});

// ||Q P||_inf
double residual_norm(const GeneratorMatrix& q, const StationaryDistribution& p);

}  // namespace bftavail
