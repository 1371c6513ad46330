#pragma once

#include <cstddef>
#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bftavail {

// Cluster-wide parameters: N servers, per-node breakdown rate xi and
// repair rate eta.
struct SystemConfig {
  int n_servers = 4;
  double breakdown_rate = 0.015;
  double repair_rate = 1.0;

  // Throws DomainError unless N >= 4 and both rates are finite and positive.
  void validate() const;

  // Only the rate checks; the chain itself is well-defined for any N >= 1.
  void validate_rates() const;

  double ratio() const { return breakdown_rate / repair_rate; }

  // xi/eta >= 1 is accepted but outside the regime the model targets.
  bool high_ratio() const { return ratio() >= 1.0; }
};

// Validated constructor for SystemConfig.
SystemConfig make_config(int n_servers, double breakdown_rate, double repair_rate);

// One CTMC instance: h honest and f Byzantine nodes with h + f = N.
struct Scenario {
  SystemConfig config;
  int byzantine_count = 0;
  int honest_count = 0;
};

// Throws DomainError when f is negative or exceeds N.
Scenario build_scenario(const SystemConfig& config, int byzantine_count);

// Lattice coordinate (i honest nodes up, j Byzantine nodes up).
struct StateIndex {
  int honest_up = 0;
  int byzantine_up = 0;

  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

// (h+1)(f+1)
std::size_t state_count(const Scenario& scenario);

// Row-major flattening with i outer and j inner: flat = i*(f+1) + j.
std::size_t flat_index(const Scenario& scenario, StateIndex state);
StateIndex state_at(const Scenario& scenario, std::size_t flat);

/// Coefficient matrix of the steady-state balance equations.
///
/// Row r is the balance equation of state r and column c the unknown P_c,
/// so the stationary vector satisfies Q * P = 0. The diagonal holds the
/// total out-rate of a state and off-diagonals hold negated in-flow rates.
/// This is the transpose of the negated textbook generator; use
/// rate_generator() for the orientation whose rows sum to zero.
///
/// Storage is sparse: every row has at most five nonzeros.
class GeneratorMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  GeneratorMatrix(Scenario scenario, Sparse balance);

  const Scenario& scenario() const { return scenario_; }
  std::size_t dimension() const { return static_cast<std::size_t>(balance_.rows()); }

  const Sparse& balance() const { return balance_; }
  Eigen::MatrixXd dense() const;
  double coefficient(std::size_t row, std::size_t col) const;

  // Transition-rate generator G with G(a,b) = rate a -> b and G(a,a) = -out-rate.
  // Equals -balance()^T.
  Sparse rate_generator() const;

  // Largest |sum of a generator row|, i.e. the worst violation of flow
  // conservation. Zero up to rounding for a well-formed chain.
  double max_conservation_error() const;

  // Largest absolute row sum of balance(); used to scale residual checks.
  double max_row_scale() const;

  std::size_t max_nonzeros_per_row() const;

  // Strong connectivity of the directed graph of nonzero off-diagonals.
  bool strongly_connected() const;

  // Writes `row col value` lines in row-major order.
  void write_triplets(std::ostream& out) const;

 private:
  Scenario scenario_;
  Sparse balance_;
};

GeneratorMatrix build_generator(const Scenario& scenario);

}  // namespace bftavail
