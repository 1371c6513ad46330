#include "bftavail/ctmc_model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "bftavail/errors.hpp"

namespace bftavail {

void SystemConfig::validate() const {
  if (n_servers < 4) {
    throw DomainError(fmt::format("cluster size must be at least 4, got {}", n_servers));
  }
  validate_rates();
}

void SystemConfig::validate_rates() const {
  if (!std::isfinite(breakdown_rate) || breakdown_rate <= 0.0) {
    throw DomainError(fmt::format("breakdown rate must be positive, got {}", breakdown_rate));
  }
  if (!std::isfinite(repair_rate) || repair_rate <= 0.0) {
    throw DomainError(fmt::format("repair rate must be positive, got {}", repair_rate));
  }
}

SystemConfig make_config(int n_servers, double breakdown_rate, double repair_rate) {
  SystemConfig config{n_servers, breakdown_rate, repair_rate};
  config.validate();
  return config;
}

Scenario build_scenario(const SystemConfig& config, int byzantine_count) {
  config.validate();
  if (byzantine_count < 0 || byzantine_count > config.n_servers) {
    throw DomainError(fmt::format("Byzantine count {} outside [0, {}]", byzantine_count,
                                  config.n_servers));
  }
  return Scenario{config, byzantine_count, config.n_servers - byzantine_count};
}

std::size_t state_count(const Scenario& scenario) {
  return static_cast<std::size_t>(scenario.honest_count + 1) *
         static_cast<std::size_t>(scenario.byzantine_count + 1);
}

std::size_t flat_index(const Scenario& scenario, StateIndex state) {
  return static_cast<std::size_t>(state.honest_up) *
             static_cast<std::size_t>(scenario.byzantine_count + 1) +
         static_cast<std::size_t>(state.byzantine_up);
}

StateIndex state_at(const Scenario& scenario, std::size_t flat) {
  const auto width = static_cast<std::size_t>(scenario.byzantine_count + 1);
  return StateIndex{static_cast<int>(flat / width), static_cast<int>(flat % width)};
}

GeneratorMatrix::GeneratorMatrix(Scenario scenario, Sparse balance)
    : scenario_(scenario), balance_(std::move(balance)) {
  balance_.makeCompressed();
}

Eigen::MatrixXd GeneratorMatrix::dense() const { return Eigen::MatrixXd(balance_); }

double GeneratorMatrix::coefficient(std::size_t row, std::size_t col) const {
  return balance_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

GeneratorMatrix::Sparse GeneratorMatrix::rate_generator() const {
  Sparse g = -Sparse(balance_.transpose());
  g.makeCompressed();
  return g;
}

double GeneratorMatrix::max_conservation_error() const {
  // Row sums of the rate generator are column sums of the balance matrix.
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(balance_.cols());
  for (Eigen::Index r = 0; r < balance_.outerSize(); ++r) {
    for (Sparse::InnerIterator it(balance_, r); it; ++it) col_sums[it.col()] += it.value();
  }
  return col_sums.size() == 0 ? 0.0 : col_sums.cwiseAbs().maxCoeff();
}

double GeneratorMatrix::max_row_scale() const {
  double scale = 0.0;
  for (Eigen::Index r = 0; r < balance_.outerSize(); ++r) {
    double row = 0.0;
    for (Sparse::InnerIterator it(balance_, r); it; ++it) row += std::abs(it.value());
    scale = std::max(scale, row);
  }
  return scale;
}

std::size_t GeneratorMatrix::max_nonzeros_per_row() const {
  std::size_t most = 0;
  for (Eigen::Index r = 0; r < balance_.outerSize(); ++r) {
    std::size_t count = 0;
    for (Sparse::InnerIterator it(balance_, r); it; ++it) {
      if (it.value() != 0.0) ++count;
    }
    most = std::max(most, count);
  }
  return most;
}

bool GeneratorMatrix::strongly_connected() const {
  const auto n = static_cast<std::size_t>(balance_.rows());
  if (n <= 1) return true;

  // Balance row r lists in-flows c -> r; build both edge directions once.
  std::vector<std::vector<std::size_t>> forward(n), backward(n);
  for (Eigen::Index r = 0; r < balance_.outerSize(); ++r) {
    for (Sparse::InnerIterator it(balance_, r); it; ++it) {
      if (it.col() == r || it.value() == 0.0) continue;
      forward[static_cast<std::size_t>(it.col())].push_back(static_cast<std::size_t>(r));
      backward[static_cast<std::size_t>(r)].push_back(static_cast<std::size_t>(it.col()));
    }
  }

  auto reaches_all = [n](const std::vector<std::vector<std::size_t>>& adjacency) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t visited = 1;
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (auto v : adjacency[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++visited;
          frontier.push(v);
        }
      }
    }
    return visited == n;
  };
  return reaches_all(forward) && reaches_all(backward);
}

void GeneratorMatrix::write_triplets(std::ostream& out) const {
  for (Eigen::Index r = 0; r < balance_.outerSize(); ++r) {
    for (Sparse::InnerIterator it(balance_, r); it; ++it) {
      out << fmt::format("{} {} {:.17g}\n", r, it.col(), it.value());
    }
  }
}

GeneratorMatrix build_generator(const Scenario& scenario) {
  scenario.config.validate_rates();
  const int h = scenario.honest_count;
  const int f = scenario.byzantine_count;
  if (h < 0 || f < 0 || h + f < 1 || h + f != scenario.config.n_servers) {
    throw DomainError(fmt::format("inconsistent scenario h={} f={} N={}", h, f,
                                  scenario.config.n_servers));
  }
  const double xi = scenario.config.breakdown_rate;
  const double eta = scenario.config.repair_rate;
  const auto n = static_cast<Eigen::Index>(state_count(scenario));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) * 5);

  for (int i = 0; i <= h; ++i) {
    for (int j = 0; j <= f; ++j) {
      const auto row = static_cast<Eigen::Index>(flat_index(scenario, {i, j}));
      auto col = [&](int a, int b) {
        return static_cast<Eigen::Index>(flat_index(scenario, {a, b}));
      };

      // A repair is possible in each dimension that still has a node down.
      const int repairs = (i < h ? 1 : 0) + (j < f ? 1 : 0);
      entries.emplace_back(row, row, repairs * eta + (i + j) * xi);

      if (j > 0) entries.emplace_back(row, col(i, j - 1), -eta);
      if (i > 0) entries.emplace_back(row, col(i - 1, j), -eta);
      if (i < h) entries.emplace_back(row, col(i + 1, j), -(i + 1) * xi);
      if (j < f) entries.emplace_back(row, col(i, j + 1), -(j + 1) * xi);
    }
  }

  GeneratorMatrix::Sparse balance(n, n);
  balance.setFromTriplets(entries.begin(), entries.end());
  return GeneratorMatrix(scenario, std::move(balance));
}

}  // namespace bftavail
