#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bftavail/ctmc_model.hpp"

namespace bftavail {

// A transition rate of the form xi_multiplier * xi + eta_multiplier * eta.
// Kept symbolic so rate tables can be compared exactly.
struct RateTerm {
  int xi_multiplier = 0;
  int eta_multiplier = 0;

  double value(const SystemConfig& config) const {
    return xi_multiplier * config.breakdown_rate + eta_multiplier * config.repair_rate;
  }
  friend bool operator==(const RateTerm&, const RateTerm&) = default;
};

struct Transition {
  StateIndex target;
  RateTerm rate;
};

// Every transition out of `state`: honest and Byzantine breakdowns at i*xi
// and j*xi, and one repair at eta per dimension with a node down.
std::vector<Transition> transitions_from(const Scenario& scenario, StateIndex state);

struct SimConfig {
  Scenario scenario;
  double horizon = 1e5;
  // Time discarded before accumulating; defaults to 1% of the horizon.
  std::optional<double> warmup;
  std::uint64_t seed = 1;
  int replications = 10;
  // Honest-up count that counts as available; defaults to quorum_threshold(N).
  std::optional<int> threshold;
  // Worker threads across replications; 0 uses the hardware concurrency.
  unsigned jobs = 0;

  double effective_warmup() const { return warmup.value_or(0.01 * horizon); }
  // Throws DomainError on a non-positive horizon, warmup outside [0, horizon)
  // or fewer than one replication.
  void validate() const;
};

struct SimEstimate {
  double mean_availability = 0.0;
  // Sample standard deviation of the replication values over sqrt(reps).
  double standard_error = 0.0;
  std::vector<double> replication_values;
};

// Event-driven simulation of the availability CTMC starting from the all-up
// state. Each replication draws from its own stream derived from
// (seed, replication index), so results do not depend on scheduling.
SimEstimate simulate(const SimConfig& config);

}  // namespace bftavail
