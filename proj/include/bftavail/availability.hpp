#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bftavail/ctmc_model.hpp"
#include "bftavail/fault_distributions.hpp"
#include "bftavail/solver.hpp"

namespace bftavail {

// Smallest i with i > 2N/3, i.e. floor(2N/3) + 1. Throws DomainError for N < 4.
int quorum_threshold(int n);

// Largest f with f < N/3, i.e. ceil(N/3) - 1. Throws DomainError for N < 4.
int max_tolerated_faults(int n);

struct AvailabilityResult {
  Scenario scenario;
  double availability = 0.0;
};

// Stationary mass of the states with at least quorum_threshold(N) honest
// nodes up, summed over every Byzantine state.
AvailabilityResult availability(const StationaryDistribution& dist);

// Same sum with an explicit threshold on honest nodes up.
double availability_above(const StationaryDistribution& dist, int threshold);

struct EvaluationOptions {
  SolverPolicy policy{};
  // Worker threads for independent solves; 0 uses the hardware concurrency.
  unsigned jobs = 0;
};

// A_{N-f,f} for one scenario: zero without solving when no quorum state
// exists, otherwise build, solve and aggregate.
double scenario_availability(const Scenario& scenario, const SolverPolicy& policy = {});

struct FaultContribution {
  int byzantine_count = 0;
  double probability = 0.0;
  double availability = 0.0;
};

struct MeanAvailabilityResult {
  SystemConfig config;
  std::string distribution;
  double mean_availability = 0.0;
  // One entry per f in [0, N]; entries with f >= N/3 carry availability 0.
  std::vector<FaultContribution> per_f;
};

// Mean availability over a fault-count distribution on [0, N]. Mass at
// f >= N/3 counts as zero availability; it is never renormalized away.
MeanAvailabilityResult mean_availability(const SystemConfig& config,
                                         const FaultDistribution& fault_dist,
                                         const EvaluationOptions& options = {});

// Produces the distribution for a given cluster size.
struct DistributionFactory {
  std::string name;
  std::function<FaultDistribution(int)> make;
};

DistributionFactory preset_factory(const std::string& name,
                                   LocationRounding rounding = LocationRounding::kFloor);

// Table with a leading N column; values[r][c] belongs to n_values[r] and
// columns[c].
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<int> n_values;
  std::vector<std::vector<double>> values;
};

// Mean availability for every N in [n_min, n_max] and every distribution,
// with eta = 1 and xi = ratio.
SweepTable sweep_n(int n_min, int n_max, double ratio,
                   const std::vector<DistributionFactory>& fault_dists,
                   const EvaluationOptions& options = {});

// Mean availability per (N, ratio) for a single distribution; columns are
// the ratios formatted with %g.
SweepTable sweep_ratio(const std::vector<int>& n_list, const std::vector<double>& ratios,
                       const DistributionFactory& fault_dist,
                       const EvaluationOptions& options = {});

}  // namespace bftavail
