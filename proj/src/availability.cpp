#include "bftavail/availability.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "bftavail/errors.hpp"
#include "parallel.hpp"

namespace bftavail {

namespace {

void require_cluster(int n) {
  if (n < 4) throw DomainError(fmt::format("cluster size must be at least 4, got {}", n));
}

template <typename Error>
[[noreturn]] void rethrow_with_context(const Error& error, int n, int f) {
  throw Error(fmt::format("N={} f={}: {}", n, f, error.what()));
}

double guarded_scenario_availability(const SystemConfig& config, int f, const SolverPolicy& policy) {
  try {
    return scenario_availability(build_scenario(config, f), policy);
  } catch (const SolverError& error) {
    rethrow_with_context(error, config.n_servers, f);
  } catch (const DomainError& error) {
    rethrow_with_context(error, config.n_servers, f);
  }
}

// A_{N-f,f} for f in [0, N] at one configuration, zero past the fault bound.
struct CellBlock {
  SystemConfig config;
  std::vector<double> availability;
};

// Solves every (config, f) cell with f tolerable, fanning out across workers.
std::vector<CellBlock> evaluate_cells(const std::vector<SystemConfig>& configs,
                                      const EvaluationOptions& options) {
  std::vector<CellBlock> blocks;
  std::vector<std::pair<std::size_t, int>> cells;
  for (std::size_t b = 0; b < configs.size(); ++b) {
    const int n = configs[b].n_servers;
    blocks.push_back({configs[b], std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)});
    for (int f = 0; f <= max_tolerated_faults(n); ++f) cells.emplace_back(b, f);
  }
  // Largest state spaces first so the pool drains evenly.
  std::stable_sort(cells.begin(), cells.end(), [&](const auto& lhs, const auto& rhs) {
    auto states = [&](const auto& cell) {
      const int n = configs[cell.first].n_servers;
      return static_cast<long>(n - cell.second + 1) * (cell.second + 1);
    };
    return states(lhs) > states(rhs);
  });

  detail::parallel_for(cells.size(), options.jobs, [&](std::size_t k) {
    const auto [b, f] = cells[k];
    blocks[b].availability[static_cast<std::size_t>(f)] =
        guarded_scenario_availability(blocks[b].config, f, options.policy);
  });
  return blocks;
}

double weighted_mean(const FaultDistribution& dist, const std::vector<double>& availability) {
  double total = 0.0;
  for (int f = 0; f <= dist.support_max(); ++f) {
    total += dist.pmf(f) * availability[static_cast<std::size_t>(f)];
  }
  return total;
}

FaultDistribution checked(const DistributionFactory& factory, int n) {
  FaultDistribution dist = factory.make(n);
  if (dist.support_max() != n) {
    throw DomainError(fmt::format("distribution '{}' has support [0, {}] but N={}", factory.name,
                                  dist.support_max(), n));
  }
  return dist;
}

}  // namespace

int quorum_threshold(int n) {
  require_cluster(n);
  return (2 * n) / 3 + 1;
}

int max_tolerated_faults(int n) {
  require_cluster(n);
  return (n + 2) / 3 - 1;
}

double availability_above(const StationaryDistribution& dist, int threshold) {
  const int h = dist.scenario().honest_count;
  double total = 0.0;
  for (int i = std::max(threshold, 0); i <= h; ++i) total += dist.honest_marginal(i);
  return std::clamp(total, 0.0, 1.0);
}

AvailabilityResult availability(const StationaryDistribution& dist) {
  const int threshold = quorum_threshold(dist.scenario().config.n_servers);
  return AvailabilityResult{dist.scenario(), availability_above(dist, threshold)};
}

double scenario_availability(const Scenario& scenario, const SolverPolicy& policy) {
  if (quorum_threshold(scenario.config.n_servers) > scenario.honest_count) return 0.0;
  return availability(solve(build_generator(scenario), policy)).availability;
}

MeanAvailabilityResult mean_availability(const SystemConfig& config,
                                         const FaultDistribution& fault_dist,
                                         const EvaluationOptions& options) {
  config.validate();
  if (fault_dist.support_max() != config.n_servers) {
    throw DomainError(fmt::format("distribution support [0, {}] does not match N={}",
                                  fault_dist.support_max(), config.n_servers));
  }
  const auto blocks = evaluate_cells({config}, options);
  const auto& cells = blocks.front().availability;

  MeanAvailabilityResult result{config, fault_dist.describe(), 0.0, {}};
  result.per_f.reserve(cells.size());
  for (int f = 0; f <= config.n_servers; ++f) {
    result.per_f.push_back({f, fault_dist.pmf(f), cells[static_cast<std::size_t>(f)]});
  }
  result.mean_availability = weighted_mean(fault_dist, cells);
  return result;
}

DistributionFactory preset_factory(const std::string& name, LocationRounding rounding) {
  // Resolve once so unknown names fail before any sweep starts.
  (void)paper_preset(name, 4, rounding);
  return DistributionFactory{name, [name, rounding](int n) { return paper_preset(name, n, rounding); }};
}

SweepTable sweep_n(int n_min, int n_max, double ratio,
                   const std::vector<DistributionFactory>& fault_dists,
                   const EvaluationOptions& options) {
  require_cluster(n_min);
  if (n_max < n_min) throw DomainError(fmt::format("empty range [{}, {}]", n_min, n_max));
  if (fault_dists.empty()) throw DomainError("at least one distribution is required");

  std::vector<SystemConfig> configs;
  for (int n = n_min; n <= n_max; ++n) configs.push_back(make_config(n, ratio, 1.0));
  const auto blocks = evaluate_cells(configs, options);

  SweepTable table;
  for (const auto& factory : fault_dists) table.columns.push_back(factory.name);
  for (const auto& block : blocks) {
    const int n = block.config.n_servers;
    table.n_values.push_back(n);
    auto& row = table.values.emplace_back();
    for (const auto& factory : fault_dists) row.push_back(weighted_mean(checked(factory, n), block.availability));
  }
  return table;
}

SweepTable sweep_ratio(const std::vector<int>& n_list, const std::vector<double>& ratios,
                       const DistributionFactory& fault_dist, const EvaluationOptions& options) {
  if (n_list.empty() || ratios.empty()) throw DomainError("sizes and ratios must be non-empty");
  for (int n : n_list) require_cluster(n);
  if (std::set<double>(ratios.begin(), ratios.end()).size() != ratios.size()) {
    throw DomainError("duplicate ratios");
  }

  std::vector<SystemConfig> configs;
  for (int n : n_list) {
    for (double ratio : ratios) configs.push_back(make_config(n, ratio, 1.0));
  }
  const auto blocks = evaluate_cells(configs, options);

  SweepTable table;
  for (double ratio : ratios) table.columns.push_back(fmt::format("{:g}", ratio));
  for (std::size_t r = 0; r < n_list.size(); ++r) {
    const auto dist = checked(fault_dist, n_list[r]);
    table.n_values.push_back(n_list[r]);
    auto& row = table.values.emplace_back();
    for (std::size_t c = 0; c < ratios.size(); ++c) {
      row.push_back(weighted_mean(dist, blocks[r * ratios.size() + c].availability));
    }
  }
  return table;
}

}  // namespace bftavail
