#include "bftavail/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "bftavail/availability.hpp"
#include "bftavail/errors.hpp"
#include "parallel.hpp"

namespace bftavail {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(seed ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
}

// Uniform on [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

struct OutgoingRates {
  std::vector<std::size_t> targets;
  std::vector<double> cumulative;
  double total = 0.0;
};

std::vector<OutgoingRates> rate_table(const Scenario& scenario) {
  std::vector<OutgoingRates> table(state_count(scenario));
  for (std::size_t s = 0; s < table.size(); ++s) {
    auto& out = table[s];
    for (const auto& t : transitions_from(scenario, state_at(scenario, s))) {
      out.total += t.rate.value(scenario.config);
      out.targets.push_back(flat_index(scenario, t.target));
      out.cumulative.push_back(out.total);
    }
    if (!(out.total > 0.0)) {
      throw DomainError(fmt::format("state {} has zero total out-rate", s));
    }
  }
  return table;
}

double run_replication(const SimConfig& config, const std::vector<OutgoingRates>& table,
                       int threshold, std::uint64_t replication) {
  const Scenario& scenario = config.scenario;
  const double warmup = config.effective_warmup();
  std::mt19937_64 engine(stream_seed(config.seed, replication));

  std::size_t state = flat_index(scenario, {scenario.honest_count, scenario.byzantine_count});
  double now = 0.0;
  double available_time = 0.0;
  while (now < config.horizon) {
    const auto& out = table[state];
    const double holding = -std::log1p(-unit_uniform(engine)) / out.total;
    const double start = std::max(now, warmup);
    const double end = std::min(now + holding, config.horizon);
    if (end > start && state_at(scenario, state).honest_up >= threshold) {
      available_time += end - start;
    }
    now += holding;

    const double pick = unit_uniform(engine) * out.total;
    const auto next = std::upper_bound(out.cumulative.begin(), out.cumulative.end(), pick);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(next - out.cumulative.begin()),
                                         out.targets.size() - 1);
    state = out.targets[k];
  }
  return available_time / (config.horizon - warmup);
}

}  // namespace

std::vector<Transition> transitions_from(const Scenario& scenario, StateIndex state) {
  const int i = state.honest_up;
  const int j = state.byzantine_up;
  std::vector<Transition> out;
  if (i > 0) out.push_back({{i - 1, j}, {i, 0}});
  if (j > 0) out.push_back({{i, j - 1}, {j, 0}});
  if (i < scenario.honest_count) out.push_back({{i + 1, j}, {0, 1}});
  if (j < scenario.byzantine_count) out.push_back({{i, j + 1}, {0, 1}});
  return out;
}

void SimConfig::validate() const {
  scenario.config.validate_rates();
  if (scenario.honest_count < 0 || scenario.byzantine_count < 0 ||
      scenario.honest_count + scenario.byzantine_count != scenario.config.n_servers) {
    throw DomainError("inconsistent scenario");
  }
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw DomainError(fmt::format("horizon must be positive, got {}", horizon));
  }
  const double w = effective_warmup();
  if (!(w >= 0.0 && w < horizon)) {
    throw DomainError(fmt::format("warmup {} outside [0, horizon={})", w, horizon));
  }
  if (replications < 1) {
    throw DomainError(fmt::format("replications must be at least 1, got {}", replications));
  }
}

SimEstimate simulate(const SimConfig& config) {
  config.validate();
  const int threshold = config.threshold ? *config.threshold : quorum_threshold(config.scenario.config.n_servers);
  const auto table = rate_table(config.scenario);

  SimEstimate estimate;
  estimate.replication_values.assign(static_cast<std::size_t>(config.replications), 0.0);
  detail::parallel_for(estimate.replication_values.size(), config.jobs, [&](std::size_t r) {
    estimate.replication_values[r] = run_replication(config, table, threshold, r);
  });

  const auto reps = static_cast<double>(config.replications);
  double sum = 0.0;
  for (double v : estimate.replication_values) sum += v;
  estimate.mean_availability = sum / reps;
  if (config.replications > 1) {
    double squares = 0.0;
    for (double v : estimate.replication_values) {
      squares += (v - estimate.mean_availability) * (v - estimate.mean_availability);
    }
    estimate.standard_error = std::sqrt(squares / (reps - 1.0)) / std::sqrt(reps);
  }
  return estimate;
}

}  // namespace bftavail
