#include "bftavail/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bftavail/availability.hpp"
#include "bftavail/errors.hpp"
#include "bftavail/report.hpp"
#include "bftavail/simulation.hpp"

namespace bftavail {

namespace {

namespace fs = std::filesystem;

struct RateArgs {
  std::optional<double> xi;
  double eta = 1.0;
  std::optional<double> ratio;

  SystemConfig config(int n) const {
    if (ratio) return make_config(n, *ratio, 1.0);
    if (!xi) throw DomainError("either --ratio or --xi is required");
    return make_config(n, *xi, eta);
  }
};

void add_rate_options(CLI::App* cmd, RateArgs& rates) {
  auto* ratio = cmd->add_option("--ratio", rates.ratio, "xi/eta with eta fixed at 1");
  auto* xi = cmd->add_option("--xi", rates.xi, "per-node breakdown rate");
  auto* eta = cmd->add_option("--eta", rates.eta, "repair rate")->capture_default_str();
  ratio->excludes(xi)->excludes(eta);
}

LocationRounding parse_rounding(const std::string& name) {
  if (name == "floor") return LocationRounding::kFloor;
  if (name == "nearest") return LocationRounding::kNearest;
  throw DomainError(fmt::format("unknown rounding '{}'", name));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) throw DomainError(fmt::format("empty entry in list '{}'", text));
    items.push_back(item);
  }
  if (items.empty()) throw DomainError("empty list");
  return items;
}

double parse_ratio(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(value) || value <= 0.0) {
    throw DomainError(fmt::format("ratio '{}' is not a positive number", text));
  }
  return value;
}

// Writes through a sibling temporary so an aborted write never leaves a
// truncated file behind.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  const fs::path target(path);
  const fs::path partial = target.string() + ".partial";
  try {
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      if (!out) throw DomainError(fmt::format("cannot open '{}' for writing", path));
      fill(out);
      out.flush();
      if (!out) throw DomainError(fmt::format("failed writing '{}'", path));
    }
    fs::rename(partial, target);
  } catch (...) {
    std::error_code ignored;
    fs::remove(partial, ignored);
    throw;
  }
}

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string joined;
  for (const auto& result : opt->results()) {
    if (!joined.empty()) joined += ',';
    joined += result;
  }
  return joined;
}

// Runs one subcommand body and records its manifest.
class CommandRun {
 public:
  CommandRun(const CLI::App* command, std::optional<std::string> manifest_path)
      : command_(command), manifest_path_(std::move(manifest_path)),
        start_(std::chrono::steady_clock::now()) {}

  void add_output(const std::string& path) { outputs_.push_back(path); }

  void finish() {
    RunManifest manifest;
    manifest.command = command_->get_name();
    for (const auto* opt : command_->get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "--manifest") continue;
      std::string key = opt->get_name();
      key.erase(0, key.find_first_not_of('-'));
      manifest.parameters.emplace_back(key, option_value(opt));
    }
    manifest.outputs = outputs_;
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();

    std::string path;
    if (manifest_path_) {
      path = *manifest_path_;
    } else if (!outputs_.empty()) {
      path = outputs_.front() + ".manifest";
    } else {
      path = fmt::format("bftavail-{}.manifest", manifest.command);
    }
    write_file(path, [&](std::ostream& out) { manifest.write(out); });
  }

 private:
  const CLI::App* command_;
  std::optional<std::string> manifest_path_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

struct SolveArgs {
  int n = 0;
  int f = 0;
  RateArgs rates;
  std::string solver = "auto";
  std::optional<std::string> out;
  std::optional<std::string> triplets;
  std::optional<std::string> manifest;
};

void cmd_solve(const CLI::App* command, const SolveArgs& args, std::ostream& out, std::ostream& err) {
  CommandRun run(command, args.manifest);
  const SystemConfig config = args.rates.config(args.n);
  if (config.high_ratio()) err << "warning: xi/eta >= 1 is outside the model's intended regime\n";
  const Scenario scenario = build_scenario(config, args.f);
  const int threshold = quorum_threshold(args.n);

  std::vector<std::pair<std::string, double>> results;
  const bool solvable = threshold <= scenario.honest_count;
  std::optional<GeneratorMatrix> q;
  if (solvable || args.triplets) q = build_generator(scenario);

  auto evaluate = [&](const std::string& name, auto&& solver) {
    results.emplace_back(name, solvable ? availability(solver(*q)).availability : 0.0);
  };
  if (args.solver == "both") {
    evaluate("svd", solve_svd);
    evaluate("replaced", solve_replaced_equation);
  } else {
    const SolverPolicy policy = parse_solver_policy(args.solver);
    const std::string used =
        policy.select(state_count(scenario)) == SolverKind::kSvd ? "svd" : "replaced";
    evaluate(used, [&](const GeneratorMatrix& m) { return solve(m, policy); });
  }

  out << fmt::format("N={} h={} f={} xi={:g} eta={:g} states={} quorum_threshold={}\n", args.n,
                     scenario.honest_count, scenario.byzantine_count, config.breakdown_rate,
                     config.repair_rate, state_count(scenario), threshold);
  for (const auto& [name, value] : results) {
    out << fmt::format("availability ({}) = {}\n", name, format_value(value));
  }
  if (results.size() == 2) {
    out << fmt::format("difference = {:.3e}\n", results[0].second - results[1].second);
  }

  if (args.out) {
    write_file(*args.out, [&](std::ostream& csv) {
      csv << "N,f,h,xi,eta,solver,availability\n";
      for (const auto& [name, value] : results) {
        csv << fmt::format("{},{},{},{:g},{:g},{},{}\n", args.n, args.f, scenario.honest_count,
                           config.breakdown_rate, config.repair_rate, name, format_value(value));
      }
    });
    run.add_output(*args.out);
  }
  if (args.triplets) {
    write_file(*args.triplets, [&](std::ostream& file) { q->write_triplets(file); });
    run.add_output(*args.triplets);
  }
  run.finish();
}

struct SweepArgs {
  int n_min = 4;
  int n_max = 128;
  double ratio = 0.015;
  std::string dists;
  std::string out;
  std::string solver = "auto";
  std::string rounding = "floor";
  unsigned jobs = 0;
  std::optional<std::string> manifest;
};

void cmd_sweep(const CLI::App* command, const SweepArgs& args, std::ostream& out) {
  CommandRun run(command, args.manifest);
  EvaluationOptions options{parse_solver_policy(args.solver), args.jobs};
  const auto rounding = parse_rounding(args.rounding);
  std::vector<DistributionFactory> factories;
  for (const auto& name : split_list(args.dists)) factories.push_back(preset_factory(name, rounding));

  const SweepTable table = sweep_n(args.n_min, args.n_max, args.ratio, factories, options);
  write_file(args.out, [&](std::ostream& csv) { write_csv(table, csv); });
  run.add_output(args.out);
  out << fmt::format("wrote {} rows x {} distributions to {}\n", table.n_values.size(),
                     table.columns.size(), args.out);
  run.finish();
}

struct RatioSweepArgs {
  int n_min = 4;
  int n_max = 128;
  std::string ratios;
  std::string dist;
  std::string out;
  std::string solver = "auto";
  std::string rounding = "floor";
  unsigned jobs = 0;
  std::optional<std::string> manifest;
};

void cmd_ratio_sweep(const CLI::App* command, const RatioSweepArgs& args, std::ostream& out) {
  CommandRun run(command, args.manifest);
  if (args.n_max < args.n_min) throw DomainError(fmt::format("empty range [{}, {}]", args.n_min, args.n_max));
  std::vector<double> ratios;
  for (const auto& text : split_list(args.ratios)) ratios.push_back(parse_ratio(text));
  std::vector<int> sizes;
  for (int n = args.n_min; n <= args.n_max; ++n) sizes.push_back(n);

  EvaluationOptions options{parse_solver_policy(args.solver), args.jobs};
  const SweepTable table =
      sweep_ratio(sizes, ratios, preset_factory(args.dist, parse_rounding(args.rounding)), options);
  write_file(args.out, [&](std::ostream& csv) { write_csv(table, csv); });
  run.add_output(args.out);
  out << fmt::format("wrote {} rows x {} ratios to {}\n", table.n_values.size(), table.columns.size(),
                     args.out);
  run.finish();
}

struct SimulateArgs {
  int n = 0;
  int f = 0;
  RateArgs rates;
  double horizon = 1e5;
  std::optional<double> warmup;
  int reps = 20;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
};

void cmd_simulate(const CLI::App* command, const SimulateArgs& args, std::ostream& out) {
  CommandRun run(command, args.manifest);
  SimConfig sim;
  sim.scenario = build_scenario(args.rates.config(args.n), args.f);
  sim.horizon = args.horizon;
  sim.warmup = args.warmup;
  sim.seed = args.seed;
  sim.replications = args.reps;
  sim.jobs = args.jobs;
  sim.validate();

  const SimEstimate estimate = simulate(sim);
  const double analytic = scenario_availability(sim.scenario);
  const double gap = estimate.mean_availability - analytic;
  const double z = estimate.standard_error > 0.0 ? gap / estimate.standard_error
                   : gap == 0.0                  ? 0.0
                                                 : std::numeric_limits<double>::infinity();

  out << fmt::format("N={} h={} f={} horizon={:g} warmup={:g} reps={} seed={}\n", args.n,
                     sim.scenario.honest_count, args.f, sim.horizon, sim.effective_warmup(),
                     sim.replications, sim.seed);
  out << fmt::format("simulated availability = {} +/- {}\n", format_value(estimate.mean_availability),
                     format_value(estimate.standard_error));
  out << fmt::format("analytic availability = {}\n", format_value(analytic));
  out << fmt::format("z-score = {:.4f}\n", z);

  if (args.out) {
    write_file(*args.out, [&](std::ostream& csv) {
      csv << "replication,availability\n";
      for (std::size_t r = 0; r < estimate.replication_values.size(); ++r) {
        csv << r << ',' << format_value(estimate.replication_values[r]) << '\n';
      }
    });
    run.add_output(*args.out);
  }
  run.finish();
}

struct PlotArgs {
  std::string csv;
  std::string out;
  std::string title = "Mean availability";
  std::optional<double> y_max;
  std::optional<std::string> manifest;
};

void cmd_plot(const CLI::App* command, const PlotArgs& args, std::ostream& out) {
  CommandRun run(command, args.manifest);
  std::ifstream in(args.csv, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot read '{}'", args.csv));
  const SweepTable table = read_csv(in);
  const std::string script = plot_script(table, PlotOptions{args.title, args.y_max});
  write_file(args.out, [&](std::ostream& file) { file << script; });
  run.add_output(args.out);
  out << fmt::format("wrote plot specification for {} series to {}\n", table.columns.size(), args.out);
  run.finish();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state availability of Byzantine fault-tolerant clusters"};
  app.name(args.empty() ? "bftavail" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "availability of one (N, f) scenario");
  solve_cmd->add_option("--n", solve_args.n, "cluster size N")->required();
  solve_cmd->add_option("--f", solve_args.f, "Byzantine node count")->required();
  add_rate_options(solve_cmd, solve_args.rates);
  solve_cmd->add_option("--solver", solve_args.solver, "svd, replaced, both or auto")
      ->check(CLI::IsMember({"svd", "replaced", "both", "auto"}))
      ->capture_default_str();
  solve_cmd->add_option("--out", solve_args.out, "CSV output path");
  solve_cmd->add_option("--triplets", solve_args.triplets, "write the coefficient matrix as `row col value` lines");
  solve_cmd->add_option("--manifest", solve_args.manifest, "run manifest path");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "mean availability over N for several distributions");
  sweep_cmd->add_option("--n-min", sweep_args.n_min)->capture_default_str();
  sweep_cmd->add_option("--n-max", sweep_args.n_max)->capture_default_str();
  sweep_cmd->add_option("--ratio", sweep_args.ratio, "xi/eta")->capture_default_str();
  sweep_cmd->add_option("--dists", sweep_args.dists, "comma-separated preset names")->required();
  sweep_cmd->add_option("--out", sweep_args.out, "CSV output path")->required();
  sweep_cmd->add_option("--solver", sweep_args.solver)
      ->check(CLI::IsMember({"svd", "replaced", "auto"}))
      ->capture_default_str();
  sweep_cmd->add_option("--rounding", sweep_args.rounding, "floor or nearest for N/6, N/2 locations")
      ->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "worker threads (0 = all cores)")->capture_default_str();
  sweep_cmd->add_option("--manifest", sweep_args.manifest, "run manifest path");

  RatioSweepArgs ratio_args;
  auto* ratio_cmd = app.add_subcommand("ratio-sweep", "availability over N for several xi/eta ratios");
  ratio_cmd->add_option("--n-min", ratio_args.n_min)->capture_default_str();
  ratio_cmd->add_option("--n-max", ratio_args.n_max)->capture_default_str();
  ratio_cmd->add_option("--ratios", ratio_args.ratios, "comma-separated xi/eta values")->required();
  ratio_cmd->add_option("--dist", ratio_args.dist, "preset name")->required();
  ratio_cmd->add_option("--out", ratio_args.out, "CSV output path")->required();
  ratio_cmd->add_option("--solver", ratio_args.solver)
      ->check(CLI::IsMember({"svd", "replaced", "auto"}))
      ->capture_default_str();
  ratio_cmd->add_option("--rounding", ratio_args.rounding)->capture_default_str();
  ratio_cmd->add_option("--jobs", ratio_args.jobs)->capture_default_str();
  ratio_cmd->add_option("--manifest", ratio_args.manifest, "run manifest path");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "stochastic simulation cross-check");
  sim_cmd->add_option("--n", sim_args.n)->required();
  sim_cmd->add_option("--f", sim_args.f)->required();
  add_rate_options(sim_cmd, sim_args.rates);
  sim_cmd->add_option("--horizon", sim_args.horizon)->capture_default_str();
  sim_cmd->add_option("--warmup", sim_args.warmup, "defaults to 1% of the horizon");
  sim_cmd->add_option("--reps", sim_args.reps)->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed)->capture_default_str();
  sim_cmd->add_option("--jobs", sim_args.jobs)->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out, "per-replication CSV");
  sim_cmd->add_option("--manifest", sim_args.manifest, "run manifest path");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Vega-Lite plot specification from a sweep CSV");
  plot_cmd->add_option("--csv", plot_args.csv)->required();
  plot_cmd->add_option("--out", plot_args.out)->required();
  plot_cmd->add_option("--title", plot_args.title)->capture_default_str();
  plot_cmd->add_option("--ymax", plot_args.y_max, "upper end of the A axis");
  plot_cmd->add_option("--manifest", plot_args.manifest, "run manifest path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("bftavail");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) cmd_solve(solve_cmd, solve_args, out, err);
    if (sweep_cmd->parsed()) cmd_sweep(sweep_cmd, sweep_args, out);
    if (ratio_cmd->parsed()) cmd_ratio_sweep(ratio_cmd, ratio_args, out);
    if (sim_cmd->parsed()) cmd_simulate(sim_cmd, sim_args, out);
    if (plot_cmd->parsed()) cmd_plot(plot_cmd, plot_args, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace bftavail
