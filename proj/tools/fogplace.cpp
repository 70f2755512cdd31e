// Command line front end: experiment runs, parameter grids, topology and
// workload generation, config validation, and plan-set export. Exit codes:
// 0 success, 1 configuration or usage problem, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogplace/config.hpp"
#include "fogplace/engine.hpp"
#include "fogplace/reports.hpp"

namespace fs = std::filesystem;
using namespace fogplace;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
  int parallel = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
  cmd->add_option("--config", args.config_path, "configuration file (.ini style or .json)")
      ->required();
  auto* out = cmd->add_option("--out", args.out_dir,
                              "output directory (falls back to FOGPLACE_OUT)");
  (void)out;
  (void)needs_out;
  cmd->add_option("--set", args.overrides, "override a config value, section.key=value")
      ->take_all();
  cmd->add_option("--seed", args.seed, "override run.seed")->each([&args](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_flag("--force", args.force, "overwrite existing outputs");
}

std::string resolve_out_dir(const CommonArgs& args) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("FOGPLACE_OUT"); env && *env) return env;
  throw UsageError("no output directory: pass --out or set FOGPLACE_OUT");
}

ConfigMap load_with_overrides(const CommonArgs& args) {
  ConfigMap map = load_config_file(args.config_path);
  for (const auto& ov : args.overrides) apply_override(map, ov);
  if (args.seed_set) map["run.seed"] = std::to_string(args.seed);
  return map;
}

RunConfig config_or_throw(const ConfigMap& map) {
  RunConfig cfg = build_run_config(map);
  const auto problems = validate_run_config(cfg);
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

std::ofstream open_output(const fs::path& path, bool force) {
  if (fs::exists(path) && !force)
    throw UsageError("refusing to overwrite " + path.string() + " (use --force)");
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_run_outputs(const RunConfig& cfg, const RunResult& result, const fs::path& dir,
                       bool force) {
  {
    auto os = open_output(dir / "metrics.csv", force);
    write_metrics_csv(result.report, os);
  }
  {
    auto os = open_output(dir / "summary.json", force);
    os << summary_json(cfg, result.report).dump(2) << '\n';
  }
  for (std::size_t r = 0; r < result.iteration_log.size(); ++r) {
    auto os = open_output(dir / ("iterations_round" + std::to_string(r) + ".csv"), force);
    write_iterations_csv(result.iteration_log[r], os);
  }
}

int cmd_run(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  const RunConfig cfg = config_or_throw(map);
  const fs::path dir = resolve_out_dir(args);
  const RunResult result = run_experiment(cfg);
  write_run_outputs(cfg, result, dir, args.force);
  std::cout << "run complete: " << result.report.rounds.size() << " rounds, "
            << result.report.total_hosted << '/' << result.report.total_requests
            << " requests hosted, outputs in " << dir.string() << '\n';
  return 0;
}

int cmd_grid(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  const RunConfig base = config_or_throw(map);
  const GridSpec grid = build_grid_spec(map, base);
  if (grid.strategies.empty() || grid.topologies.empty() || grid.node_counts.empty() ||
      grid.distributions.empty() || grid.hop_limits.empty() || grid.lambdas.empty() ||
      grid.seeds.empty())
    throw ConfigError("grid: every axis needs at least one value");
  const fs::path dir = resolve_out_dir(args);

  const auto cells = compare_strategies(base, grid, args.parallel);

  {
    auto os = open_output(dir / "comparison.csv", args.force);
    write_grid_comparison_csv(cells, os);
  }
  {
    auto os = open_output(dir / "figures" / "fig06_variance_difference.csv", args.force);
    write_strategy_difference_csv(cells, Strategy::FirstFit, Strategy::Collective, false, os);
  }
  {
    auto os = open_output(dir / "figures" / "fig07_fog_utilization.csv", args.force);
    write_fog_utilization_csv(cells, os);
  }
  {
    auto os = open_output(dir / "figures" / "fig08_delay_difference.csv", args.force);
    write_strategy_difference_csv(cells, Strategy::FirstFit, Strategy::Collective, true, os);
  }
  {
    auto os = open_output(dir / "figures" / "fig09_variance_error.csv", args.force);
    write_variance_error_csv(cells, os);
  }
  nlohmann::json summary;
  summary["cells"] = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& c : cells) {
    auto os = open_output(dir / "cells" / c.name() / "metrics.csv", args.force);
    write_metrics_csv(c.report, os);
    nlohmann::json jc;
    jc["name"] = c.name();
    jc["strategy"] = to_string(c.strategy);
    jc["topology"] = to_string(c.kind);
    jc["nodes"] = c.nodes;
    jc["distribution"] = to_string(c.distribution);
    jc["hops"] = hops_label(c.hop_limit);
    jc["lambda"] = c.lambda;
    jc["seed"] = c.seed;
    jc["mean_variance_overall"] = c.report.mean_variance_overall;
    jc["mean_variance_error"] = c.report.mean_variance_error;
    jc["mean_fog_utilization"] = c.report.mean_fog_utilization;
    jc["mean_violation_rate"] = c.report.mean_violation_rate;
    jc["mean_execution_delay_ms"] = c.report.mean_execution_delay_ms;
    if (!c.error.empty()) {
      jc["error"] = c.error;
      ++failed;
    }
    summary["cells"].push_back(jc);
  }
  {
    auto os = open_output(dir / "grid_summary.json", args.force);
    os << summary.dump(2) << '\n';
  }
  std::cout << "grid complete: " << cells.size() << " cells (" << failed
            << " failed), outputs in " << dir.string() << '\n';
  return failed == 0 ? 0 : 2;
}

int cmd_gen_topology(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  const RunConfig cfg = config_or_throw(map);
  const fs::path dir = resolve_out_dir(args);
  const NetworkGraph g = assign_capacities(
      generate_topology(cfg.kind, cfg.nodes, cfg.topo, cfg.seed, cfg.cloud_nodes, cfg.delays),
      cfg.fog_total, cfg.cloud_total, cfg.capacity_split, cfg.capacity_alpha, cfg.seed);
  {
    auto os = open_output(dir / "edges.txt", args.force);
    export_edges(g, os);
  }
  {
    auto os = open_output(dir / "nodes.csv", args.force);
    export_nodes(g, os);
  }
  std::cout << "topology written: " << g.size() << " nodes, " << g.edge_count() << " edges, "
            << g.patched_edges() << " patched, outputs in " << dir.string() << '\n';
  return 0;
}

int cmd_gen_workload(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  const RunConfig cfg = config_or_throw(map);
  const fs::path dir = resolve_out_dir(args);

  std::vector<WorkloadProfile> profiles;
  if (cfg.source == WorkloadSource::Synthetic) {
    profiles = load_profiles_synthetic(cfg.synthetic, cfg.seed);
  } else {
    std::ifstream in(cfg.profile_csv);
    if (!in) throw ConfigError("cannot open profile csv: " + cfg.profile_csv);
    profiles = load_profiles_csv(in);
  }
  {
    auto os = open_output(dir / "profiles.csv", args.force);
    write_profiles_csv(profiles, os);
  }
  const NetworkGraph g = assign_capacities(
      generate_topology(cfg.kind, cfg.nodes, cfg.topo, cfg.seed, cfg.cloud_nodes, cfg.delays),
      cfg.fog_total, cfg.cloud_total, cfg.capacity_split, cfg.capacity_alpha, cfg.seed);
  std::size_t total = 0;
  for (std::size_t r = 0; r < profiles.size(); ++r) {
    auto requests = materialize_requests(profiles[r], default_deadline_table(), r * cfg.round_ms,
                                         cfg.round_ms, cfg.seed,
                                         static_cast<long long>(r) * 10'000'000LL);
    distribute_to_ingress(requests, g, cfg.distribution,
                          derive_seed(cfg.seed, SeedTag::Ingress, static_cast<std::uint64_t>(r)));
    auto os = open_output(dir / ("requests_round" + std::to_string(r) + ".csv"), args.force);
    write_requests_csv(requests, os);
    total += requests.size();
  }
  std::cout << "workload written: " << profiles.size() << " profiles, " << total
            << " requests, outputs in " << dir.string() << '\n';
  return 0;
}

int cmd_export_plans(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  RunConfig cfg = config_or_throw(map);
  cfg.strategy = Strategy::Collective;  // plan sets only exist for the collective strategy
  const fs::path dir = resolve_out_dir(args);
  RunOptions opt;
  opt.collect_plans = true;
  const RunResult result = run_experiment(cfg, opt);
  const std::size_t vec_len = 2 * static_cast<std::size_t>(result.graph.size());
  std::size_t files = 0;
  for (std::size_t r = 0; r < result.plan_sets.size(); ++r) {
    for (std::size_t a = 0; a < result.plan_sets[r].size(); ++a) {
      auto os = open_output(dir / "plans" / ("round" + std::to_string(r)) /
                                ("agent_" + std::to_string(a) + ".csv"),
                            args.force);
      write_plan_set(result.plan_sets[r][a], vec_len, os);
      ++files;
    }
  }
  write_run_outputs(cfg, result, dir, args.force);
  std::cout << "plans exported: " << files << " files, outputs in " << dir.string() << '\n';
  return 0;
}

int cmd_validate(const CommonArgs& args) {
  const ConfigMap map = load_with_overrides(args);
  const RunConfig cfg = config_or_throw(map);
  if (map.count("grid.strategies") || map.count("grid.topologies") || map.count("grid.nodes") ||
      map.count("grid.distributions") || map.count("grid.hops") || map.count("grid.lambdas") ||
      map.count("grid.seeds")) {
    const GridSpec grid = build_grid_spec(map, cfg);
    if (grid.strategies.empty() || grid.topologies.empty() || grid.node_counts.empty() ||
        grid.distributions.empty() || grid.hop_limits.empty() || grid.lambdas.empty() ||
        grid.seeds.empty())
      throw ConfigError("grid: every axis needs at least one value");
    std::size_t cells = grid.strategies.size() * grid.topologies.size() *
                        grid.node_counts.size() * grid.distributions.size() *
                        grid.hop_limits.size() * grid.lambdas.size() * grid.seeds.size();
    std::cout << "grid: " << cells << " cells\n";
  }
  std::cout << "configuration ok: " << to_string(cfg.strategy) << " on " << to_string(cfg.kind)
            << " n=" << cfg.nodes << " seed=" << cfg.seed << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic service placement experiments on edge-to-cloud networks"};
  app.require_subcommand(1);

  CommonArgs run_args, grid_args, topo_args, work_args, plans_args, val_args;

  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_args, true);
  auto* grid = app.add_subcommand("grid", "run a parameter grid");
  add_common(grid, grid_args, true);
  grid->add_option("--parallel", grid_args.parallel, "worker threads for grid cells")
      ->check(CLI::PositiveNumber);
  auto* topo = app.add_subcommand("gen-topology", "generate and export a network");
  add_common(topo, topo_args, true);
  auto* work = app.add_subcommand("gen-workload", "generate and export a workload");
  add_common(work, work_args, true);
  auto* plans = app.add_subcommand("export-plans", "run the collective strategy and dump plan sets");
  add_common(plans, plans_args, true);
  auto* val = app.add_subcommand("validate", "check a configuration and exit");
  add_common(val, val_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (grid->parsed()) return cmd_grid(grid_args);
    if (topo->parsed()) return cmd_gen_topology(topo_args);
    if (work->parsed()) return cmd_gen_workload(work_args);
    if (plans->parsed()) return cmd_export_plans(plans_args);
    if (val->parsed()) return cmd_validate(val_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
