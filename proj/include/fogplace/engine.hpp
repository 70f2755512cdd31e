#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fogplace/baselines.hpp"
#include "fogplace/collective.hpp"
#include "fogplace/costmodel.hpp"
#include "fogplace/plangen.hpp"
#include "fogplace/topology.hpp"
#include "fogplace/workload.hpp"

namespace fogplace {

enum class Strategy { Cloud, FirstFit, Collective };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Cloud: return "cloud";
    case Strategy::FirstFit: return "firstfit";
    case Strategy::Collective: return "collective";
  }
  return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "cloud") return Strategy::Cloud;
  if (s == "firstfit") return Strategy::FirstFit;
  if (s == "collective") return Strategy::Collective;
  throw std::invalid_argument("unknown strategy: " + s);
}

enum class WorkloadSource { Synthetic, Csv };

struct RunConfig {
  // topology
  TopologyKind kind = TopologyKind::ER;
  int nodes = 200;
  int cloud_nodes = 1;
  TopologyParams topo;
  DelayParams delays;
  ResourceTriple fog_total{704.0, 792.5, 313.5};
  ResourceTriple cloud_total{400.0, 500.0, 200.0};
  CapacitySplit capacity_split = CapacitySplit::Uniform;
  int capacity_alpha = 1;

  // workload
  WorkloadSource source = WorkloadSource::Synthetic;
  std::string profile_csv;
  SyntheticParams synthetic;
  IngressMode distribution = IngressMode::Rand;
  double round_ms = 300000.0;  // placement round length (5 minutes)

  // placement
  Strategy strategy = Strategy::Collective;
  int hop_limit = kUnlimitedHops;
  double lambda = 0.0;
  int plan_count = 20;
  int iterations = 40;
  int tree_fanout = 2;
  CostParams cost;
  bool retry_next_host = false;
  bool first_fit_self_host = true;
  int max_defer_rounds = 3;
  VarianceMetric variance_metric = VarianceMetric::Overall;

  // run
  std::uint64_t seed = 42;
  int rounds = 0;  // 0 = one round per profile
  std::string label;
};

struct RoundMetrics {
  int round = 0;
  std::size_t requests = 0;        // fresh + carried-over offered this round
  std::size_t fresh = 0;
  std::size_t carried_in = 0;
  std::size_t hosted = 0;
  std::size_t planned_unhosted = 0;  // the placement itself left them out
  std::size_t rerouted = 0;          // lost the capacity race, spilled to a cloud
  std::size_t rejected = 0;          // lost the race with no cloud room either
  std::size_t dropped = 0;           // exceeded the deferral budget
  double variance_cpu = 0.0;  // realized, after apply
  double variance_mem = 0.0;
  double variance_overall = 0.0;
  double predicted_cpu = 0.0;  // from the intended assignments
  double predicted_mem = 0.0;
  double predicted_overall = 0.0;
  double variance_error = 0.0;  // |predicted - realized| on the overall metric
  double fog_utilization_cpu = 0.0;
  double fog_utilization_mem = 0.0;
  double fog_utilization_overall = 0.0;
  double violation_rate = 0.0;        // violations / hosted
  double avg_execution_delay_ms = 0.0;  // mean |deadline - response| over hosted
  double deployment_bytes = 0.0;
  std::size_t capacity_violations = 0;   // realized load at or above capacity
  std::size_t stability_violations = 0;  // realized cpu load at or above service rate
};

struct MetricsReport {
  std::string strategy;
  std::vector<RoundMetrics> rounds;
  double mean_variance_overall = 0.0;
  double mean_predicted_overall = 0.0;
  double mean_variance_error = 0.0;
  double mean_fog_utilization = 0.0;
  double mean_violation_rate = 0.0;
  double mean_execution_delay_ms = 0.0;
  double total_deployment_bytes = 0.0;
  std::size_t total_requests = 0;  // distinct requests materialized
  std::size_t total_hosted = 0;
  std::size_t total_dropped = 0;
  std::size_t total_rejected = 0;  // apply-time rejections summed over rounds
  std::size_t pending_at_end = 0;
  std::size_t safety_violations = 0;
};

struct RunResult {
  MetricsReport report;
  std::vector<std::vector<IterationRecord>> iteration_log;  // per round, collective only
  std::vector<std::vector<std::vector<PlacementPlan>>> plan_sets;  // per round per agent, on request
  NetworkGraph graph;
  std::vector<WorkloadProfile> profiles;
};

struct RunOptions {
  bool collect_plans = false;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Stacked 2N utilization vector of an assignment set applied to empty nodes.
inline std::vector<double> intended_utilization(const std::map<long long, int>& assignments,
                                                const std::map<long long, const ServiceRequest*>& by_id,
                                                const NetworkGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> v(2 * n, 0.0);
  for (const auto& [rid, host] : assignments) {
    const ServiceRequest* r = by_id.at(rid);
    v[host] += r->cpu_demand / g.node(host).cpu_capacity;
    v[n + host] += r->mem_demand / g.node(host).mem_capacity;
  }
  return v;
}

}  // namespace detail

// Runs the configured placement strategy over the workload, one placement
// round per profile. Within a round: materialize and admit requests, plan,
// apply the plan against realized capacities (assignments that lost the
// race become unhosted and are carried over, gaining a full round of
// waiting; after max_defer_rounds they are dropped), then measure. Services
// occupy their host for exactly one round; which service types a node
// hosted stays visible for one more round so that re-deployments of the
// same image are free.
inline RunResult run_experiment(const RunConfig& cfg, const RunOptions& opt = {}) {
  if (cfg.cloud_nodes < 1) throw std::invalid_argument("at least one cloud node is required");
  if (cfg.hop_limit != kUnlimitedHops && cfg.hop_limit < 1)
    throw std::invalid_argument("hop limit must be positive or unlimited");

  RunResult result;
  result.graph = assign_capacities(
      generate_topology(cfg.kind, cfg.nodes, cfg.topo, cfg.seed, cfg.cloud_nodes, cfg.delays),
      cfg.fog_total, cfg.cloud_total, cfg.capacity_split, cfg.capacity_alpha, cfg.seed);
  const NetworkGraph& g = result.graph;
  const ShortestPaths sp = compute_shortest_paths(g);
  const std::size_t n = g.size();

  if (cfg.source == WorkloadSource::Synthetic) {
    result.profiles = load_profiles_synthetic(cfg.synthetic, cfg.seed);
  } else {
    std::ifstream in(cfg.profile_csv);
    if (!in) throw std::runtime_error("cannot open profile csv: " + cfg.profile_csv);
    result.profiles = load_profiles_csv(in);
  }
  const int rounds = cfg.rounds > 0
                         ? std::min<int>(cfg.rounds, static_cast<int>(result.profiles.size()))
                         : static_cast<int>(result.profiles.size());

  // Candidate neighborhoods are a function of the static graph; share them.
  // A host inside many agents' neighborhoods would be drawn by all of them,
  // so each candidate is counterweighted by how many fog agents can see it.
  std::vector<std::vector<int>> hoods(n);
  std::vector<std::vector<double>> hood_weights(n);
  if (cfg.strategy == Strategy::Collective) {
    for (std::size_t a = 0; a < n; ++a)
      hoods[a] = neighborhood(g, sp, static_cast<int>(a), cfg.hop_limit);
    std::vector<double> membership(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      if (g.node(static_cast<int>(a)).layer != Layer::Fog) continue;
      for (int v : hoods[a]) membership[v] += 1.0;
    }
    for (std::size_t a = 0; a < n; ++a) {
      hood_weights[a].reserve(hoods[a].size());
      for (int v : hoods[a]) hood_weights[a].push_back(1.0 / std::max(1.0, membership[v]));
    }
  }

  MetricsReport& rep = result.report;
  rep.strategy = to_string(cfg.strategy);

  std::vector<std::set<int>> hosted_prev(n);  // service types, previous round
  std::vector<ServiceRequest> carried;

  for (int round = 0; round < rounds; ++round) {
    RoundMetrics m;
    m.round = round;

    auto fresh = materialize_requests(result.profiles[round], default_deadline_table(),
                                      round * cfg.round_ms, cfg.round_ms,
                                      cfg.seed, static_cast<long long>(round) * 10'000'000LL);
    distribute_to_ingress(fresh, g, cfg.distribution,
                          derive_seed(cfg.seed, SeedTag::Ingress, static_cast<std::uint64_t>(round)));
    m.fresh = fresh.size();
    m.carried_in = carried.size();
    rep.total_requests += fresh.size();

    std::vector<ServiceRequest> batch = std::move(carried);
    carried.clear();
    batch.insert(batch.end(), fresh.begin(), fresh.end());
    std::sort(batch.begin(), batch.end(), [](const ServiceRequest& a, const ServiceRequest& b) {
      if (a.arrival_ms != b.arrival_ms) return a.arrival_ms < b.arrival_ms;
      return a.id < b.id;
    });
    m.requests = batch.size();

    std::map<long long, const ServiceRequest*> by_id;
    for (const auto& r : batch) by_id[r.id] = &r;

    // Planning-time snapshot: empty loads (the previous round's services
    // have finished) but last round's hosted types still visible.
    auto snapshot = std::make_shared<std::vector<NodeLoadState>>(n);
    for (std::size_t i = 0; i < n; ++i) {
      (*snapshot)[i].node = static_cast<int>(i);
      (*snapshot)[i].hosted_services = hosted_prev[i];
    }

    std::map<long long, int> intended;
    if (cfg.strategy == Strategy::Cloud) {
      intended = place_cloud(batch, g, sp);
    } else if (cfg.strategy == Strategy::FirstFit) {
      FirstFitOptions ffo;
      ffo.self_host = cfg.first_fit_self_host;
      intended = place_first_fit(batch, g, sp, *snapshot, cfg.cost, ffo);
    } else {
      std::map<int, std::vector<ServiceRequest>> by_agent;
      for (const auto& r : batch) by_agent[r.ingress_node].push_back(r);

      std::vector<std::vector<PlacementPlan>> plans(n);
      PlanGenOptions pgo;
      pgo.retry_next_host = cfg.retry_next_host;
      for (std::size_t a = 0; a < n; ++a) {
        AgentView view;
        view.agent = static_cast<int>(a);
        auto it = by_agent.find(view.agent);
        if (it != by_agent.end()) view.requests = it->second;
        view.candidate_hosts = hoods[a];
        view.host_weights = hood_weights[a];
        view.closest_cloud = nearest_cloud(g, sp, view.agent);
        view.prior_loads = snapshot;
        view.seed = derive_seed(cfg.seed, SeedTag::Plans, static_cast<std::uint64_t>(round),
                                static_cast<std::uint64_t>(a));
        plans[a] = generate_plans(view, cfg.plan_count, g, sp, cfg.cost, pgo);
      }

      const TreeOverlay tree =
          build_tree(static_cast<int>(n), cfg.tree_fanout,
                     derive_seed(cfg.seed, SeedTag::Tree, static_cast<std::uint64_t>(round)));
      const SelectionResult sel = run_collective_selection(
          plans, tree, cfg.lambda, cfg.iterations, cfg.variance_metric, 2 * n);
      for (std::size_t a = 0; a < n; ++a) {
        const auto& p = plans[a][sel.selected[a]];
        intended.insert(p.assignments.begin(), p.assignments.end());
      }
      result.iteration_log.push_back(sel.history);
      if (opt.collect_plans) result.plan_sets.push_back(std::move(plans));
    }

    // Predicted spread, before capacity races are resolved.
    const auto predicted = detail::intended_utilization(intended, by_id, g);
    m.predicted_cpu = variance_slice(predicted, VarianceMetric::Cpu);
    m.predicted_mem = variance_slice(predicted, VarianceMetric::Mem);
    m.predicted_overall = variance_slice(predicted, VarianceMetric::Overall);

    // Apply in deterministic request order. The cloud strategy bypasses the
    // capacity check: its cloud is assumed unbounded. A request that lost
    // the capacity race at its planned host spills to the nearest cloud
    // rather than waiting out the round; only when that cloud is full too
    // does it carry over.
    std::vector<NodeLoadState> loads(n);
    for (std::size_t i = 0; i < n; ++i) loads[i].node = static_cast<int>(i);
    std::vector<const ServiceRequest*> hosted;
    std::vector<ServiceRequest> missed;
    auto admit = [&](const ServiceRequest& r, int host, bool checked) {
      NodeLoadState after = loads[host];
      after.cpu += r.cpu_demand;
      after.mem += r.mem_demand;
      after.storage += r.storage_demand;
      if (checked && !check_capacity(after, g.node(host), cfg.cost.reserve_factor)) return false;
      loads[host] = after;
      loads[host].hosted_services.insert(r.service_type);
      hosted.push_back(&r);
      return true;
    };
    for (const auto& r : batch) {
      auto it = intended.find(r.id);
      if (it == intended.end()) {
        ++m.planned_unhosted;
        missed.push_back(r);
        continue;
      }
      const int host = it->second;
      if (admit(r, host, cfg.strategy != Strategy::Cloud)) continue;
      const int spill = nearest_cloud(g, sp, r.ingress_node);
      if (spill >= 0 && spill != host && admit(r, spill, true)) {
        it->second = spill;
        ++m.rerouted;
        continue;
      }
      ++m.rejected;
      intended.erase(it);
      missed.push_back(r);
    }
    m.hosted = hosted.size();
    rep.total_hosted += hosted.size();
    rep.total_rejected += m.rejected;

    // Requests that missed this round retry next round with a full round of
    // extra waiting, up to the deferral budget.
    for (auto& r : missed) {
      if (r.deferrals + 1 > cfg.max_defer_rounds) {
        ++m.dropped;
        continue;
      }
      ServiceRequest again = r;
      ++again.deferrals;
      again.waiting_ms += cfg.round_ms;
      carried.push_back(again);
    }
    rep.total_dropped += m.dropped;

    // Safety scan: realized state must respect capacities and stability.
    for (std::size_t i = 0; i < n; ++i) {
      const auto& spec = g.node(static_cast<int>(i));
      if (cfg.strategy == Strategy::Cloud && spec.layer == Layer::Cloud) continue;
      if (loads[i].cpu > spec.cpu_capacity || loads[i].mem > spec.mem_capacity ||
          loads[i].storage > spec.storage_capacity)
        ++m.capacity_violations;
      if (spec.cpu_capacity > 0.0 && loads[i].cpu >= spec.cpu_capacity) ++m.stability_violations;
    }
    rep.safety_violations += m.capacity_violations + m.stability_violations;

    // Realized metrics.
    m.variance_cpu = utilization_variance(loads, g, VarianceMetric::Cpu);
    m.variance_mem = utilization_variance(loads, g, VarianceMetric::Mem);
    m.variance_overall = utilization_variance(loads, g, VarianceMetric::Overall);
    m.variance_error = std::abs(m.predicted_overall - m.variance_overall);

    std::vector<double> fog_cpu, fog_mem, fog_both;
    for (const auto& l : loads) {
      const auto& spec = g.node(l.node);
      if (spec.layer != Layer::Fog) continue;
      fog_cpu.push_back(l.cpu / spec.cpu_capacity);
      fog_mem.push_back(l.mem / spec.mem_capacity);
      fog_both.push_back(l.cpu / spec.cpu_capacity);
      fog_both.push_back(l.mem / spec.mem_capacity);
    }
    m.fog_utilization_cpu = detail::mean_of(fog_cpu);
    m.fog_utilization_mem = detail::mean_of(fog_mem);
    m.fog_utilization_overall = detail::mean_of(fog_both);

    std::size_t violations = 0;
    double delay_sum = 0.0;
    for (const ServiceRequest* r : hosted) {
      const int host = intended.at(r->id);
      double e = 0.0;  // the unbounded cloud executes instantly
      if (cfg.strategy != Strategy::Cloud)
        e = response_time_ms(*r, host, g, sp, loads[host].cpu - r->cpu_demand,
                             cfg.cost.time_unit_scale);
      violations += deadline_violation(e, r->deadline_ms);
      delay_sum += std::abs(r->deadline_ms - e);
      if (g.node(host).layer == Layer::Fog && !hosted_prev[host].count(r->service_type))
        m.deployment_bytes += r->storage_demand;
    }
    m.violation_rate = hosted.empty() ? 0.0 : static_cast<double>(violations) / hosted.size();
    m.avg_execution_delay_ms = hosted.empty() ? 0.0 : delay_sum / hosted.size();
    rep.total_deployment_bytes += m.deployment_bytes;

    for (std::size_t i = 0; i < n; ++i) hosted_prev[i] = std::move(loads[i].hosted_services);

    rep.rounds.push_back(m);
  }
  rep.pending_at_end = carried.size();

  std::vector<double> vo, vp, ve, fu, vr, ed;
  for (const auto& m : rep.rounds) {
    vo.push_back(m.variance_overall);
    vp.push_back(m.predicted_overall);
    ve.push_back(m.variance_error);
    fu.push_back(m.fog_utilization_overall);
    vr.push_back(m.violation_rate);
    ed.push_back(m.avg_execution_delay_ms);
  }
  rep.mean_variance_overall = detail::mean_of(vo);
  rep.mean_predicted_overall = detail::mean_of(vp);
  rep.mean_variance_error = detail::mean_of(ve);
  rep.mean_fog_utilization = detail::mean_of(fu);
  rep.mean_violation_rate = detail::mean_of(vr);
  rep.mean_execution_delay_ms = detail::mean_of(ed);
  return result;
}

// One grid cell: a full run of one strategy at one parameter point.
struct GridCell {
  Strategy strategy = Strategy::Collective;
  TopologyKind kind = TopologyKind::ER;
  int nodes = 0;
  IngressMode distribution = IngressMode::Rand;
  int hop_limit = kUnlimitedHops;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
  std::string error;  // non-empty when the run failed

  std::string name() const {
    std::string h = hop_limit == kUnlimitedHops ? "inf" : std::to_string(hop_limit);
    char lam[16];
    std::snprintf(lam, sizeof(lam), "%.2f", lambda);
    return fogplace::to_string(strategy) + "_" + fogplace::to_string(kind) + "_n" +
           std::to_string(nodes) + "_" + fogplace::to_string(distribution) + "_h" + h + "_l" +
           lam + "_s" + std::to_string(seed);
  }
};

struct GridSpec {
  std::vector<Strategy> strategies;
  std::vector<TopologyKind> topologies;
  std::vector<int> node_counts;
  std::vector<IngressMode> distributions;
  std::vector<int> hop_limits;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
};

// Cross product of the grid axes, every cell sharing the base config. The
// same seed is reused across strategies so comparisons are paired. Cells
// run independently; parallelism changes wall time, never results.
inline std::vector<GridCell> compare_strategies(const RunConfig& base, const GridSpec& grid,
                                                int parallelism = 1) {
  if (grid.strategies.empty() || grid.topologies.empty() || grid.node_counts.empty() ||
      grid.distributions.empty() || grid.hop_limits.empty() || grid.lambdas.empty() ||
      grid.seeds.empty())
    throw std::invalid_argument("every grid axis needs at least one value");

  std::vector<GridCell> cells;
  for (Strategy s : grid.strategies)
    for (TopologyKind k : grid.topologies)
      for (int n : grid.node_counts)
        for (IngressMode d : grid.distributions)
          for (int h : grid.hop_limits)
            for (double lam : grid.lambdas)
              for (std::uint64_t seed : grid.seeds) {
                GridCell c;
                c.strategy = s;
                c.kind = k;
                c.nodes = n;
                c.distribution = d;
                c.hop_limit = h;
                c.lambda = lam;
                c.seed = seed;
                cells.push_back(c);
              }

  auto run_cell = [&](GridCell& c) {
    RunConfig cfg = base;
    cfg.strategy = c.strategy;
    cfg.kind = c.kind;
    cfg.nodes = c.nodes;
    cfg.distribution = c.distribution;
    cfg.hop_limit = c.hop_limit;
    cfg.lambda = c.lambda;
    cfg.seed = c.seed;
    try {
      c.report = run_experiment(cfg).report;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };

  if (parallelism <= 1) {
    for (auto& c : cells) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        run_cell(cells[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < parallelism; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return cells;
}

}  // namespace fogplace
