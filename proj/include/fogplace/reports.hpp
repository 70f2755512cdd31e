#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fogplace/config.hpp"
#include "fogplace/engine.hpp"

namespace fogplace {

inline std::string hops_label(int h) {
  return h == kUnlimitedHops ? "inf" : std::to_string(h);
}

// Long-format per-run metrics: "round,metric,value" with per-round rows
// first and run-level aggregates under round "all". Row order and float
// formatting are fixed so identical runs serialize identically.
inline void write_metrics_csv(const MetricsReport& rep, std::ostream& os) {
  os << "round,metric,value\n";
  auto num = [&](int round, const char* metric, double v) {
    os << round << ',' << metric << ',' << format_double(v) << '\n';
  };
  auto cnt = [&](int round, const char* metric, std::size_t v) {
    os << round << ',' << metric << ',' << v << '\n';
  };
  for (const auto& m : rep.rounds) {
    cnt(m.round, "requests", m.requests);
    cnt(m.round, "fresh", m.fresh);
    cnt(m.round, "carried_in", m.carried_in);
    cnt(m.round, "hosted", m.hosted);
    cnt(m.round, "planned_unhosted", m.planned_unhosted);
    cnt(m.round, "rerouted", m.rerouted);
    cnt(m.round, "rejected", m.rejected);
    cnt(m.round, "dropped", m.dropped);
    num(m.round, "variance_cpu", m.variance_cpu);
    num(m.round, "variance_mem", m.variance_mem);
    num(m.round, "variance_overall", m.variance_overall);
    num(m.round, "predicted_variance_cpu", m.predicted_cpu);
    num(m.round, "predicted_variance_mem", m.predicted_mem);
    num(m.round, "predicted_variance_overall", m.predicted_overall);
    num(m.round, "variance_error", m.variance_error);
    num(m.round, "fog_utilization_cpu", m.fog_utilization_cpu);
    num(m.round, "fog_utilization_mem", m.fog_utilization_mem);
    num(m.round, "fog_utilization_overall", m.fog_utilization_overall);
    num(m.round, "violation_rate", m.violation_rate);
    num(m.round, "avg_execution_delay_ms", m.avg_execution_delay_ms);
    num(m.round, "deployment_bytes", m.deployment_bytes);
    cnt(m.round, "capacity_violations", m.capacity_violations);
    cnt(m.round, "stability_violations", m.stability_violations);
  }
  auto anum = [&](const char* metric, double v) {
    os << "all," << metric << ',' << format_double(v) << '\n';
  };
  auto acnt = [&](const char* metric, std::size_t v) {
    os << "all," << metric << ',' << v << '\n';
  };
  anum("mean_variance_overall", rep.mean_variance_overall);
  anum("mean_predicted_variance_overall", rep.mean_predicted_overall);
  anum("mean_variance_error", rep.mean_variance_error);
  anum("mean_fog_utilization", rep.mean_fog_utilization);
  anum("mean_violation_rate", rep.mean_violation_rate);
  anum("mean_execution_delay_ms", rep.mean_execution_delay_ms);
  anum("total_deployment_bytes", rep.total_deployment_bytes);
  acnt("total_requests", rep.total_requests);
  acnt("total_hosted", rep.total_hosted);
  acnt("total_rejected", rep.total_rejected);
  acnt("total_dropped", rep.total_dropped);
  acnt("pending_at_end", rep.pending_at_end);
  acnt("safety_violations", rep.safety_violations);
}

inline void write_iterations_csv(const std::vector<IterationRecord>& history, std::ostream& os) {
  os << "iteration,global_cost,local_cost,weighted_cost\n";
  for (const auto& rec : history) {
    os << rec.iteration << ',' << format_double(rec.global_cost) << ','
       << format_double(rec.local_cost) << ',' << format_double(rec.weighted_cost) << '\n';
  }
}

inline nlohmann::json summary_json(const RunConfig& cfg, const MetricsReport& rep) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["strategy"] = rep.strategy;
  j["rounds"] = rep.rounds.size();
  j["mean_variance_overall"] = rep.mean_variance_overall;
  j["mean_predicted_variance_overall"] = rep.mean_predicted_overall;
  j["mean_variance_error"] = rep.mean_variance_error;
  j["mean_fog_utilization"] = rep.mean_fog_utilization;
  j["mean_violation_rate"] = rep.mean_violation_rate;
  j["mean_execution_delay_ms"] = rep.mean_execution_delay_ms;
  j["total_deployment_bytes"] = rep.total_deployment_bytes;
  j["total_requests"] = rep.total_requests;
  j["total_hosted"] = rep.total_hosted;
  j["total_rejected"] = rep.total_rejected;
  j["total_dropped"] = rep.total_dropped;
  j["pending_at_end"] = rep.pending_at_end;
  j["safety_violations"] = rep.safety_violations;
  return j;
}

inline void write_requests_csv(const std::vector<ServiceRequest>& requests, std::ostream& os) {
  os << "id,arrival_ms,cpu,mem,storage,deadline_ms,ingress\n";
  for (const auto& r : requests) {
    os << r.id << ',' << format_double(r.arrival_ms) << ',' << format_double(r.cpu_demand) << ','
       << format_double(r.mem_demand) << ',' << format_double(r.storage_demand) << ','
       << format_double(r.deadline_ms) << ',' << r.ingress_node << '\n';
  }
}

inline void write_profiles_csv(const std::vector<WorkloadProfile>& profiles, std::ostream& os) {
  os << "cpu,mem,storage,count\n";
  for (const auto& p : profiles) {
    os << format_double(p.cpu) << ',' << format_double(p.mem) << ',' << format_double(p.storage)
       << ',' << p.request_count << '\n';
  }
}

// One row per plan: index, local cost, the assignment list, then the dense
// utilization vector.
inline void write_plan_set(const std::vector<PlacementPlan>& plans, std::size_t vector_len,
                           std::ostream& os) {
  for (std::size_t q = 0; q < plans.size(); ++q) {
    const auto& p = plans[q];
    os << q << ',' << format_double(p.local_cost) << ',';
    bool first = true;
    for (const auto& [rid, host] : p.assignments) {
      if (!first) os << ';';
      os << rid << ':' << host;
      first = false;
    }
    for (double v : p.dense_util(vector_len)) os << ',' << format_double(v);
    os << '\n';
  }
}

// Cell-level aggregates, one row per grid cell, in grid order.
inline void write_grid_comparison_csv(const std::vector<GridCell>& cells, std::ostream& os) {
  os << "strategy,topology,nodes,distribution,hops,lambda,seed,mean_variance_overall,"
        "mean_variance_error,mean_fog_utilization,mean_violation_rate,mean_execution_delay_ms,"
        "total_hosted,total_dropped,safety_violations,error\n";
  for (const auto& c : cells) {
    os << to_string(c.strategy) << ',' << to_string(c.kind) << ',' << c.nodes << ','
       << to_string(c.distribution) << ',' << hops_label(c.hop_limit) << ','
       << format_double(c.lambda) << ',' << c.seed << ','
       << format_double(c.report.mean_variance_overall) << ','
       << format_double(c.report.mean_variance_error) << ','
       << format_double(c.report.mean_fog_utilization) << ','
       << format_double(c.report.mean_violation_rate) << ','
       << format_double(c.report.mean_execution_delay_ms) << ',' << c.report.total_hosted << ','
       << c.report.total_dropped << ',' << c.report.safety_violations << ',' << c.error << '\n';
  }
}

namespace detail {

struct CellKey {
  std::string kind;
  int nodes;
  std::string dist;
  int hops;
  double lambda;
  std::uint64_t seed;
  bool operator<(const CellKey& o) const {
    return std::tie(kind, nodes, dist, hops, lambda, seed) <
           std::tie(o.kind, o.nodes, o.dist, o.hops, o.lambda, o.seed);
  }
};

inline CellKey key_of(const GridCell& c) {
  return {to_string(c.kind), c.nodes, to_string(c.distribution),
          c.hop_limit,       c.lambda, c.seed};
}

}  // namespace detail

// Paired per-round comparison of the two placement strategies at otherwise
// identical cells: spread of utilization and mean execution delay.
inline void write_strategy_difference_csv(const std::vector<GridCell>& cells, Strategy a,
                                          Strategy b, bool delays, std::ostream& os) {
  os << "topology,nodes,distribution,hops,lambda,seed,round," << to_string(a) << ','
     << to_string(b) << ",difference\n";
  std::map<detail::CellKey, const GridCell*> lookup;
  for (const auto& c : cells)
    if (c.strategy == b && c.error.empty()) lookup[detail::key_of(c)] = &c;
  for (const auto& c : cells) {
    if (c.strategy != a || !c.error.empty()) continue;
    auto it = lookup.find(detail::key_of(c));
    if (it == lookup.end()) continue;
    const auto& other = *it->second;
    const std::size_t rounds = std::min(c.report.rounds.size(), other.report.rounds.size());
    for (std::size_t r = 0; r < rounds; ++r) {
      const double va = delays ? c.report.rounds[r].avg_execution_delay_ms
                               : c.report.rounds[r].variance_overall;
      const double vb = delays ? other.report.rounds[r].avg_execution_delay_ms
                               : other.report.rounds[r].variance_overall;
      os << to_string(c.kind) << ',' << c.nodes << ',' << to_string(c.distribution) << ','
         << hops_label(c.hop_limit) << ',' << format_double(c.lambda) << ',' << c.seed << ','
         << r << ',' << format_double(va) << ',' << format_double(vb) << ','
         << format_double(va - vb) << '\n';
    }
  }
}

// Mean prediction error per cell with a min-max normalized column computed
// across the lambda axis within each (topology, nodes, distribution, hops,
// seed) family.
inline void write_variance_error_csv(const std::vector<GridCell>& cells, std::ostream& os) {
  struct FamilyKey {
    std::string kind;
    int nodes;
    std::string dist;
    int hops;
    std::uint64_t seed;
    bool operator<(const FamilyKey& o) const {
      return std::tie(kind, nodes, dist, hops, seed) <
             std::tie(o.kind, o.nodes, o.dist, o.hops, o.seed);
    }
  };
  std::map<FamilyKey, std::pair<double, double>> range;  // min, max over lambda
  for (const auto& c : cells) {
    if (c.strategy != Strategy::Collective || !c.error.empty()) continue;
    FamilyKey k{to_string(c.kind), c.nodes, to_string(c.distribution), c.hop_limit, c.seed};
    auto it = range.find(k);
    const double e = c.report.mean_variance_error;
    if (it == range.end()) range[k] = {e, e};
    else {
      it->second.first = std::min(it->second.first, e);
      it->second.second = std::max(it->second.second, e);
    }
  }
  os << "topology,nodes,distribution,hops,lambda,seed,error_raw,error_normalized\n";
  for (const auto& c : cells) {
    if (c.strategy != Strategy::Collective || !c.error.empty()) continue;
    FamilyKey k{to_string(c.kind), c.nodes, to_string(c.distribution), c.hop_limit, c.seed};
    const auto [lo, hi] = range.at(k);
    const double e = c.report.mean_variance_error;
    const double norm = (hi > lo) ? (e - lo) / (hi - lo) : 0.0;
    os << to_string(c.kind) << ',' << c.nodes << ',' << to_string(c.distribution) << ','
       << hops_label(c.hop_limit) << ',' << format_double(c.lambda) << ',' << c.seed << ','
       << format_double(e) << ',' << format_double(norm) << '\n';
  }
}

// Per-round fog layer utilization for every cell.
inline void write_fog_utilization_csv(const std::vector<GridCell>& cells, std::ostream& os) {
  os << "strategy,topology,nodes,distribution,hops,lambda,seed,round,cpu,mem,overall\n";
  for (const auto& c : cells) {
    if (!c.error.empty()) continue;
    for (const auto& m : c.report.rounds) {
      os << to_string(c.strategy) << ',' << to_string(c.kind) << ',' << c.nodes << ','
         << to_string(c.distribution) << ',' << hops_label(c.hop_limit) << ','
         << format_double(c.lambda) << ',' << c.seed << ',' << m.round << ','
         << format_double(m.fog_utilization_cpu) << ',' << format_double(m.fog_utilization_mem)
         << ',' << format_double(m.fog_utilization_overall) << '\n';
    }
  }
}

}  // namespace fogplace
