#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fogplace/costmodel.hpp"
#include "fogplace/rng.hpp"
#include "fogplace/topology.hpp"
#include "fogplace/types.hpp"

namespace fogplace {

// One candidate placement: which host takes which request, the utilization
// the plan adds to the network (sparse over a stacked 2N vector: cpu ratios
// then memory ratios), and its local cost.
struct PlacementPlan {
  std::map<long long, int> assignments;              // request id -> host id
  std::vector<std::pair<int, double>> util_entries;  // index-sorted sparse vector
  std::vector<long long> unhosted;                   // request ids left without a host
  double local_cost = 0.0;
  PlanCost cost_terms;

  std::vector<double> dense_util(std::size_t len) const {
    std::vector<double> v(len, 0.0);
    for (const auto& [i, x] : util_entries) v.at(i) = x;
    return v;
  }

  bool same_assignments(const PlacementPlan& other) const {
    return assignments == other.assignments;
  }
};

// What one agent knows when it plans: its own requests, the fog nodes within
// the hop bound (sorted by hop then id, itself included at hop 0), the
// closest cloud node, and a snapshot of node loads at planning time.
// host_weights, when present, biases the host draw per candidate; a host
// that many agents can reach should carry a proportionally lower weight or
// the combined plans pile onto it.
struct AgentView {
  int agent = -1;
  std::vector<ServiceRequest> requests;
  std::vector<int> candidate_hosts;
  std::vector<double> host_weights;  // empty means uniform
  int closest_cloud = -1;
  std::shared_ptr<const std::vector<NodeLoadState>> prior_loads;
  std::uint64_t seed = 0;
};

struct PlanGenOptions {
  bool retry_next_host = false;  // on a failed fit, try the remaining hosts before the cloud
};

namespace detail {

struct WorkingLoad {
  double cpu = 0.0, mem = 0.0, storage = 0.0;
};

inline bool fits(const WorkingLoad& base, const NodeLoadState& prior, const ServiceRequest& r,
                 const NodeSpec& node, double reserve) {
  NodeLoadState after;
  after.cpu = prior.cpu + base.cpu + r.cpu_demand;
  after.mem = prior.mem + base.mem + r.mem_demand;
  after.storage = prior.storage + base.storage + r.storage_demand;
  return check_capacity(after, node, reserve);
}

}  // namespace detail

// Greedy construction of one plan: requests sorted by remaining slack
// (deadline minus waiting time), a weighted draw of |requests| hosts from
// the neighborhood sorted by proximity, then a one-to-one sweep. A request
// whose paired host cannot take it falls through to the closest cloud node,
// or is left unhosted. The hosts drawn are distinct while the neighborhood
// is large enough and cycle through it otherwise.
inline PlacementPlan generate_one_plan(const AgentView& view, const NetworkGraph& g,
                                       const ShortestPaths& sp, const CostParams& cost,
                                       const PlanGenOptions& opt, std::uint64_t plan_seed) {
  const auto& prior = *view.prior_loads;
  PlacementPlan plan;

  std::vector<ServiceRequest> reqs = view.requests;
  std::sort(reqs.begin(), reqs.end(), [](const ServiceRequest& a, const ServiceRequest& b) {
    const double sa = a.deadline_ms - a.waiting_ms;
    const double sb = b.deadline_ms - b.waiting_ms;
    if (sa != sb) return sa < sb;
    return a.id < b.id;
  });
  plan.cost_terms.requests = reqs.size();
  for (const auto& r : reqs) plan.cost_terms.total_storage_demand += r.storage_demand;

  Rng rng(plan_seed);
  const std::vector<int>& pool = view.candidate_hosts;
  std::vector<int> hosts;
  hosts.reserve(reqs.size());
  std::vector<std::size_t> avail;  // indices into pool, refilled per pass
  std::vector<double> weight;
  while (hosts.size() < reqs.size() && !pool.empty()) {
    if (avail.empty()) {
      avail.resize(pool.size());
      std::iota(avail.begin(), avail.end(), 0);
      weight.assign(pool.size(), 1.0);
      if (!view.host_weights.empty())
        for (std::size_t i = 0; i < pool.size(); ++i) weight[i] = view.host_weights[i];
    }
    double total = 0.0;
    for (double w : weight) total += w;
    const double x = rng.uniform(0.0, total);
    double acc = 0.0;
    std::size_t j = avail.size() - 1;
    for (std::size_t i = 0; i < avail.size(); ++i) {
      acc += weight[i];
      if (x < acc) {
        j = i;
        break;
      }
    }
    hosts.push_back(pool[avail[j]]);
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(j));
    weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(j));
  }
  std::stable_sort(hosts.begin(), hosts.end(), [&](int a, int b) {
    const int ha = sp.hops[view.agent][a];
    const int hb = sp.hops[view.agent][b];
    if (ha != hb) return ha < hb;
    return a < b;
  });

  std::map<int, detail::WorkingLoad> added;  // per-host load this plan adds
  auto try_host = [&](const ServiceRequest& r, int host) {
    if (!detail::fits(added[host], prior.at(host), r, g.node(host), cost.reserve_factor))
      return false;
    auto& w = added[host];
    w.cpu += r.cpu_demand;
    w.mem += r.mem_demand;
    w.storage += r.storage_demand;
    plan.assignments[r.id] = host;
    return true;
  };

  for (std::size_t k = 0; k < reqs.size(); ++k) {
    const auto& r = reqs[k];
    bool placed = k < hosts.size() && try_host(r, hosts[k]);
    if (!placed && opt.retry_next_host) {
      for (std::size_t j = k + 1; j < hosts.size() && !placed; ++j) placed = try_host(r, hosts[j]);
    }
    if (!placed && view.closest_cloud >= 0) placed = try_host(r, view.closest_cloud);
    if (!placed) plan.unhosted.push_back(r.id);
  }

  // Evaluate the plan against its own predicted end state.
  for (const auto& r : reqs) {
    auto it = plan.assignments.find(r.id);
    if (it == plan.assignments.end()) continue;
    const int host = it->second;
    const double z_before = prior.at(host).cpu + added[host].cpu - r.cpu_demand;
    const double e = response_time_ms(r, host, g, sp, z_before, cost.time_unit_scale);
    plan.cost_terms.violations += deadline_violation(e, r.deadline_ms);
    if (g.node(host).layer == Layer::Fog &&
        !prior.at(host).hosted_services.count(r.service_type))
      plan.cost_terms.deployment_bytes += r.storage_demand;
  }
  plan.cost_terms.unhosted = plan.unhosted.size();
  plan.local_cost = plan.cost_terms.normalized();

  const std::size_t n = g.size();
  for (const auto& [host, w] : added) {
    const auto& spec = g.node(host);
    plan.util_entries.emplace_back(host, (prior.at(host).cpu + w.cpu) / spec.cpu_capacity);
  }
  for (const auto& [host, w] : added) {
    const auto& spec = g.node(host);
    plan.util_entries.emplace_back(static_cast<int>(n) + host,
                                   (prior.at(host).mem + w.mem) / spec.mem_capacity);
  }
  return plan;
}

// The agent's plan set: up to plan_count distinct plans sorted by ascending
// local cost (ties keep generation order). An agent with no requests gets a
// single empty plan.
inline std::vector<PlacementPlan> generate_plans(const AgentView& view, int plan_count,
                                                 const NetworkGraph& g, const ShortestPaths& sp,
                                                 const CostParams& cost,
                                                 const PlanGenOptions& opt = {}) {
  if (plan_count < 1) throw std::invalid_argument("plan count must be positive");
  if (!view.prior_loads) throw std::invalid_argument("agent view lacks a load snapshot");
  if (!view.host_weights.empty()) {
    if (view.host_weights.size() != view.candidate_hosts.size())
      throw std::invalid_argument("host weights must pair up with the candidate hosts");
    for (double w : view.host_weights)
      if (!(w > 0.0)) throw std::invalid_argument("host weights must be positive");
  }
  std::vector<PlacementPlan> plans;
  for (int q = 0; q < plan_count; ++q) {
    PlacementPlan p = generate_one_plan(view, g, sp, cost, opt,
                                        derive_seed(view.seed, SeedTag::Plans,
                                                    static_cast<std::uint64_t>(q)));
    bool dup = false;
    for (const auto& seen : plans)
      if (seen.same_assignments(p)) {
        dup = true;
        break;
      }
    if (!dup) plans.push_back(std::move(p));
  }
  std::stable_sort(plans.begin(), plans.end(),
                   [](const PlacementPlan& a, const PlacementPlan& b) {
                     return a.local_cost < b.local_cost;
                   });
  return plans;
}

}  // namespace fogplace
