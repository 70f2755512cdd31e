#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogplace/topology.hpp"
#include "fogplace/types.hpp"

namespace fogplace {

struct CostParams {
  double reserve_factor = 0.95;     // share of each capacity open to placements
  double time_unit_scale = 1000.0;  // converts 1/MIPS into milliseconds
};

// Realized load on one node. hosted_services holds the service types
// deployed there, which decides whether a later placement of the same type
// pays the image download again.
struct NodeLoadState {
  int node = -1;
  double cpu = 0.0;
  double mem = 0.0;
  double storage = 0.0;
  std::set<int> hosted_services;
};

// M/M/1 sojourn time at a node with the given service capacity and traffic
// arrival rate. Only defined for stable queues.
inline double processing_time_ms(double capacity, double arrival_rate, double scale = 1000.0) {
  if (capacity <= 0.0) throw std::domain_error("processing_time: capacity must be positive");
  if (arrival_rate >= capacity)
    throw std::domain_error("processing_time: arrival rate " + std::to_string(arrival_rate) +
                            " saturates capacity " + std::to_string(capacity));
  return scale / (capacity - arrival_rate);
}

// End-to-end response time of `req` executed on `host`: queueing at the host
// (with the request's own demand added to `prior_rate`), plus the round trip
// to a non-local host, plus time already spent waiting for a decision.
inline double response_time_ms(const ServiceRequest& req, int host, const NetworkGraph& g,
                               const ShortestPaths& sp, double prior_rate, double scale = 1000.0) {
  const double p = processing_time_ms(g.node(host).cpu_capacity, prior_rate + req.cpu_demand, scale);
  if (host == req.ingress_node) return p + req.waiting_ms;
  return p + 2.0 * path_delay_ms(sp, req.ingress_node, host) + req.waiting_ms;
}

// A deadline is met only by finishing strictly before it.
inline int deadline_violation(double response_ms, double deadline_ms) {
  return response_ms < deadline_ms ? 0 : 1;
}

// Storage that must move to stand up services on fog nodes not already
// running them. Cloud targets and already-hosted types cost nothing.
inline double deployment_cost(const std::map<long long, int>& assignments,
                              const std::vector<ServiceRequest>& requests,
                              const std::vector<NodeLoadState>& prior, const NetworkGraph& g) {
  double bytes = 0.0;
  for (const auto& r : requests) {
    auto it = assignments.find(r.id);
    if (it == assignments.end()) continue;
    const int host = it->second;
    if (g.node(host).layer == Layer::Cloud) continue;
    if (prior.at(host).hosted_services.count(r.service_type)) continue;
    bytes += r.storage_demand;
  }
  return bytes;
}

inline std::size_t unhosted_cost(const std::map<long long, int>& assignments,
                                 std::size_t total_requests) {
  return total_requests - assignments.size();
}

// Raw ingredients of a plan's local cost; normalized() folds them into the
// sum of three [0,1] terms (violation share, deployment share, unhosted
// share). An empty plan costs zero.
struct PlanCost {
  std::size_t requests = 0;
  std::size_t violations = 0;
  double deployment_bytes = 0.0;
  double total_storage_demand = 0.0;
  std::size_t unhosted = 0;

  double normalized() const {
    double c = 0.0;
    if (requests > 0) {
      c += static_cast<double>(violations) / static_cast<double>(requests);
      c += static_cast<double>(unhosted) / static_cast<double>(requests);
    }
    if (total_storage_demand > 0.0) c += deployment_bytes / total_storage_demand;
    return c;
  }
};

inline double local_cost(const PlanCost& terms) { return terms.normalized(); }

// Population variance.
inline double variance_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size());
}

enum class VarianceMetric { Cpu, Mem, Overall };

inline std::string to_string(VarianceMetric m) {
  switch (m) {
    case VarianceMetric::Cpu: return "cpu";
    case VarianceMetric::Mem: return "mem";
    case VarianceMetric::Overall: return "overall";
  }
  return "?";
}

inline VarianceMetric variance_metric_from_string(const std::string& s) {
  if (s == "cpu") return VarianceMetric::Cpu;
  if (s == "mem") return VarianceMetric::Mem;
  if (s == "overall") return VarianceMetric::Overall;
  throw std::invalid_argument("unknown variance metric: " + s);
}

// Spread of utilization ratios across all nodes: cpu ratios, memory ratios,
// or both concatenated (2N entries).
inline double utilization_variance(const std::vector<NodeLoadState>& loads, const NetworkGraph& g,
                                   VarianceMetric metric) {
  std::vector<double> ratios;
  ratios.reserve(2 * loads.size());
  if (metric != VarianceMetric::Mem)
    for (const auto& l : loads) ratios.push_back(l.cpu / g.node(l.node).cpu_capacity);
  if (metric != VarianceMetric::Cpu)
    for (const auto& l : loads) ratios.push_back(l.mem / g.node(l.node).mem_capacity);
  return variance_of(ratios);
}

// Variance over the matching slice of a stacked utilization vector
// (cpu ratios in the first half, memory ratios in the second).
inline double variance_slice(const std::vector<double>& stacked, VarianceMetric metric) {
  const std::size_t n = stacked.size() / 2;
  std::size_t lo = 0, hi = stacked.size();
  if (metric == VarianceMetric::Cpu) hi = n;
  if (metric == VarianceMetric::Mem) lo = n;
  std::vector<double> slice(stacked.begin() + lo, stacked.begin() + hi);
  return variance_of(slice);
}

// True when the load including a hypothetical assignment stays strictly
// below reserve_factor of every capacity dimension.
inline bool check_capacity(const NodeLoadState& after, const NodeSpec& node, double reserve) {
  return after.cpu < node.cpu_capacity * reserve && after.mem < node.mem_capacity * reserve &&
         after.storage < node.storage_capacity * reserve;
}

}  // namespace fogplace
