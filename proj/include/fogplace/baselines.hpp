#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "fogplace/costmodel.hpp"
#include "fogplace/topology.hpp"
#include "fogplace/types.hpp"

namespace fogplace {

// Everything goes to the closest cloud node, capacity ignored: the cloud is
// treated as effectively unbounded.
inline std::map<long long, int> place_cloud(const std::vector<ServiceRequest>& requests,
                                            const NetworkGraph& g, const ShortestPaths& sp) {
  std::map<long long, int> out;
  for (const auto& r : requests) {
    const int c = nearest_cloud(g, sp, r.ingress_node);
    if (c >= 0) out[r.id] = c;
  }
  return out;
}

struct FirstFitOptions {
  bool self_host = true;  // consider the ingress node itself before neighbors
};

// Requests in arrival order (ties by id); each one takes the first node of
// {ingress, its direct fog neighbors sorted by link latency} that can hold
// it, and falls back to the closest cloud node otherwise. `loads` is taken
// by value as the working state the fit checks run against.
inline std::map<long long, int> place_first_fit(const std::vector<ServiceRequest>& requests,
                                                const NetworkGraph& g, const ShortestPaths& sp,
                                                std::vector<NodeLoadState> loads,
                                                const CostParams& cost,
                                                const FirstFitOptions& opt = {}) {
  std::vector<const ServiceRequest*> order;
  order.reserve(requests.size());
  for (const auto& r : requests) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const ServiceRequest* a, const ServiceRequest* b) {
    if (a->arrival_ms != b->arrival_ms) return a->arrival_ms < b->arrival_ms;
    return a->id < b->id;
  });

  std::map<long long, int> out;
  std::map<int, std::vector<int>> candidates_by_ingress;
  for (const ServiceRequest* r : order) {
    auto it = candidates_by_ingress.find(r->ingress_node);
    if (it == candidates_by_ingress.end()) {
      std::vector<std::pair<double, int>> ranked;
      if (opt.self_host) ranked.emplace_back(0.0, r->ingress_node);
      for (int v : g.neighbors(r->ingress_node))
        if (g.node(v).layer == Layer::Fog)
          ranked.emplace_back(g.edge_delay(r->ingress_node, v), v);
      std::sort(ranked.begin(), ranked.end());
      std::vector<int> ids;
      for (auto& [_, id] : ranked) ids.push_back(id);
      it = candidates_by_ingress.emplace(r->ingress_node, std::move(ids)).first;
    }

    bool placed = false;
    for (int host : it->second) {
      NodeLoadState after = loads[host];
      after.cpu += r->cpu_demand;
      after.mem += r->mem_demand;
      after.storage += r->storage_demand;
      if (!check_capacity(after, g.node(host), cost.reserve_factor)) continue;
      loads[host].cpu = after.cpu;
      loads[host].mem = after.mem;
      loads[host].storage = after.storage;
      out[r->id] = host;
      placed = true;
      break;
    }
    if (!placed) {
      const int c = nearest_cloud(g, sp, r->ingress_node);
      if (c >= 0) out[r->id] = c;  // no capacity check; overflow surfaces at apply time
    }
  }
  return out;
}

}  // namespace fogplace
