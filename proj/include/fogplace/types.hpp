#pragma once

#include <cstdint>

namespace fogplace {

enum class Layer { Fog, Cloud };

struct ResourceTriple {
  double cpu = 0.0;
  double mem = 0.0;
  double storage = 0.0;
};

struct NodeSpec {
  int id = -1;
  Layer layer = Layer::Fog;
  double cpu_capacity = 0.0;      // MIPS
  double mem_capacity = 0.0;
  double storage_capacity = 0.0;
};

struct ServiceRequest {
  long long id = -1;
  int service_type = 0;        // deadline-table row; identifies the deployable image
  double cpu_demand = 0.0;     // MIPS
  double mem_demand = 0.0;
  double storage_demand = 0.0;
  double deadline_ms = 0.0;
  double arrival_ms = 0.0;
  int ingress_node = -1;       // fog node that received the request
  double waiting_ms = 0.0;     // time already spent waiting for a placement decision
  int deferrals = 0;           // rounds this request has been carried over
};

// Hop bound meaning "the whole fog layer".
constexpr int kUnlimitedHops = -1;

}  // namespace fogplace
