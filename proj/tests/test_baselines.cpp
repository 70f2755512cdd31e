#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "fogplace/baselines.hpp"

using namespace fogplace;

namespace {

// Star around fog node 0: fog neighbors 1 (2 ms) and 2 (5 ms), fog node 3
// reachable only through 1, cloud node 4 attached to node 2.
struct Star {
  NetworkGraph g{TopologyKind::ER, 5, 0, 1};
  ShortestPaths sp;
  CostParams cost;
  std::vector<NodeLoadState> loads;

  Star() {
    g.add_edge(0, 1, 2.0);
    g.add_edge(0, 2, 5.0);
    g.add_edge(1, 3, 1.0);
    g.add_edge(2, 4, 50.0);
    for (int i = 0; i < 4; ++i) {
      g.node(i).cpu_capacity = 10.0;
      g.node(i).mem_capacity = 10.0;
      g.node(i).storage_capacity = 10.0;
    }
    g.node(4).cpu_capacity = 1000.0;
    g.node(4).mem_capacity = 1000.0;
    g.node(4).storage_capacity = 1000.0;
    sp = compute_shortest_paths(g);
    loads.resize(5);
    for (int i = 0; i < 5; ++i) loads[i].node = i;
  }
};

ServiceRequest request(long long id, double cpu, int ingress, double arrival = 0.0) {
  ServiceRequest r;
  r.id = id;
  r.cpu_demand = cpu;
  r.mem_demand = 0.5;
  r.storage_demand = 0.5;
  r.deadline_ms = 1000.0;
  r.arrival_ms = arrival;
  r.ingress_node = ingress;
  return r;
}

}  // namespace

TEST_CASE("cloud baseline sends everything to the nearest cloud") {
  Star s;
  std::vector<ServiceRequest> reqs = {request(1, 50.0, 0), request(2, 1.0, 3),
                                      request(3, 1.0, 4)};
  const auto placed = place_cloud(reqs, s.g, s.sp);
  REQUIRE(placed.size() == 3);
  CHECK(placed.at(1) == 4);
  CHECK(placed.at(2) == 4);
  CHECK(placed.at(3) == 4);

  CHECK(place_cloud({}, s.g, s.sp).empty());
}

TEST_CASE("first fit prefers hosting at the ingress node") {
  Star s;
  const std::vector<ServiceRequest> reqs = {request(1, 3.0, 0)};
  const auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  REQUIRE(placed.size() == 1);
  CHECK(placed.at(1) == 0);
}

TEST_CASE("first fit can be told to skip the ingress node") {
  Star s;
  FirstFitOptions opt;
  opt.self_host = false;
  const std::vector<ServiceRequest> reqs = {request(1, 3.0, 0)};
  const auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost, opt);
  REQUIRE(placed.size() == 1);
  CHECK(placed.at(1) == 1);  // cheapest link instead of self
}

TEST_CASE("first fit walks neighbors by link latency") {
  Star s;
  s.loads[0].cpu = 9.0;  // self nearly full at reserve 0.95
  const std::vector<ServiceRequest> reqs = {request(1, 3.0, 0)};
  auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  CHECK(placed.at(1) == 1);  // 2 ms link beats 5 ms

  s.loads[1].cpu = 9.0;  // now the closer neighbor is full too
  placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  CHECK(placed.at(1) == 2);
}

TEST_CASE("first fit never looks past one hop") {
  Star s;
  // Node 3 sits two hops from node 0 and is the only fog node with room.
  s.loads[0].cpu = 9.0;
  s.loads[1].cpu = 9.0;
  s.loads[2].cpu = 9.0;
  const std::vector<ServiceRequest> reqs = {request(1, 3.0, 0)};
  const auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  CHECK(placed.at(1) == 4);  // cloud fallback, not the distant fog node
}

TEST_CASE("first fit accumulates load across requests") {
  Star s;
  // Each request takes 4 cpu against capacity 10 * 0.95: two fit on node 0,
  // the third spills to the 2 ms neighbor, and so on.
  std::vector<ServiceRequest> reqs;
  for (int i = 0; i < 6; ++i) reqs.push_back(request(i, 4.0, 0, 10.0 * i));
  const auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  REQUIRE(placed.size() == 6);
  CHECK(placed.at(0) == 0);
  CHECK(placed.at(1) == 0);
  CHECK(placed.at(2) == 1);
  CHECK(placed.at(3) == 1);
  CHECK(placed.at(4) == 2);
  CHECK(placed.at(5) == 2);
}

TEST_CASE("first fit processes requests in arrival order") {
  Star s;
  s.loads[1].cpu = 9.0;
  s.loads[2].cpu = 9.0;
  // Only one slot left on node 0; the earlier arrival gets it even though it
  // carries the higher id.
  std::vector<ServiceRequest> reqs = {request(9, 6.0, 0, 5.0), request(1, 6.0, 0, 20.0)};
  const auto placed = place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  CHECK(placed.at(9) == 0);
  CHECK(placed.at(1) == 4);

  // Equal arrivals break the tie by id.
  std::vector<ServiceRequest> tie = {request(9, 6.0, 0, 5.0), request(1, 6.0, 0, 5.0)};
  const auto placed2 = place_first_fit(tie, s.g, s.sp, s.loads, s.cost);
  CHECK(placed2.at(1) == 0);
  CHECK(placed2.at(9) == 4);
}

TEST_CASE("the caller's load vector is left untouched") {
  Star s;
  std::vector<ServiceRequest> reqs = {request(1, 4.0, 0)};
  (void)place_first_fit(reqs, s.g, s.sp, s.loads, s.cost);
  CHECK(s.loads[0].cpu == 0.0);
}
