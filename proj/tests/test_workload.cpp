#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "fogplace/topology.hpp"
#include "fogplace/workload.hpp"

using namespace fogplace;

TEST_CASE("synthetic profiles land in the configured ranges and vary") {
  SyntheticParams p;
  p.profile_count = 26;
  const auto profiles = load_profiles_synthetic(p, 9);
  REQUIRE(profiles.size() == 26);
  std::set<double> cpus;
  for (const auto& w : profiles) {
    CHECK(w.cpu >= p.cpu_min);
    CHECK(w.cpu < p.cpu_max);
    CHECK(w.mem >= p.mem_min);
    CHECK(w.mem < p.mem_max);
    CHECK(w.storage >= p.storage_min);
    CHECK(w.storage < p.storage_max);
    CHECK(w.request_count >= p.requests_min);
    CHECK(w.request_count <= p.requests_max);
    cpus.insert(w.cpu);
  }
  CHECK(cpus.size() == 26);  // consecutive profiles differ
  const auto again = load_profiles_synthetic(p, 9);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    REQUIRE(profiles[i].cpu == again[i].cpu);
    REQUIRE(profiles[i].request_count == again[i].request_count);
  }
}

TEST_CASE("an all-zero synthetic profile carries no requests") {
  SyntheticParams p;
  p.profile_count = 1;
  p.cpu_min = p.cpu_max = 0.0;
  p.mem_min = p.mem_max = 0.0;
  p.storage_min = p.storage_max = 0.0;
  const auto profiles = load_profiles_synthetic(p, 1);
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].request_count == 0);
  const auto reqs =
      materialize_requests(profiles[0], default_deadline_table(), 0.0, 300000.0, 1, 0);
  CHECK(reqs.empty());
}

TEST_CASE("profile csv parses rows in order") {
  std::stringstream in(
      "cpu,mem,storage,count\n"
      "180.5,200,60,150\n"
      "380,430,150,450\n"
      "200,210,70,0\n"
      "\n"
      "300,300,100,9\n"
      "310,310,110,10\n");
  const auto profiles = load_profiles_csv(in);
  REQUIRE(profiles.size() == 5);
  CHECK(profiles[0].index == 0);
  CHECK(profiles[0].cpu == 180.5);
  CHECK(profiles[0].request_count == 150);
  CHECK(profiles[2].request_count == 0);
  CHECK(profiles[4].index == 4);
}

TEST_CASE("profile csv rejects malformed input with the line number") {
  {
    std::stringstream in("cpu,mem,storage\n");
    CHECK_THROWS_WITH(load_profiles_csv(in), Catch::Matchers::ContainsSubstring("header"));
  }
  {
    std::stringstream in("cpu,mem,storage,count\n1,2,3\n");
    CHECK_THROWS_WITH(load_profiles_csv(in), Catch::Matchers::ContainsSubstring("line 2"));
  }
  {
    std::stringstream in("cpu,mem,storage,count\n1,2,3,4\n1,x,3,4\n");
    CHECK_THROWS_WITH(load_profiles_csv(in), Catch::Matchers::ContainsSubstring("line 3"));
  }
  {
    std::stringstream in("cpu,mem,storage,count\n-1,2,3,4\n");
    CHECK_THROWS_WITH(load_profiles_csv(in), Catch::Matchers::ContainsSubstring("line 2"));
  }
}

TEST_CASE("materialized batches sum back to the profile aggregates") {
  WorkloadProfile w;
  w.index = 2;
  w.cpu = 20.0;
  w.mem = 35.0;
  w.storage = 11.0;
  w.request_count = 4;
  const auto reqs = materialize_requests(w, default_deadline_table(), 300000.0, 300000.0, 5, 100);
  REQUIRE(reqs.size() == 4);
  double cpu = 0.0, mem = 0.0, sto = 0.0;
  for (const auto& r : reqs) {
    REQUIRE(r.cpu_demand > 0.0);
    REQUIRE(r.mem_demand > 0.0);
    REQUIRE(r.storage_demand > 0.0);
    REQUIRE(r.arrival_ms >= 300000.0);
    REQUIRE(r.arrival_ms < 600000.0);
    REQUIRE(r.waiting_ms == 0.0);
    cpu += r.cpu_demand;
    mem += r.mem_demand;
    sto += r.storage_demand;
  }
  CHECK_THAT(cpu, Catch::Matchers::WithinRel(20.0, 1e-9));
  CHECK_THAT(mem, Catch::Matchers::WithinRel(35.0, 1e-9));
  CHECK_THAT(sto, Catch::Matchers::WithinRel(11.0, 1e-9));
  CHECK(reqs.front().id == 100);
  CHECK(reqs.back().id == 103);
}

TEST_CASE("deadlines come from the table only") {
  WorkloadProfile w;
  w.index = 0;
  w.cpu = 1000.0;
  w.mem = 1000.0;
  w.storage = 1000.0;
  w.request_count = 10000;
  const auto& table = default_deadline_table();
  REQUIRE(table.size() == 10);
  const std::set<double> fixed = {100000.0, 10000.0, 1000.0, 100.0, 50.0, 30.0, 10.0, 5.0, 1.0};
  const auto reqs = materialize_requests(w, table, 0.0, 300000.0, 77, 0);
  std::set<int> types;
  for (const auto& r : reqs) {
    types.insert(r.service_type);
    REQUIRE(r.service_type >= 0);
    REQUIRE(r.service_type < 10);
    if (fixed.count(r.deadline_ms)) continue;
    // the only variable row spans 2..10 ms
    REQUIRE(r.deadline_ms >= 2.0);
    REQUIRE(r.deadline_ms <= 10.0);
    REQUIRE(r.service_type == 8);
  }
  CHECK(types.size() == 10);  // every service class shows up across 10000 draws
}

TEST_CASE("materialization is deterministic per (profile, seed)") {
  WorkloadProfile w;
  w.index = 1;
  w.cpu = 250.0;
  w.mem = 300.0;
  w.storage = 90.0;
  w.request_count = 333;
  const auto a = materialize_requests(w, default_deadline_table(), 0.0, 300000.0, 42, 0);
  const auto b = materialize_requests(w, default_deadline_table(), 0.0, 300000.0, 42, 0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].cpu_demand == b[i].cpu_demand);
    REQUIRE(a[i].deadline_ms == b[i].deadline_ms);
    REQUIRE(a[i].arrival_ms == b[i].arrival_ms);
  }
  const auto c = materialize_requests(w, default_deadline_table(), 0.0, 300000.0, 43, 0);
  CHECK(a[0].cpu_demand != c[0].cpu_demand);
}

namespace {

std::vector<ServiceRequest> many_requests(int count) {
  std::vector<ServiceRequest> reqs(count);
  for (int i = 0; i < count; ++i) reqs[i].id = i;
  return reqs;
}

}  // namespace

TEST_CASE("uniform ingress spreads evenly over fog nodes") {
  TopologyParams p;
  const auto g = generate_topology(TopologyKind::WS, 201, p, 3, 1);  // 200 fog nodes
  auto reqs = many_requests(100000);
  distribute_to_ingress(reqs, g, IngressMode::Rand, 11);
  std::vector<int> counts(g.size(), 0);
  for (const auto& r : reqs) {
    REQUIRE(g.node(r.ingress_node).layer == Layer::Fog);
    ++counts[r.ingress_node];
  }
  const double expect = 100000.0 / 200.0;
  int within = 0;
  for (int id : g.fog_ids())
    if (std::abs(counts[id] - expect) <= 0.2 * expect) ++within;
  CHECK(within >= 190);  // >= 95% of nodes within +-20%
}

TEST_CASE("beta ingress matches the Beta(2,5) mean and skews low") {
  TopologyParams p;
  const auto g = generate_topology(TopologyKind::WS, 201, p, 3, 1);
  auto reqs = many_requests(100000);
  distribute_to_ingress(reqs, g, IngressMode::Beta, 13);
  const auto fog = g.fog_ids();
  double mean_index = 0.0;
  for (const auto& r : reqs) {
    REQUIRE(g.node(r.ingress_node).layer == Layer::Fog);
    const auto pos = std::find(fog.begin(), fog.end(), r.ingress_node) - fog.begin();
    mean_index += static_cast<double>(pos);
  }
  mean_index /= (100000.0 * 200.0);
  CHECK_THAT(mean_index, Catch::Matchers::WithinAbs(2.0 / 7.0, 0.01));
}

TEST_CASE("single fog node receives everything") {
  NetworkGraph g(TopologyKind::ER, 2, 0, 1);
  g.add_edge(0, 1, 50.0);
  auto reqs = many_requests(50);
  distribute_to_ingress(reqs, g, IngressMode::Beta, 1);
  for (const auto& r : reqs) REQUIRE(r.ingress_node == 0);
}
