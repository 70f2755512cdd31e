#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "fogplace/rng.hpp"
#include "fogplace/topology.hpp"

using namespace fogplace;

namespace {

// Independent all-pairs hop counts for cross-checking the BFS results.
std::vector<std::vector<int>> floyd_warshall_hops(const NetworkGraph& g) {
  const int n = g.size();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [key, _] : g.edges()) d[key.first][key.second] = d[key.second][key.first] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = -1;
  return d;
}

}  // namespace

TEST_CASE("BA with m=1 is a tree") {
  const auto g = generate_topology(TopologyKind::BA, 5, TopologyParams{1, 4, 0.1, 0.05}, 3);
  CHECK(g.edge_count() == 4);
  CHECK(g.is_connected());
}

TEST_CASE("BA edge count is m*(n-m)") {
  TopologyParams p;
  p.ba_m = 2;
  const auto g = generate_topology(TopologyKind::BA, 200, p, 1);
  CHECK(g.edge_count() == 2 * (200 - 2));
  CHECK(g.is_connected());
  CHECK(g.patched_edges() == 0);
}

TEST_CASE("WS keeps the lattice edge count and a degree floor") {
  TopologyParams p;
  p.ws_k = 4;
  p.ws_beta = 0.1;
  const auto g = generate_topology(TopologyKind::WS, 200, p, 42);
  CHECK(g.edge_count() == 200 * 4 / 2 + static_cast<std::size_t>(g.patched_edges()));
  CHECK(g.is_connected());
  // A node keeps every edge it rewires as the source, so degree >= k/2.
  for (int i = 0; i < g.size(); ++i) CHECK(g.degree(i) >= 2);
}

TEST_CASE("WS with beta=0 is the exact ring lattice") {
  TopologyParams p;
  p.ws_k = 4;
  p.ws_beta = 0.0;
  const auto g = generate_topology(TopologyKind::WS, 20, p, 7);
  REQUIRE(g.edge_count() == 40);
  for (int i = 0; i < 20; ++i) {
    CHECK(g.has_edge(i, (i + 1) % 20));
    CHECK(g.has_edge(i, (i + 2) % 20));
    CHECK(g.degree(i) == 4);
  }
}

TEST_CASE("ER with p=1 on two nodes yields the single edge") {
  TopologyParams p;
  p.er_p = 1.0;
  const auto g = generate_topology(TopologyKind::ER, 2, p, 5);
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(0, 1));
}

TEST_CASE("sparse ER ends up connected via bridging") {
  TopologyParams p;
  p.er_p = 0.004;  // expected degree < 1: disconnection guaranteed in practice
  const auto g = generate_topology(TopologyKind::ER, 200, p, 9);
  CHECK(g.is_connected());
  CHECK(g.patched_edges() > 0);
}

TEST_CASE("generator parameter validation") {
  CHECK_THROWS_AS(generate_topology(TopologyKind::BA, 5, TopologyParams{5, 4, 0.1, 0.05}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(TopologyKind::WS, 5, TopologyParams{2, 3, 0.1, 0.05}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(TopologyKind::ER, 5, TopologyParams{2, 4, 0.1, 0.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(NetworkGraph(TopologyKind::ER, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkGraph(TopologyKind::ER, 4, 0, 4), std::invalid_argument);
}

TEST_CASE("cloud nodes take the highest ids and WAN delays") {
  TopologyParams p;
  p.ba_m = 2;
  DelayParams dp;
  dp.wan_ms = 50.0;
  const auto g = generate_topology(TopologyKind::BA, 50, p, 4, 2, dp);
  CHECK(g.fog_count() == 48);
  CHECK(g.cloud_ids() == std::vector<int>{48, 49});
  for (const auto& [key, delay] : g.edges()) {
    const bool touches_cloud = key.first >= 48 || key.second >= 48;
    if (touches_cloud) {
      CHECK(delay == 50.0);
    } else {
      CHECK(delay >= 1.0);
      CHECK(delay < 10.0);
    }
  }
}

TEST_CASE("same seed regenerates the identical network") {
  TopologyParams p;
  for (auto kind : {TopologyKind::BA, TopologyKind::WS, TopologyKind::ER}) {
    const auto a = generate_topology(kind, 100, p, 21);
    const auto b = generate_topology(kind, 100, p, 21);
    REQUIRE(a.edges() == b.edges());
    const auto c = generate_topology(kind, 100, p, 22);
    CHECK(a.edges() != c.edges());
  }
}

TEST_CASE("hop distances match a Floyd-Warshall oracle") {
  TopologyParams p;
  p.ba_m = 2;
  const auto g = generate_topology(TopologyKind::BA, 200, p, 1);
  const auto sp = compute_shortest_paths(g);
  const auto oracle = floyd_warshall_hops(g);
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int u = static_cast<int>(rng.uniform_int(200));
    const int v = static_cast<int>(rng.uniform_int(200));
    REQUIRE(hop_distance(sp, u, v) == oracle[u][v]);
    REQUIRE(hop_distance(sp, u, v) == hop_distance(sp, v, u));
  }
  CHECK(hop_distance(sp, 3, 3) == 0);
}

TEST_CASE("hop distance obeys the triangle inequality") {
  TopologyParams p;
  const auto g = generate_topology(TopologyKind::ER, 120, p, 6);
  const auto sp = compute_shortest_paths(g);
  Rng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const int a = static_cast<int>(rng.uniform_int(120));
    const int b = static_cast<int>(rng.uniform_int(120));
    const int c = static_cast<int>(rng.uniform_int(120));
    REQUIRE(hop_distance(sp, a, c) <= hop_distance(sp, a, b) + hop_distance(sp, b, c));
  }
}

TEST_CASE("path delay on a forced path sums the edge delays") {
  NetworkGraph g(TopologyKind::ER, 3, 0, 0);
  g.add_edge(0, 1, 2.5);
  g.add_edge(1, 2, 4.0);
  const auto sp = compute_shortest_paths(g);
  CHECK(hop_distance(sp, 0, 2) == 2);
  CHECK(path_delay_ms(sp, 0, 2) == 6.5);
  CHECK(path_delay_ms(sp, 2, 0) == 6.5);
  CHECK(path_delay_ms(sp, 1, 1) == 0.0);
}

TEST_CASE("neighborhood ordering and hop monotonicity") {
  // Path 0-1-2-3 with node 4 as an isolated-by-layer cloud attached to 3.
  NetworkGraph g(TopologyKind::ER, 5, 0, 1);
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 2, 1.0);
  g.add_edge(2, 3, 1.0);
  g.add_edge(3, 4, 50.0);
  const auto sp = compute_shortest_paths(g);

  CHECK(neighborhood(g, sp, 0, 1) == std::vector<int>{0, 1});
  CHECK(neighborhood(g, sp, 0, 2) == std::vector<int>{0, 1, 2});
  CHECK(neighborhood(g, sp, 0, kUnlimitedHops) == std::vector<int>{0, 1, 2, 3});
  CHECK(neighborhood(g, sp, 4, 1) == std::vector<int>{3});  // cloud center is excluded

  TopologyParams p;
  const auto big = generate_topology(TopologyKind::WS, 200, p, 42);
  const auto bsp = compute_shortest_paths(big);
  const auto unlimited = neighborhood(big, bsp, 17, kUnlimitedHops);
  CHECK(unlimited.size() == static_cast<std::size_t>(big.fog_count()));
  std::vector<int> prev;
  for (int h = 1; h <= 6; ++h) {
    const auto cur = neighborhood(big, bsp, 17, h);
    std::set<int> cur_set(cur.begin(), cur.end());
    for (int id : prev) REQUIRE(cur_set.count(id) == 1);
    prev = cur;
  }
}

TEST_CASE("nearest cloud picks the smallest path delay") {
  NetworkGraph g(TopologyKind::ER, 5, 0, 2);  // clouds are 3 and 4
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 3, 50.0);
  g.add_edge(0, 2, 1.0);
  g.add_edge(2, 4, 10.0);
  const auto sp = compute_shortest_paths(g);
  CHECK(nearest_cloud(g, sp, 0) == 4);  // 11 ms beats 51 ms
  CHECK(nearest_cloud(g, sp, 1) == 4);  // 12 ms via 1-0-2-4 beats the direct 50 ms link
  CHECK(nearest_cloud(g, sp, 3) == 3);  // a cloud node is its own nearest cloud
}

TEST_CASE("uniform capacities split the totals exactly") {
  NetworkGraph g(TopologyKind::ER, 5, 0, 1);
  for (int i = 0; i < 4; ++i) g.add_edge(i, i + 1, 1.0);
  const auto out = assign_capacities(g, {704.0, 792.5, 313.5}, {400.0, 500.0, 200.0});
  for (int i = 0; i < 4; ++i) {
    CHECK(out.node(i).cpu_capacity == 176.0);
    CHECK(out.node(i).mem_capacity == 198.125);
    CHECK(out.node(i).storage_capacity == 78.375);
  }
  CHECK(out.node(4).cpu_capacity == 400.0);
  CHECK(out.node(4).mem_capacity == 500.0);
  CHECK(out.node(4).storage_capacity == 200.0);
}

TEST_CASE("dirichlet capacities stay positive and sum to the total") {
  NetworkGraph g(TopologyKind::ER, 11, 0, 1);
  for (int i = 0; i < 10; ++i) g.add_edge(i, (i + 1) % 11, 1.0);
  const auto out =
      assign_capacities(g, {704.0, 792.5, 313.5}, {400.0, 500.0, 200.0}, CapacitySplit::Dirichlet, 1, 3);
  double cpu = 0.0, mem = 0.0, sto = 0.0;
  for (int id : out.fog_ids()) {
    REQUIRE(out.node(id).cpu_capacity > 0.0);
    cpu += out.node(id).cpu_capacity;
    mem += out.node(id).mem_capacity;
    sto += out.node(id).storage_capacity;
  }
  CHECK_THAT(cpu, Catch::Matchers::WithinRel(704.0, 1e-9));
  CHECK_THAT(mem, Catch::Matchers::WithinRel(792.5, 1e-9));
  CHECK_THAT(sto, Catch::Matchers::WithinRel(313.5, 1e-9));
}

TEST_CASE("export and import round-trip bit-exactly") {
  TopologyParams p;
  auto g = assign_capacities(generate_topology(TopologyKind::WS, 60, p, 12, 2),
                             {704.0, 792.5, 313.5}, {400.0, 500.0, 200.0},
                             CapacitySplit::Dirichlet, 1, 12);
  std::stringstream edges1, nodes1;
  export_edges(g, edges1);
  export_nodes(g, nodes1);

  std::stringstream edges_in(edges1.str()), nodes_in(nodes1.str());
  const auto back = import_graph(edges_in, nodes_in);

  REQUIRE(back.size() == g.size());
  REQUIRE(back.kind() == g.kind());
  REQUIRE(back.seed() == g.seed());
  REQUIRE(back.patched_edges() == g.patched_edges());
  REQUIRE(back.edges() == g.edges());
  for (int i = 0; i < g.size(); ++i) {
    REQUIRE(back.node(i).layer == g.node(i).layer);
    REQUIRE(back.node(i).cpu_capacity == g.node(i).cpu_capacity);
    REQUIRE(back.node(i).mem_capacity == g.node(i).mem_capacity);
    REQUIRE(back.node(i).storage_capacity == g.node(i).storage_capacity);
  }

  std::stringstream edges2, nodes2;
  export_edges(back, edges2);
  export_nodes(back, nodes2);
  CHECK(edges2.str() == edges1.str());
  CHECK(nodes2.str() == nodes1.str());
}

TEST_CASE("import rejects malformed inputs with line numbers") {
  {
    std::stringstream edges("# fogplace-graph BA 2 0 0\n0 1 3.0\n");
    std::stringstream nodes("wrong,header\n");
    CHECK_THROWS_WITH(import_graph(edges, nodes),
                      Catch::Matchers::ContainsSubstring("header"));
  }
  {
    std::stringstream edges("# fogplace-graph BA 2 0 0\n0 one 3.0\n");
    std::stringstream nodes("id,layer,cpu,mem,storage\n0,fog,1,1,1\n1,cloud,1,1,1\n");
    CHECK_THROWS_WITH(import_graph(edges, nodes), Catch::Matchers::ContainsSubstring("line 2"));
  }
  {
    std::stringstream edges("0 1 3.0\n");
    std::stringstream nodes("id,layer,cpu,mem,storage\n0,fog,1,1,1\n1,cloud,1,1,1\n");
    CHECK_THROWS_WITH(import_graph(edges, nodes),
                      Catch::Matchers::ContainsSubstring("header"));
  }
}
