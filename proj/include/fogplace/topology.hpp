#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogplace/rng.hpp"
#include "fogplace/types.hpp"

namespace fogplace {

enum class TopologyKind { BA, WS, ER };

inline std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::BA: return "BA";
    case TopologyKind::WS: return "WS";
    case TopologyKind::ER: return "ER";
  }
  return "?";
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
  if (s == "BA" || s == "ba") return TopologyKind::BA;
  if (s == "WS" || s == "ws") return TopologyKind::WS;
  if (s == "ER" || s == "er") return TopologyKind::ER;
  throw std::invalid_argument("unknown topology kind: " + s);
}

struct TopologyParams {
  int ba_m = 2;        // edges attached per new node
  int ws_k = 4;        // ring degree, even
  double ws_beta = 0.1;  // rewiring probability
  double er_p = 0.05;  // independent edge probability
};

struct DelayParams {
  double fog_min_ms = 1.0;
  double fog_max_ms = 10.0;
  double wan_ms = 50.0;  // every edge touching a cloud node
};

// Formats a double so that parsing the text recovers the exact bit pattern.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Undirected network of fog nodes plus one or more cloud nodes. Node ids are
// contiguous; cloud nodes occupy the highest ids. Immutable once generated,
// so lookups are safe for concurrent readers.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(TopologyKind kind, int n, std::uint64_t seed, int cloud_count)
      : kind_(kind), seed_(seed), nodes_(n), adj_(n) {
    if (n < 2) throw std::invalid_argument("network needs at least two nodes");
    if (cloud_count < 0 || cloud_count >= n)
      throw std::invalid_argument("cloud node count out of range");
    for (int i = 0; i < n; ++i) {
      nodes_[i].id = i;
      nodes_[i].layer = (i >= n - cloud_count) ? Layer::Cloud : Layer::Fog;
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  TopologyKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  int patched_edges() const { return patched_edges_; }
  void set_patched_edges(int n) { patched_edges_ = n; }

  const NodeSpec& node(int id) const { return nodes_.at(id); }
  NodeSpec& node(int id) { return nodes_.at(id); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }

  int fog_count() const {
    int c = 0;
    for (const auto& n : nodes_) c += (n.layer == Layer::Fog);
    return c;
  }
  int cloud_count() const { return size() - fog_count(); }

  std::vector<int> fog_ids() const {
    std::vector<int> ids;
    for (const auto& n : nodes_)
      if (n.layer == Layer::Fog) ids.push_back(n.id);
    return ids;
  }
  std::vector<int> cloud_ids() const {
    std::vector<int> ids;
    for (const auto& n : nodes_)
      if (n.layer == Layer::Cloud) ids.push_back(n.id);
    return ids;
  }

  bool has_edge(int u, int v) const {
    return delays_.count(canonical(u, v)) != 0;
  }

  void add_edge(int u, int v, double delay_ms = 0.0) {
    if (u == v) throw std::invalid_argument("self loops are not allowed");
    if (u < 0 || v < 0 || u >= size() || v >= size())
      throw std::out_of_range("edge endpoint out of range");
    auto key = canonical(u, v);
    if (delays_.count(key)) return;
    delays_[key] = delay_ms;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    std::sort(adj_[u].begin(), adj_[u].end());
    std::sort(adj_[v].begin(), adj_[v].end());
  }

  void remove_edge(int u, int v) {
    auto key = canonical(u, v);
    auto it = delays_.find(key);
    if (it == delays_.end()) return;
    delays_.erase(it);
    adj_[u].erase(std::find(adj_[u].begin(), adj_[u].end(), v));
    adj_[v].erase(std::find(adj_[v].begin(), adj_[v].end(), u));
  }

  void set_edge_delay(int u, int v, double delay_ms) {
    delays_.at(canonical(u, v)) = delay_ms;
  }

  double edge_delay(int u, int v) const { return delays_.at(canonical(u, v)); }

  // Ascending neighbor ids.
  const std::vector<int>& neighbors(int id) const { return adj_.at(id); }

  std::size_t edge_count() const { return delays_.size(); }

  // Edges as (u, v, delay) with u < v, ascending.
  const std::map<std::pair<int, int>, double>& edges() const { return delays_; }

  int degree(int id) const { return static_cast<int>(adj_.at(id).size()); }

  bool is_connected() const {
    if (nodes_.empty()) return true;
    std::vector<char> seen(size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int visited = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++visited;
          q.push(v);
        }
      }
    }
    return visited == size();
  }

  // Connected components as sorted id lists, ordered by smallest member.
  std::vector<std::vector<int>> components() const {
    std::vector<char> seen(size(), 0);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < size(); ++s) {
      if (seen[s]) continue;
      std::vector<int> comp;
      std::queue<int> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        comp.push_back(u);
        for (int v : adj_[u])
          if (!seen[v]) {
            seen[v] = 1;
            q.push(v);
          }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  }

 private:
  static std::pair<int, int> canonical(int u, int v) {
    return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
  }

  TopologyKind kind_ = TopologyKind::ER;
  std::uint64_t seed_ = 0;
  int patched_edges_ = 0;
  std::vector<NodeSpec> nodes_;
  std::vector<std::vector<int>> adj_;
  std::map<std::pair<int, int>, double> delays_;
};

namespace detail {

// Preferential attachment: each new node attaches to m distinct existing
// nodes drawn proportionally to degree (repeated-node-list trick). Connected
// by construction.
inline void build_ba(NetworkGraph& g, int m, Rng& rng) {
  const int n = g.size();
  if (m < 1 || m >= n) throw std::invalid_argument("BA parameter m must satisfy 1 <= m < n");
  std::vector<int> repeated;
  std::set<int> targets;
  for (int i = 0; i < m; ++i) targets.insert(i);
  for (int source = m; source < n; ++source) {
    for (int t : targets) {
      g.add_edge(source, t);
      repeated.push_back(t);
      repeated.push_back(source);
    }
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      targets.insert(repeated[rng.uniform_int(repeated.size())]);
    }
  }
}

// Ring lattice of degree k, then each lattice edge rewires with probability
// beta; edge count stays n*k/2.
inline void build_ws(NetworkGraph& g, int k, double beta, Rng& rng) {
  const int n = g.size();
  if (k < 2 || k % 2 != 0 || k >= n)
    throw std::invalid_argument("WS parameter k must be even and satisfy 2 <= k < n");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("WS beta must lie in [0, 1]");
  for (int d = 1; d <= k / 2; ++d)
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + d) % n);
  for (int d = 1; d <= k / 2; ++d) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform01() >= beta) continue;
      const int u = i;
      const int v = (i + d) % n;
      if (g.degree(u) >= n - 1) continue;  // nothing left to rewire to
      int w = static_cast<int>(rng.uniform_int(n));
      while (w == u || g.has_edge(u, w)) w = static_cast<int>(rng.uniform_int(n));
      g.remove_edge(u, v);
      g.add_edge(u, w);
    }
  }
}

// Independent edge trials.
inline void build_er(NetworkGraph& g, double p, Rng& rng) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("ER probability must lie in (0, 1]");
  const int n = g.size();
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) g.add_edge(u, v);
}

// Chains component representatives (smallest member each) to the first
// component; adds exactly components-1 edges.
inline int patch_connectivity(NetworkGraph& g) {
  auto comps = g.components();
  for (std::size_t i = 1; i < comps.size(); ++i) g.add_edge(comps[0][0], comps[i][0]);
  return static_cast<int>(comps.size()) - 1;
}

}  // namespace detail

// Builds the overlay and samples link delays: U[fog_min, fog_max] per
// fog-fog edge, the WAN scalar for every edge touching a cloud node. ER may
// come out disconnected; it is retried on derived seeds a few times and then
// patched with bridging edges (count retrievable via patched_edges()).
inline NetworkGraph generate_topology(TopologyKind kind, int n, const TopologyParams& params,
                                      std::uint64_t seed, int cloud_count = 1,
                                      const DelayParams& dp = DelayParams{}) {
  const int max_attempts = (kind == TopologyKind::ER) ? 3 : 1;
  NetworkGraph g;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    g = NetworkGraph(kind, n, seed, cloud_count);
    Rng rng(derive_seed(seed, SeedTag::Topology, static_cast<std::uint64_t>(attempt)));
    switch (kind) {
      case TopologyKind::BA: detail::build_ba(g, params.ba_m, rng); break;
      case TopologyKind::WS: detail::build_ws(g, params.ws_k, params.ws_beta, rng); break;
      case TopologyKind::ER: detail::build_er(g, params.er_p, rng); break;
    }
    if (g.is_connected()) break;
    if (attempt == max_attempts - 1) g.set_patched_edges(detail::patch_connectivity(g));
  }

  Rng delay_rng(derive_seed(seed, SeedTag::Delays));
  for (const auto& [key, _] : g.edges()) {
    const bool wan = g.node(key.first).layer == Layer::Cloud ||
                     g.node(key.second).layer == Layer::Cloud;
    g.set_edge_delay(key.first, key.second,
                     wan ? dp.wan_ms : delay_rng.uniform(dp.fog_min_ms, dp.fog_max_ms));
  }
  return g;
}

enum class CapacitySplit { Uniform, Dirichlet };

// Distributes the cloud total evenly across cloud nodes and the fog total
// across fog nodes, either evenly or by one seeded Dirichlet weight vector
// shared across the three resources (so a "big" node is big in every
// dimension). Every fog share is strictly positive and the shares sum to the
// totals up to rounding.
inline NetworkGraph assign_capacities(NetworkGraph g, const ResourceTriple& fog_total,
                                      const ResourceTriple& cloud_total,
                                      CapacitySplit split = CapacitySplit::Uniform,
                                      int dirichlet_alpha = 1, std::uint64_t seed = 0) {
  const auto fog = g.fog_ids();
  const auto cloud = g.cloud_ids();
  if (fog.empty()) throw std::invalid_argument("cannot assign capacities: no fog nodes");

  std::vector<double> w(fog.size(), 1.0 / static_cast<double>(fog.size()));
  if (split == CapacitySplit::Dirichlet) {
    Rng rng(derive_seed(seed, SeedTag::Capacities));
    w = rng.dirichlet(fog.size(), dirichlet_alpha);
  }
  for (std::size_t i = 0; i < fog.size(); ++i) {
    auto& n = g.node(fog[i]);
    n.cpu_capacity = fog_total.cpu * w[i];
    n.mem_capacity = fog_total.mem * w[i];
    n.storage_capacity = fog_total.storage * w[i];
  }
  for (int id : cloud) {
    auto& n = g.node(id);
    const double share = 1.0 / static_cast<double>(cloud.size());
    n.cpu_capacity = cloud_total.cpu * share;
    n.mem_capacity = cloud_total.mem * share;
    n.storage_capacity = cloud_total.storage * share;
  }
  return g;
}

// Hop counts and accumulated link delays along BFS hop-shortest paths, from
// every source. BFS visits neighbors in ascending id order, so the parent of
// each node (and therefore the path delay) is deterministic.
struct ShortestPaths {
  std::vector<std::vector<int>> hops;     // -1 if unreachable
  std::vector<std::vector<double>> delay_ms;
};

inline ShortestPaths compute_shortest_paths(const NetworkGraph& g) {
  const int n = g.size();
  ShortestPaths sp;
  sp.hops.assign(n, std::vector<int>(n, -1));
  sp.delay_ms.assign(n, std::vector<double>(n, -1.0));
  for (int s = 0; s < n; ++s) {
    auto& hop = sp.hops[s];
    auto& del = sp.delay_ms[s];
    hop[s] = 0;
    del[s] = 0.0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : g.neighbors(u)) {
        if (hop[v] < 0) {
          hop[v] = hop[u] + 1;
          del[v] = del[u] + g.edge_delay(u, v);
          q.push(v);
        }
      }
    }
  }
  return sp;
}

inline int hop_distance(const ShortestPaths& sp, int u, int v) { return sp.hops.at(u).at(v); }

inline double path_delay_ms(const ShortestPaths& sp, int u, int v) {
  const double d = sp.delay_ms.at(u).at(v);
  if (d < 0.0) throw std::runtime_error("no path between nodes");
  return d;
}

// Fog nodes within h hops of center (center included), sorted by
// (hop, id). kUnlimitedHops returns the whole fog layer.
inline std::vector<int> neighborhood(const NetworkGraph& g, const ShortestPaths& sp, int center,
                                     int h) {
  std::vector<std::pair<int, int>> found;  // (hop, id)
  for (const auto& n : g.nodes()) {
    if (n.layer != Layer::Fog) continue;
    const int d = sp.hops[center][n.id];
    if (d < 0) continue;
    if (h == kUnlimitedHops || d <= h) found.emplace_back(d, n.id);
  }
  std::sort(found.begin(), found.end());
  std::vector<int> ids;
  ids.reserve(found.size());
  for (auto& [_, id] : found) ids.push_back(id);
  return ids;
}

// Cloud node with the smallest path delay from `from`; ties break to the
// lower id. Returns -1 when the network has no cloud node.
inline int nearest_cloud(const NetworkGraph& g, const ShortestPaths& sp, int from) {
  int best = -1;
  double best_delay = 0.0;
  for (int id : g.cloud_ids()) {
    if (sp.hops[from][id] < 0) continue;
    const double d = sp.delay_ms[from][id];
    if (best < 0 || d < best_delay) {
      best = id;
      best_delay = d;
    }
  }
  return best;
}

// --- on-disk formats ------------------------------------------------------
//
// Edge list: one "# fogplace-graph <kind> <nodes> <seed> <patched>" header
// line, then one "u v delay_ms" triple per line in canonical order.
// Node table: CSV "id,layer,cpu,mem,storage". Both round-trip bit-exactly.

inline void export_edges(const NetworkGraph& g, std::ostream& os) {
  os << "# fogplace-graph " << to_string(g.kind()) << ' ' << g.size() << ' ' << g.seed() << ' '
     << g.patched_edges() << '\n';
  for (const auto& [key, delay] : g.edges())
    os << key.first << ' ' << key.second << ' ' << format_double(delay) << '\n';
}

inline void export_nodes(const NetworkGraph& g, std::ostream& os) {
  os << "id,layer,cpu,mem,storage\n";
  for (const auto& n : g.nodes()) {
    os << n.id << ',' << (n.layer == Layer::Cloud ? "cloud" : "fog") << ','
       << format_double(n.cpu_capacity) << ',' << format_double(n.mem_capacity) << ','
       << format_double(n.storage_capacity) << '\n';
  }
}

inline NetworkGraph import_graph(std::istream& edges_in, std::istream& nodes_in) {
  std::string line;
  if (!std::getline(nodes_in, line) || line != "id,layer,cpu,mem,storage")
    throw std::runtime_error("node table: missing or unexpected header");
  struct Row {
    int id;
    Layer layer;
    double cpu, mem, storage;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(nodes_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id_s, layer_s, cpu_s, mem_s, sto_s;
    if (!std::getline(ss, id_s, ',') || !std::getline(ss, layer_s, ',') ||
        !std::getline(ss, cpu_s, ',') || !std::getline(ss, mem_s, ',') ||
        !std::getline(ss, sto_s, ','))
      throw std::runtime_error("node table: malformed row at line " + std::to_string(lineno));
    Row r;
    r.id = std::stoi(id_s);
    if (layer_s == "fog") r.layer = Layer::Fog;
    else if (layer_s == "cloud") r.layer = Layer::Cloud;
    else throw std::runtime_error("node table: unknown layer at line " + std::to_string(lineno));
    r.cpu = std::stod(cpu_s);
    r.mem = std::stod(mem_s);
    r.storage = std::stod(sto_s);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("node table: no rows");

  TopologyKind kind = TopologyKind::ER;
  std::uint64_t seed = 0;
  int declared_nodes = static_cast<int>(rows.size());
  int patched = 0;
  if (!std::getline(edges_in, line)) throw std::runtime_error("edge list: empty input");
  {
    std::stringstream ss(line);
    std::string hash, tag, kind_s;
    if (!(ss >> hash >> tag >> kind_s >> declared_nodes >> seed >> patched) ||
        hash != "#" || tag != "fogplace-graph")
      throw std::runtime_error("edge list: missing header line");
    kind = topology_kind_from_string(kind_s);
  }
  if (declared_nodes != static_cast<int>(rows.size()))
    throw std::runtime_error("edge list header and node table disagree on node count");

  int cloud_count = 0;
  for (const auto& r : rows) cloud_count += (r.layer == Layer::Cloud);
  NetworkGraph g(kind, declared_nodes, seed, 0);
  for (const auto& r : rows) {
    if (r.id < 0 || r.id >= declared_nodes)
      throw std::runtime_error("node table: id out of range");
    auto& n = g.node(r.id);
    n.layer = r.layer;
    n.cpu_capacity = r.cpu;
    n.mem_capacity = r.mem;
    n.storage_capacity = r.storage;
  }
  g.set_patched_edges(patched);

  int lineno2 = 1;
  while (std::getline(edges_in, line)) {
    ++lineno2;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    int u, v;
    double d;
    if (!(ss >> u >> v >> d))
      throw std::runtime_error("edge list: malformed line " + std::to_string(lineno2));
    g.add_edge(u, v, d);
  }
  return g;
}

}  // namespace fogplace
