#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogplace/engine.hpp"

namespace fogplace {

// Thrown for malformed files, unknown keys, and semantically invalid
// values; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "topology.kind", "topology.nodes", "topology.cloud_nodes", "topology.ba_m",
      "topology.ws_k", "topology.ws_beta", "topology.er_p", "topology.link_delay_min_ms",
      "topology.link_delay_max_ms", "topology.wan_delay_ms", "topology.capacity_split",
      "topology.capacity_alpha", "topology.fog_cpu", "topology.fog_mem", "topology.fog_storage",
      "topology.cloud_cpu", "topology.cloud_mem", "topology.cloud_storage",
      "workload.source", "workload.csv_path", "workload.profiles", "workload.requests_min",
      "workload.requests_max", "workload.cpu_min", "workload.cpu_max", "workload.mem_min",
      "workload.mem_max", "workload.storage_min", "workload.storage_max",
      "workload.distribution", "workload.round_ms",
      "placement.strategy", "placement.hops", "placement.lambda", "placement.plan_count",
      "placement.iterations", "placement.tree_fanout", "placement.reserve_factor",
      "placement.time_unit_scale", "placement.retry_next_host", "placement.first_fit_self_host",
      "placement.max_defer_rounds", "placement.variance_metric",
      "run.seed", "run.rounds", "run.label",
      "grid.strategies", "grid.topologies", "grid.nodes", "grid.distributions", "grid.hops",
      "grid.lambdas", "grid.seeds",
  };
  return keys;
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline int parse_hops(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "unlimited") return kUnlimitedHops;
  const int h = parse_int(key, v);
  if (h < 1) throw ConfigError(key + ": hop bound must be positive or 'inf'");
  return h;
}

}  // namespace detail

// Flat "section.key -> value" view of a config file. INI-style files use
// [section] headers and key = value lines ('#' or ';' start a comment);
// .json files hold the same keys as nested objects.
using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_ini(std::istream& in) {
  ConfigMap out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    out[key] = val;
  }
  return out;
}

inline ConfigMap parse_json_config(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("json config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("json config: top level must be an object");
  ConfigMap out;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object())
      throw ConfigError("json config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      std::string flat = section + "." + key;
      if (value.is_string()) {
        out[flat] = value.get<std::string>();
      } else if (value.is_boolean()) {
        out[flat] = value.get<bool>() ? "true" : "false";
      } else if (value.is_number_integer()) {
        out[flat] = std::to_string(value.get<long long>());
      } else if (value.is_number_unsigned()) {
        out[flat] = std::to_string(value.get<unsigned long long>());
      } else if (value.is_number_float()) {
        out[flat] = format_double(value.get<double>());
      } else if (value.is_array()) {
        std::string list;
        for (const auto& item : value) {
          if (!list.empty()) list += ",";
          if (item.is_string()) list += item.get<std::string>();
          else if (item.is_number_integer()) list += std::to_string(item.get<long long>());
          else if (item.is_number_float()) list += format_double(item.get<double>());
          else throw ConfigError("json config: unsupported list element in " + flat);
        }
        out[flat] = list;
      } else {
        throw ConfigError("json config: unsupported value type at " + flat);
      }
    }
  }
  return out;
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  ConfigMap map = json ? parse_json_config(in) : parse_ini(in);
  for (const auto& [key, _] : map)
    if (!detail::known_keys().count(key)) throw ConfigError("unknown config key: " + key);
  return map;
}

// key=value, key as section.key. Later overrides win over the file.
inline void apply_override(ConfigMap& map, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string key = detail::trim(assignment.substr(0, eq));
  if (!detail::known_keys().count(key)) throw ConfigError("unknown config key: " + key);
  map[key] = detail::trim(assignment.substr(eq + 1));
}

inline RunConfig build_run_config(const ConfigMap& map) {
  RunConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  using namespace detail;
  if (auto v = get("topology.kind")) cfg.kind = topology_kind_from_string(*v);
  if (auto v = get("topology.nodes")) cfg.nodes = parse_int("topology.nodes", *v);
  if (auto v = get("topology.cloud_nodes")) cfg.cloud_nodes = parse_int("topology.cloud_nodes", *v);
  if (auto v = get("topology.ba_m")) cfg.topo.ba_m = parse_int("topology.ba_m", *v);
  if (auto v = get("topology.ws_k")) cfg.topo.ws_k = parse_int("topology.ws_k", *v);
  if (auto v = get("topology.ws_beta")) cfg.topo.ws_beta = parse_double("topology.ws_beta", *v);
  if (auto v = get("topology.er_p")) cfg.topo.er_p = parse_double("topology.er_p", *v);
  if (auto v = get("topology.link_delay_min_ms"))
    cfg.delays.fog_min_ms = parse_double("topology.link_delay_min_ms", *v);
  if (auto v = get("topology.link_delay_max_ms"))
    cfg.delays.fog_max_ms = parse_double("topology.link_delay_max_ms", *v);
  if (auto v = get("topology.wan_delay_ms"))
    cfg.delays.wan_ms = parse_double("topology.wan_delay_ms", *v);
  if (auto v = get("topology.capacity_split")) {
    if (*v == "uniform") cfg.capacity_split = CapacitySplit::Uniform;
    else if (*v == "dirichlet") cfg.capacity_split = CapacitySplit::Dirichlet;
    else throw ConfigError("topology.capacity_split: expected uniform or dirichlet");
  }
  if (auto v = get("topology.capacity_alpha"))
    cfg.capacity_alpha = parse_int("topology.capacity_alpha", *v);
  if (auto v = get("topology.fog_cpu")) cfg.fog_total.cpu = parse_double("topology.fog_cpu", *v);
  if (auto v = get("topology.fog_mem")) cfg.fog_total.mem = parse_double("topology.fog_mem", *v);
  if (auto v = get("topology.fog_storage"))
    cfg.fog_total.storage = parse_double("topology.fog_storage", *v);
  if (auto v = get("topology.cloud_cpu")) cfg.cloud_total.cpu = parse_double("topology.cloud_cpu", *v);
  if (auto v = get("topology.cloud_mem")) cfg.cloud_total.mem = parse_double("topology.cloud_mem", *v);
  if (auto v = get("topology.cloud_storage"))
    cfg.cloud_total.storage = parse_double("topology.cloud_storage", *v);

  if (auto v = get("workload.source")) {
    if (*v == "synthetic") cfg.source = WorkloadSource::Synthetic;
    else if (*v == "csv") cfg.source = WorkloadSource::Csv;
    else throw ConfigError("workload.source: expected synthetic or csv");
  }
  if (auto v = get("workload.csv_path")) cfg.profile_csv = *v;
  if (auto v = get("workload.profiles"))
    cfg.synthetic.profile_count = parse_int("workload.profiles", *v);
  if (auto v = get("workload.requests_min"))
    cfg.synthetic.requests_min = parse_int("workload.requests_min", *v);
  if (auto v = get("workload.requests_max"))
    cfg.synthetic.requests_max = parse_int("workload.requests_max", *v);
  if (auto v = get("workload.cpu_min")) cfg.synthetic.cpu_min = parse_double("workload.cpu_min", *v);
  if (auto v = get("workload.cpu_max")) cfg.synthetic.cpu_max = parse_double("workload.cpu_max", *v);
  if (auto v = get("workload.mem_min")) cfg.synthetic.mem_min = parse_double("workload.mem_min", *v);
  if (auto v = get("workload.mem_max")) cfg.synthetic.mem_max = parse_double("workload.mem_max", *v);
  if (auto v = get("workload.storage_min"))
    cfg.synthetic.storage_min = parse_double("workload.storage_min", *v);
  if (auto v = get("workload.storage_max"))
    cfg.synthetic.storage_max = parse_double("workload.storage_max", *v);
  if (auto v = get("workload.distribution")) cfg.distribution = ingress_mode_from_string(*v);
  if (auto v = get("workload.round_ms")) cfg.round_ms = parse_double("workload.round_ms", *v);

  if (auto v = get("placement.strategy")) cfg.strategy = strategy_from_string(*v);
  if (auto v = get("placement.hops")) cfg.hop_limit = parse_hops("placement.hops", *v);
  if (auto v = get("placement.lambda")) cfg.lambda = parse_double("placement.lambda", *v);
  if (auto v = get("placement.plan_count"))
    cfg.plan_count = parse_int("placement.plan_count", *v);
  if (auto v = get("placement.iterations"))
    cfg.iterations = parse_int("placement.iterations", *v);
  if (auto v = get("placement.tree_fanout"))
    cfg.tree_fanout = parse_int("placement.tree_fanout", *v);
  if (auto v = get("placement.reserve_factor"))
    cfg.cost.reserve_factor = parse_double("placement.reserve_factor", *v);
  if (auto v = get("placement.time_unit_scale"))
    cfg.cost.time_unit_scale = parse_double("placement.time_unit_scale", *v);
  if (auto v = get("placement.retry_next_host"))
    cfg.retry_next_host = parse_bool("placement.retry_next_host", *v);
  if (auto v = get("placement.first_fit_self_host"))
    cfg.first_fit_self_host = parse_bool("placement.first_fit_self_host", *v);
  if (auto v = get("placement.max_defer_rounds"))
    cfg.max_defer_rounds = parse_int("placement.max_defer_rounds", *v);
  if (auto v = get("placement.variance_metric"))
    cfg.variance_metric = variance_metric_from_string(*v);

  if (auto v = get("run.seed")) cfg.seed = parse_u64("run.seed", *v);
  if (auto v = get("run.rounds")) cfg.rounds = parse_int("run.rounds", *v);
  if (auto v = get("run.label")) cfg.label = *v;
  return cfg;
}

// Semantic checks beyond per-value parsing; returns human-readable problems.
inline std::vector<std::string> validate_run_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  auto bad = [&](const std::string& msg) { problems.push_back(msg); };
  if (cfg.nodes < 2) bad("topology.nodes: need at least two nodes");
  if (cfg.cloud_nodes < 1) bad("topology.cloud_nodes: at least one cloud node is required");
  if (cfg.cloud_nodes >= cfg.nodes) bad("topology.cloud_nodes: must leave at least one fog node");
  if (cfg.kind == TopologyKind::BA && (cfg.topo.ba_m < 1 || cfg.topo.ba_m >= cfg.nodes))
    bad("topology.ba_m: must satisfy 1 <= m < nodes");
  if (cfg.kind == TopologyKind::WS &&
      (cfg.topo.ws_k < 2 || cfg.topo.ws_k % 2 != 0 || cfg.topo.ws_k >= cfg.nodes))
    bad("topology.ws_k: must be even and satisfy 2 <= k < nodes");
  if (cfg.kind == TopologyKind::WS && (cfg.topo.ws_beta < 0.0 || cfg.topo.ws_beta > 1.0))
    bad("topology.ws_beta: must lie in [0, 1]");
  if (cfg.kind == TopologyKind::ER && (cfg.topo.er_p <= 0.0 || cfg.topo.er_p > 1.0))
    bad("topology.er_p: must lie in (0, 1]");
  if (cfg.delays.fog_min_ms < 0.0 || cfg.delays.fog_max_ms < cfg.delays.fog_min_ms)
    bad("topology.link_delay_*: invalid range");
  if (cfg.fog_total.cpu <= 0.0 || cfg.fog_total.mem <= 0.0 || cfg.fog_total.storage <= 0.0)
    bad("topology.fog_*: totals must be positive");
  if (cfg.cloud_total.cpu <= 0.0 || cfg.cloud_total.mem <= 0.0 || cfg.cloud_total.storage <= 0.0)
    bad("topology.cloud_*: totals must be positive");
  if (cfg.capacity_alpha < 1) bad("topology.capacity_alpha: must be a positive integer");
  if (cfg.source == WorkloadSource::Csv && cfg.profile_csv.empty())
    bad("workload.csv_path: required when workload.source = csv");
  if (cfg.source == WorkloadSource::Synthetic) {
    const auto& s = cfg.synthetic;
    if (s.profile_count < 1) bad("workload.profiles: need at least one profile");
    if (s.requests_min < 0 || s.requests_max < s.requests_min)
      bad("workload.requests_*: invalid range");
    if (s.cpu_min < 0 || s.cpu_max < s.cpu_min || s.mem_min < 0 || s.mem_max < s.mem_min ||
        s.storage_min < 0 || s.storage_max < s.storage_min)
      bad("workload resource ranges: invalid");
  }
  if (cfg.round_ms <= 0.0) bad("workload.round_ms: must be positive");
  if (cfg.hop_limit != kUnlimitedHops && cfg.hop_limit < 1)
    bad("placement.hops: must be positive or 'inf'");
  if (cfg.lambda < 0.0 || cfg.lambda > 1.0) bad("placement.lambda: must lie in [0, 1]");
  if (cfg.plan_count < 1) bad("placement.plan_count: must be positive");
  if (cfg.iterations < 1) bad("placement.iterations: must be positive");
  if (cfg.tree_fanout < 1) bad("placement.tree_fanout: must be positive");
  if (cfg.cost.reserve_factor <= 0.0 || cfg.cost.reserve_factor > 1.0)
    bad("placement.reserve_factor: must lie in (0, 1]");
  if (cfg.cost.time_unit_scale <= 0.0) bad("placement.time_unit_scale: must be positive");
  if (cfg.max_defer_rounds < 0) bad("placement.max_defer_rounds: must be non-negative");
  if (cfg.rounds < 0) bad("run.rounds: must be non-negative");
  return problems;
}

inline GridSpec build_grid_spec(const ConfigMap& map, const RunConfig& base) {
  GridSpec grid;
  auto list = [&](const char* key) -> std::vector<std::string> {
    auto it = map.find(key);
    return it == map.end() ? std::vector<std::string>{} : detail::split_list(it->second);
  };
  for (const auto& s : list("grid.strategies")) grid.strategies.push_back(strategy_from_string(s));
  for (const auto& s : list("grid.topologies"))
    grid.topologies.push_back(topology_kind_from_string(s));
  for (const auto& s : list("grid.nodes")) grid.node_counts.push_back(detail::parse_int("grid.nodes", s));
  for (const auto& s : list("grid.distributions"))
    grid.distributions.push_back(ingress_mode_from_string(s));
  for (const auto& s : list("grid.hops")) grid.hop_limits.push_back(detail::parse_hops("grid.hops", s));
  for (const auto& s : list("grid.lambdas"))
    grid.lambdas.push_back(detail::parse_double("grid.lambdas", s));
  for (const auto& s : list("grid.seeds")) grid.seeds.push_back(detail::parse_u64("grid.seeds", s));

  // Unspecified axes collapse to the base config's value.
  if (grid.strategies.empty() && map.count("grid.strategies") == 0)
    grid.strategies.push_back(base.strategy);
  if (grid.topologies.empty() && map.count("grid.topologies") == 0)
    grid.topologies.push_back(base.kind);
  if (grid.node_counts.empty() && map.count("grid.nodes") == 0)
    grid.node_counts.push_back(base.nodes);
  if (grid.distributions.empty() && map.count("grid.distributions") == 0)
    grid.distributions.push_back(base.distribution);
  if (grid.hop_limits.empty() && map.count("grid.hops") == 0)
    grid.hop_limits.push_back(base.hop_limit);
  if (grid.lambdas.empty() && map.count("grid.lambdas") == 0) grid.lambdas.push_back(base.lambda);
  if (grid.seeds.empty() && map.count("grid.seeds") == 0) grid.seeds.push_back(base.seed);
  return grid;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["topology"]["kind"] = to_string(cfg.kind);
  j["topology"]["nodes"] = cfg.nodes;
  j["topology"]["cloud_nodes"] = cfg.cloud_nodes;
  j["topology"]["ba_m"] = cfg.topo.ba_m;
  j["topology"]["ws_k"] = cfg.topo.ws_k;
  j["topology"]["ws_beta"] = cfg.topo.ws_beta;
  j["topology"]["er_p"] = cfg.topo.er_p;
  j["topology"]["link_delay_min_ms"] = cfg.delays.fog_min_ms;
  j["topology"]["link_delay_max_ms"] = cfg.delays.fog_max_ms;
  j["topology"]["wan_delay_ms"] = cfg.delays.wan_ms;
  j["topology"]["capacity_split"] =
      cfg.capacity_split == CapacitySplit::Uniform ? "uniform" : "dirichlet";
  j["topology"]["capacity_alpha"] = cfg.capacity_alpha;
  j["topology"]["fog_cpu"] = cfg.fog_total.cpu;
  j["topology"]["fog_mem"] = cfg.fog_total.mem;
  j["topology"]["fog_storage"] = cfg.fog_total.storage;
  j["topology"]["cloud_cpu"] = cfg.cloud_total.cpu;
  j["topology"]["cloud_mem"] = cfg.cloud_total.mem;
  j["topology"]["cloud_storage"] = cfg.cloud_total.storage;
  j["workload"]["source"] = cfg.source == WorkloadSource::Synthetic ? "synthetic" : "csv";
  j["workload"]["csv_path"] = cfg.profile_csv;
  j["workload"]["profiles"] = cfg.synthetic.profile_count;
  j["workload"]["requests_min"] = cfg.synthetic.requests_min;
  j["workload"]["requests_max"] = cfg.synthetic.requests_max;
  j["workload"]["cpu_min"] = cfg.synthetic.cpu_min;
  j["workload"]["cpu_max"] = cfg.synthetic.cpu_max;
  j["workload"]["mem_min"] = cfg.synthetic.mem_min;
  j["workload"]["mem_max"] = cfg.synthetic.mem_max;
  j["workload"]["storage_min"] = cfg.synthetic.storage_min;
  j["workload"]["storage_max"] = cfg.synthetic.storage_max;
  j["workload"]["distribution"] = to_string(cfg.distribution);
  j["workload"]["round_ms"] = cfg.round_ms;
  j["placement"]["strategy"] = to_string(cfg.strategy);
  j["placement"]["hops"] =
      cfg.hop_limit == kUnlimitedHops ? std::string("inf") : std::to_string(cfg.hop_limit);
  j["placement"]["lambda"] = cfg.lambda;
  j["placement"]["plan_count"] = cfg.plan_count;
  j["placement"]["iterations"] = cfg.iterations;
  j["placement"]["tree_fanout"] = cfg.tree_fanout;
  j["placement"]["reserve_factor"] = cfg.cost.reserve_factor;
  j["placement"]["time_unit_scale"] = cfg.cost.time_unit_scale;
  j["placement"]["retry_next_host"] = cfg.retry_next_host;
  j["placement"]["first_fit_self_host"] = cfg.first_fit_self_host;
  j["placement"]["max_defer_rounds"] = cfg.max_defer_rounds;
  j["placement"]["variance_metric"] = to_string(cfg.variance_metric);
  j["run"]["seed"] = cfg.seed;
  j["run"]["rounds"] = cfg.rounds;
  j["run"]["label"] = cfg.label;
  return j;
}

}  // namespace fogplace
