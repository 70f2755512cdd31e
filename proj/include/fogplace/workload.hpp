#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogplace/rng.hpp"
#include "fogplace/topology.hpp"
#include "fogplace/types.hpp"

namespace fogplace {

// Aggregate demand arriving during one placement round.
struct WorkloadProfile {
  int index = 0;
  double cpu = 0.0;      // MIPS summed over all requests of the round
  double mem = 0.0;
  double storage = 0.0;
  int request_count = 0;
};

struct SyntheticParams {
  int profile_count = 5;
  double cpu_min = 180.0, cpu_max = 380.0;
  double mem_min = 200.0, mem_max = 430.0;
  double storage_min = 60.0, storage_max = 150.0;
  int requests_min = 150, requests_max = 450;
};

inline std::vector<WorkloadProfile> load_profiles_synthetic(const SyntheticParams& p,
                                                            std::uint64_t seed) {
  if (p.profile_count < 0) throw std::invalid_argument("profile count must be non-negative");
  if (p.requests_min < 0 || p.requests_max < p.requests_min)
    throw std::invalid_argument("request count range is invalid");
  std::vector<WorkloadProfile> out;
  out.reserve(p.profile_count);
  for (int i = 0; i < p.profile_count; ++i) {
    Rng rng(derive_seed(seed, SeedTag::Profiles, static_cast<std::uint64_t>(i)));
    WorkloadProfile w;
    w.index = i;
    w.cpu = rng.uniform(p.cpu_min, p.cpu_max);
    w.mem = rng.uniform(p.mem_min, p.mem_max);
    w.storage = rng.uniform(p.storage_min, p.storage_max);
    w.request_count = p.requests_min +
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p.requests_max - p.requests_min + 1)));
    if (w.cpu == 0.0 && w.mem == 0.0 && w.storage == 0.0) w.request_count = 0;
    out.push_back(w);
  }
  return out;
}

// CSV with header "cpu,mem,storage,count", one profile per row.
inline std::vector<WorkloadProfile> load_profiles_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "cpu,mem,storage,count")
    throw std::runtime_error("profile csv: missing or unexpected header");
  std::vector<WorkloadProfile> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cpu_s, mem_s, sto_s, cnt_s;
    if (!std::getline(ss, cpu_s, ',') || !std::getline(ss, mem_s, ',') ||
        !std::getline(ss, sto_s, ',') || !std::getline(ss, cnt_s, ','))
      throw std::runtime_error("profile csv: malformed row at line " + std::to_string(lineno));
    WorkloadProfile w;
    w.index = static_cast<int>(out.size());
    try {
      w.cpu = std::stod(cpu_s);
      w.mem = std::stod(mem_s);
      w.storage = std::stod(sto_s);
      w.request_count = std::stoi(cnt_s);
    } catch (const std::exception&) {
      throw std::runtime_error("profile csv: unparsable value at line " + std::to_string(lineno));
    }
    if (w.cpu < 0 || w.mem < 0 || w.storage < 0 || w.request_count < 0)
      throw std::runtime_error("profile csv: negative value at line " + std::to_string(lineno));
    out.push_back(w);
  }
  return out;
}

// One row per service class; fixed deadlines have min == max, the augmented
// reality class draws uniformly from its range. All values in milliseconds.
struct DeadlineRow {
  std::string label;
  double min_ms;
  double max_ms;
};

inline const std::vector<DeadlineRow>& default_deadline_table() {
  static const std::vector<DeadlineRow> table = {
      {"bulk transfer and offline backup", 100000.0, 100000.0},
      {"non-interactive media and messaging", 10000.0, 10000.0},
      {"media streaming", 1000.0, 1000.0},
      {"web browsing and e-commerce", 100.0, 100.0},
      {"smart metering and home automation", 50.0, 50.0},
      {"interactive voice and video", 30.0, 30.0},
      {"online gaming", 10.0, 10.0},
      {"vehicle telemetry", 5.0, 5.0},
      {"augmented reality", 2.0, 10.0},
      {"tactile interaction", 1.0, 1.0},
  };
  return table;
}

// Splits a profile into individual requests: per-resource demands come from
// independent uniform Dirichlet partitions of the aggregates (so the batch
// sums back to the profile), arrivals are uniform in the round window, and
// each request draws a service class from the deadline table.
inline std::vector<ServiceRequest> materialize_requests(const WorkloadProfile& profile,
                                                        const std::vector<DeadlineRow>& table,
                                                        double window_start_ms, double window_ms,
                                                        std::uint64_t seed, long long id_base) {
  if (table.empty()) throw std::invalid_argument("deadline table is empty");
  const std::size_t k = static_cast<std::size_t>(profile.request_count);
  std::vector<ServiceRequest> out;
  if (k == 0) return out;
  Rng rng(derive_seed(seed, SeedTag::Requests, static_cast<std::uint64_t>(profile.index)));
  const auto cpu_w = rng.dirichlet(k);
  const auto mem_w = rng.dirichlet(k);
  const auto sto_w = rng.dirichlet(k);
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    ServiceRequest r;
    r.id = id_base + static_cast<long long>(i);
    r.cpu_demand = profile.cpu * cpu_w[i];
    r.mem_demand = profile.mem * mem_w[i];
    r.storage_demand = profile.storage * sto_w[i];
    r.service_type = static_cast<int>(rng.uniform_int(table.size()));
    const auto& row = table[r.service_type];
    r.deadline_ms = (row.min_ms == row.max_ms) ? row.min_ms : rng.uniform(row.min_ms, row.max_ms);
    r.arrival_ms = window_start_ms + rng.uniform01() * window_ms;
    r.waiting_ms = 0.0;
    out.push_back(r);
  }
  return out;
}

enum class IngressMode { Rand, Beta };

inline std::string to_string(IngressMode m) {
  return m == IngressMode::Rand ? "rand" : "beta";
}

inline IngressMode ingress_mode_from_string(const std::string& s) {
  if (s == "rand" || s == "Rand") return IngressMode::Rand;
  if (s == "beta" || s == "Beta") return IngressMode::Beta;
  throw std::invalid_argument("unknown ingress distribution: " + s);
}

// Assigns each request the fog node where it enters the network: either
// uniform over fog nodes or index = floor(Beta(2,5) * |F|), which skews load
// toward low-index nodes.
inline void distribute_to_ingress(std::vector<ServiceRequest>& requests, const NetworkGraph& g,
                                  IngressMode mode, std::uint64_t seed) {
  const auto fog = g.fog_ids();
  if (fog.empty()) throw std::invalid_argument("network has no fog nodes");
  Rng rng(derive_seed(seed, SeedTag::Ingress));
  for (auto& r : requests) {
    std::size_t idx;
    if (mode == IngressMode::Rand) {
      idx = rng.uniform_int(fog.size());
    } else {
      idx = static_cast<std::size_t>(rng.beta(2, 5) * static_cast<double>(fog.size()));
      if (idx >= fog.size()) idx = fog.size() - 1;
    }
    r.ingress_node = fog[idx];
  }
}

}  // namespace fogplace
