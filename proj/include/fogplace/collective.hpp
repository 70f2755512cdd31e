#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fogplace/costmodel.hpp"
#include "fogplace/plangen.hpp"
#include "fogplace/rng.hpp"

namespace fogplace {

// Balanced overlay in heap layout: position 0 is the root, children of
// position p are fanout*p+1 .. fanout*p+fanout. Which agent sits at which
// position is a seeded shuffle, so the tree shape is fixed by (count,
// fanout) and only the seating varies with the seed.
struct TreeOverlay {
  int fanout = 2;
  std::uint64_t seed = 0;
  std::vector<int> agent_at;     // position -> agent
  std::vector<int> position_of;  // agent -> position

  int size() const { return static_cast<int>(agent_at.size()); }
  int parent(int pos) const { return pos == 0 ? -1 : (pos - 1) / fanout; }
  std::vector<int> children(int pos) const {
    std::vector<int> c;
    for (int i = 1; i <= fanout; ++i) {
      const int child = fanout * pos + i;
      if (child < size()) c.push_back(child);
    }
    return c;
  }
  int depth(int pos) const {
    int d = 0;
    while (pos > 0) {
      pos = parent(pos);
      ++d;
    }
    return d;
  }
};

inline TreeOverlay build_tree(int agent_count, int fanout, std::uint64_t seed) {
  if (agent_count < 1) throw std::invalid_argument("tree needs at least one agent");
  if (fanout < 1) throw std::invalid_argument("tree fanout must be positive");
  TreeOverlay t;
  t.fanout = fanout;
  t.seed = seed;
  t.agent_at.resize(agent_count);
  std::iota(t.agent_at.begin(), t.agent_at.end(), 0);
  Rng rng(derive_seed(seed, SeedTag::Tree));
  rng.shuffle(t.agent_at);
  t.position_of.assign(agent_count, -1);
  for (int pos = 0; pos < agent_count; ++pos) t.position_of[t.agent_at[pos]] = pos;
  return t;
}

// lambda = 1 weighs only the agents' own plan preferences, lambda = 0 only
// the spread of the aggregate utilization. Both components are expected
// pre-normalized to [0,1].
inline double weighted_cost(double global_component, double local_component, double lambda) {
  return lambda * local_component + (1.0 - lambda) * global_component;
}

struct IterationRecord {
  int iteration = 0;
  double global_cost = 0.0;    // variance of the aggregate utilization vector
  double local_cost = 0.0;     // mean selected plan cost
  double weighted_cost = 0.0;  // on normalized components
};

struct SelectionResult {
  std::vector<int> selected;          // plan index per agent
  std::vector<double> global_vector;  // aggregate of the selected plans
  std::vector<IterationRecord> history;
  double global_normalizer = 1.0;  // variance of the iteration-0 selection
  double local_normalizer = 1.0;   // largest plan cost across all agents
};

namespace detail {

inline void add_sparse(std::vector<double>& dense, const PlacementPlan& p) {
  for (const auto& [i, x] : p.util_entries) dense[i] += x;
}
inline void sub_sparse(std::vector<double>& dense, const PlacementPlan& p) {
  for (const auto& [i, x] : p.util_entries) dense[i] -= x;
}

// Sum and sum of squares over the metric slice of a stacked vector, for
// O(changed entries) candidate evaluation.
struct SliceSums {
  std::size_t lo = 0, hi = 0;
  double sum = 0.0, sumsq = 0.0;

  void reset(const std::vector<double>& v, VarianceMetric metric) {
    const std::size_t n = v.size() / 2;
    lo = (metric == VarianceMetric::Mem) ? n : 0;
    hi = (metric == VarianceMetric::Cpu) ? n : v.size();
    sum = 0.0;
    sumsq = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += v[i];
      sumsq += v[i] * v[i];
    }
  }

  double variance_with(const std::vector<double>& base, const PlacementPlan& p) const {
    double s = sum, ss = sumsq;
    for (const auto& [i, x] : p.util_entries) {
      const auto idx = static_cast<std::size_t>(i);
      if (idx < lo || idx >= hi) continue;
      s += x;
      ss += x * (2.0 * base[idx] + x);
    }
    const double count = static_cast<double>(hi - lo);
    const double mean = s / count;
    const double var = ss / count - mean * mean;
    return var > 0.0 ? var : 0.0;
  }
};

}  // namespace detail

// Iterative cooperative selection over the tree. Iteration 0 takes every
// agent's cheapest plan. Each later iteration sweeps bottom-up: an agent
// re-decides its plan against the children's current subtree aggregates
// plus the previous global response with its own subtree's previous
// contribution removed, minimizing
//     lambda * plan_cost/local_normalizer
//   + (1-lambda) * variance(candidate aggregate)/global_normalizer.
// Ties keep the lowest plan index. Only a seeded fraction of the agents
// re-decides per sweep and the rest forward their subtree unchanged: when
// everyone moves at once against the same previous response, the combined
// move overshoots, the root keeps rejecting it, and the search deadlocks.
// Every agent also weighs reverting its whole subtree to the previous
// iteration's selections; at the root that option reproduces the previous
// global response exactly, which keeps a single descent from ever rising.
// When a sweep stops moving, the seating is reshuffled deterministically
// and the sweep retried; if it stalls again the descent restarts from a
// seeded random selection under a fresh seating, since different starting
// points land in different selection patterns. The reported trajectory and
// result always track the best selection seen so far, so the lambda = 0
// objective is non-increasing across iterations.
inline SelectionResult run_collective_selection(const std::vector<std::vector<PlacementPlan>>& plans,
                                                const TreeOverlay& tree, double lambda,
                                                int max_iterations, VarianceMetric metric,
                                                std::size_t vector_len) {
  const int n = tree.size();
  if (static_cast<int>(plans.size()) != n)
    throw std::invalid_argument("one plan set per agent is required");
  for (const auto& ps : plans)
    if (ps.empty()) throw std::invalid_argument("every agent needs at least one plan");
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (max_iterations < 1) throw std::invalid_argument("at least one iteration is required");

  SelectionResult res;
  res.selected.assign(n, 0);

  double max_cost = 0.0;
  for (const auto& ps : plans)
    for (const auto& p : ps) max_cost = std::max(max_cost, p.local_cost);
  res.local_normalizer = max_cost > 0.0 ? max_cost : 1.0;
  const double norm_l = res.local_normalizer;

  TreeOverlay live = tree;  // seating rotates when the search stalls
  int stalls = 0;
  std::uint64_t reseats = 0;

  auto plan_of = [&](int pos) -> const PlacementPlan& {
    return plans[live.agent_at[pos]][res.selected[live.agent_at[pos]]];
  };

  // Subtree aggregates of the current selections, indexed by position.
  std::vector<std::vector<double>> agg(n);
  auto recompute_aggregates = [&]() {
    for (int pos = n - 1; pos >= 0; --pos) {
      agg[pos].assign(vector_len, 0.0);
      detail::add_sparse(agg[pos], plan_of(pos));
      for (int c : live.children(pos))
        for (std::size_t i = 0; i < vector_len; ++i) agg[pos][i] += agg[c][i];
    }
  };

  auto mean_selected_cost = [&]() {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += plans[a][res.selected[a]].local_cost;
    return s / static_cast<double>(n);
  };

  recompute_aggregates();
  double g_raw = variance_slice(agg[0], metric);
  res.global_normalizer = g_raw > 0.0 ? g_raw : 1.0;
  const double norm_g = res.global_normalizer;

  double best_g = g_raw;
  double best_l = mean_selected_cost();
  double best_w = weighted_cost(best_g / norm_g, best_l / norm_l, lambda);
  std::vector<int> best_sel = res.selected;
  std::vector<double> best_vec = agg[0];
  res.history.push_back({0, best_g, best_l, best_w});

  std::vector<int> proposed_sel(n);
  std::vector<char> proposed_revert(n);
  std::vector<std::vector<double>> proposed_agg(n);
  std::vector<double> base(vector_len);
  detail::SliceSums sums;

  constexpr double kParticipation = 0.35;

  for (int t = 1; t < max_iterations; ++t) {
    const std::vector<double>& g_prev = agg[0];
    const double g_prev_raw = g_raw;
    Rng gate(derive_seed(tree.seed, SeedTag::Tree, static_cast<std::uint64_t>(t), 1));

    for (int pos = n - 1; pos >= 0; --pos) {
      const int agent = live.agent_at[pos];
      const auto children = live.children(pos);
      const bool moves = gate.uniform(0.0, 1.0) < kParticipation;

      // base = g_prev - previous subtree contribution + children's proposals
      for (std::size_t i = 0; i < vector_len; ++i) base[i] = g_prev[i] - agg[pos][i];
      for (int c : children)
        for (std::size_t i = 0; i < vector_len; ++i) base[i] += proposed_agg[c][i];
      sums.reset(base, metric);

      int best_idx = -1;
      double best_cost = 0.0;
      auto consider = [&](std::size_t q) {
        const auto& p = plans[agent][q];
        const double cand = weighted_cost(sums.variance_with(base, p) / norm_g,
                                          p.local_cost / norm_l, lambda);
        if (best_idx < 0 || cand < best_cost) {
          best_idx = static_cast<int>(q);
          best_cost = cand;
        }
      };
      if (moves)
        for (std::size_t q = 0; q < plans[agent].size(); ++q) consider(q);
      else
        consider(static_cast<std::size_t>(res.selected[agent]));
      const double revert_cost =
          weighted_cost(g_prev_raw / norm_g,
                        plans[agent][res.selected[agent]].local_cost / norm_l, lambda);

      if (revert_cost < best_cost) {
        proposed_revert[pos] = 1;
        proposed_sel[pos] = res.selected[agent];
        proposed_agg[pos] = agg[pos];
      } else {
        proposed_revert[pos] = 0;
        proposed_sel[pos] = best_idx;
        proposed_agg[pos] = base;  // reuse: children part is already in base
        for (std::size_t i = 0; i < vector_len; ++i)
          proposed_agg[pos][i] -= g_prev[i] - agg[pos][i];
        detail::add_sparse(proposed_agg[pos], plans[agent][best_idx]);
      }
    }

    // Top-down: apply proposals; a revert anywhere pins its whole subtree to
    // the previous iteration's selections.
    std::vector<char> forced(n, 0);
    for (int pos = 0; pos < n; ++pos) {
      const int agent = live.agent_at[pos];
      if (forced[pos] || proposed_revert[pos]) {
        for (int c : live.children(pos)) forced[c] = 1;
        continue;  // selection stays as-is
      }
      res.selected[agent] = proposed_sel[pos];
    }

    recompute_aggregates();
    g_raw = variance_slice(agg[0], metric);
    const double l_now = mean_selected_cost();
    const double w_now = weighted_cost(g_raw / norm_g, l_now / norm_l, lambda);
    if (w_now < best_w) {
      best_w = w_now;
      best_g = g_raw;
      best_l = l_now;
      best_sel = res.selected;
      best_vec = agg[0];
    }
    res.history.push_back({t, best_g, best_l, best_w});

    if (std::abs(g_raw - g_prev_raw) <= 1e-12) {
      ++stalls;
      if (n == 1) break;
      if (stalls == 3 || stalls >= 6) {
        ++reseats;
        if (stalls >= 6) {
          Rng restart(derive_seed(tree.seed, SeedTag::Tree, reseats, 3));
          for (int a = 0; a < n; ++a)
            res.selected[a] = static_cast<int>(restart.uniform_int(plans[a].size()));
          stalls = 0;
        }
        live = build_tree(n, live.fanout, derive_seed(tree.seed, SeedTag::Tree, reseats, 2));
        recompute_aggregates();
        g_raw = variance_slice(agg[0], metric);
      }
    } else {
      stalls = 0;
    }
  }

  res.selected = std::move(best_sel);
  res.global_vector = std::move(best_vec);
  return res;
}

}  // namespace fogplace
