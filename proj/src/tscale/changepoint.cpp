#include "tscale/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tscale {

double log_star(double x) {
  if (x < 1.0) throw std::domain_error("log* needs x >= 1");
  double bits = std::log2(2.865064);
  double y = x;
  while (true) {
    y = std::log2(y);
    if (y <= 0.0) break;
    bits += y;
  }
  return bits;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

namespace {

using Neighbors = std::vector<std::pair<VertexId, std::uint32_t>>;

// Edge multiplicities of a segment, per vertex.
struct Aggregate {
  std::size_t n = 0;
  std::size_t graphs = 0;
  std::vector<Neighbors> adj;
};

Aggregate aggregate(std::span<const StaticGraph> graphs) {
  Aggregate agg;
  agg.graphs = graphs.size();
  agg.n = graphs.empty() ? 0 : graphs.front().vertex_count();
  std::vector<Edge> all;
  for (const auto& g : graphs) all.insert(all.end(), g.edges().begin(), g.edges().end());
  std::sort(all.begin(), all.end());
  agg.adj.resize(agg.n);
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j] == all[i]) ++j;
    const auto count = static_cast<std::uint32_t>(j - i);
    agg.adj[all[i].u].emplace_back(all[i].v, count);
    agg.adj[all[i].v].emplace_back(all[i].u, count);
    i = j;
  }
  return agg;
}

double block_bits(double capacity, double edges) {
  if (capacity <= 0.0) return 0.0;
  return std::log2(capacity + 1.0) + capacity * binary_entropy(edges / capacity);
}

double pair_count(double a, double b, bool diagonal) { return diagonal ? a * (a - 1.0) / 2.0 : a * b; }

double header_bits(const std::vector<double>& sizes, double n) {
  std::size_t k = 0;
  double bits = 0.0;
  for (double s : sizes) {
    if (s <= 0.0) continue;
    ++k;
    bits += log_star(s) - s * std::log2(s / n);
  }
  return k == 0 ? 0.0 : bits + log_star(static_cast<double>(k));
}

NodePartition compact(const NodePartition& p) {
  NodePartition out(p.size());
  std::vector<std::int64_t> relabel;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] >= relabel.size()) relabel.resize(p[v] + 1, -1);
    if (relabel[p[v]] < 0) relabel[p[v]] = std::count_if(relabel.begin(), relabel.end(), [](auto x) { return x >= 0; });
    out[v] = static_cast<std::uint32_t>(relabel[p[v]]);
  }
  return out;
}

// Group sizes and block edge totals under a partition, with O(k) move deltas.
class BlockState {
 public:
  BlockState(const Aggregate& agg, const NodePartition& partition)
      : agg_(agg), group_(compact(partition)) {
    std::size_t k = 0;
    for (auto g : group_) k = std::max<std::size_t>(k, g + 1);
    sizes_.assign(k, 0.0);
    edges_.assign(k, std::vector<double>(k, 0.0));
    for (auto g : group_) sizes_[g] += 1.0;
    for (std::size_t u = 0; u < agg_.n; ++u) {
      for (const auto& [v, c] : agg_.adj[u]) {
        if (u < v) add_edges(group_[u], group_[v], c);
      }
    }
  }

  double cost() const {
    double bits = header_bits(sizes_, static_cast<double>(agg_.n));
    for (std::size_t a = 0; a < sizes_.size(); ++a) {
      for (std::size_t b = a; b < sizes_.size(); ++b) bits += block(a, b, sizes_[a], sizes_[b], edges_[a][b]);
    }
    return bits;
  }

  bool sweep() {
    bool improved = false;
    std::vector<double> r;
    for (std::size_t x = 0; x < agg_.n; ++x) {
      const std::size_t a = group_[x];
      r.assign(sizes_.size(), 0.0);
      for (const auto& [v, c] : agg_.adj[x]) r[group_[v]] += c;

      // Candidate targets: every nonempty group plus one empty slot.
      std::size_t empty_slot = sizes_.size();
      for (std::size_t g = 0; g < sizes_.size(); ++g) {
        if (sizes_[g] == 0.0) {
          empty_slot = g;
          break;
        }
      }
      double best_delta = -1e-9;
      std::size_t best = a;
      for (std::size_t b = 0; b <= sizes_.size(); ++b) {
        if (b == a) continue;
        if (b < sizes_.size() && sizes_[b] == 0.0 && b != empty_slot) continue;
        if (b == sizes_.size() && empty_slot != sizes_.size()) continue;
        if ((b == empty_slot || b == sizes_.size()) && sizes_[a] == 1.0) continue;
        const double d = move_delta(a, b, r);
        if (d < best_delta) {
          best_delta = d;
          best = b;
        }
      }
      if (best != a) {
        apply_move(x, a, best, r);
        improved = true;
      }
    }
    return improved;
  }

  NodePartition partition() const { return compact(group_); }

 private:
  double block(std::size_t a, std::size_t b, double na, double nb, double e) const {
    return block_bits(static_cast<double>(agg_.graphs) * pair_count(na, nb, a == b), e);
  }

  void add_edges(std::size_t a, std::size_t b, double c) {
    edges_[a][b] += c;
    if (a != b) edges_[b][a] += c;
  }

  double size_after(std::size_t g, std::size_t a, std::size_t b) const {
    const double base = g < sizes_.size() ? sizes_[g] : 0.0;
    return base - (g == a ? 1.0 : 0.0) + (g == b ? 1.0 : 0.0);
  }

  // Edge total of block {p, q} after moving one vertex with group degrees r from a to b.
  double edges_after(std::size_t p, std::size_t q, std::size_t a, std::size_t b,
                     const std::vector<double>& r) const {
    const auto r_of = [&](std::size_t g) { return g < r.size() ? r[g] : 0.0; };
    double e = (p < sizes_.size() && q < sizes_.size()) ? edges_[p][q] : 0.0;
    if (p == q) {
      if (p == a) e -= r_of(a);
      if (p == b) e += r_of(b);
      return e;
    }
    const bool pa = p == a || q == a;
    const bool pb = p == b || q == b;
    if (pa && pb) return e - r_of(b) + r_of(a);
    if (pa) return e - r_of(p == a ? q : p);
    if (pb) return e + r_of(p == b ? q : p);
    return e;
  }

  double move_delta(std::size_t a, std::size_t b, const std::vector<double>& r) const {
    const std::size_t k = std::max(sizes_.size(), b + 1);
    std::vector<double> new_sizes(k);
    for (std::size_t g = 0; g < k; ++g) new_sizes[g] = size_after(g, a, b);
    std::vector<double> old_sizes(sizes_);
    old_sizes.resize(k, 0.0);
    double delta = header_bits(new_sizes, static_cast<double>(agg_.n)) -
                   header_bits(old_sizes, static_cast<double>(agg_.n));
    for (std::size_t g = 0; g < k; ++g) {
      for (std::size_t side : {a, b}) {
        if (side == b && g == a) continue;  // block {a, b} handled once
        const double old_e = (side < sizes_.size() && g < sizes_.size()) ? edges_[side][g] : 0.0;
        delta -= block(side, g, old_sizes[side], old_sizes[g], old_e);
        delta += block(side, g, new_sizes[side], new_sizes[g], edges_after(side, g, a, b, r));
      }
    }
    return delta;
  }

  void apply_move(std::size_t x, std::size_t a, std::size_t b, const std::vector<double>& r) {
    if (b >= sizes_.size()) {
      sizes_.resize(b + 1, 0.0);
      for (auto& row : edges_) row.resize(b + 1, 0.0);
      edges_.resize(b + 1, std::vector<double>(b + 1, 0.0));
    }
    std::vector<double> rr(r);
    rr.resize(sizes_.size(), 0.0);
    const std::size_t k = sizes_.size();
    std::vector<std::vector<double>> next(edges_);
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p; q < k; ++q) {
        next[p][q] = next[q][p] = edges_after(p, q, a, b, rr);
      }
    }
    edges_ = std::move(next);
    sizes_[a] -= 1.0;
    sizes_[b] += 1.0;
    group_[x] = static_cast<std::uint32_t>(b);
  }

  const Aggregate& agg_;
  NodePartition group_;
  std::vector<double> sizes_;
  std::vector<std::vector<double>> edges_;
};

NodePartition component_partition(const Aggregate& agg) {
  // Isolated vertices share group 0's slot; components get one group each.
  NodePartition comp(agg.n, 0);
  std::vector<bool> seen(agg.n, false);
  std::uint32_t next = 1;
  std::vector<VertexId> stack;
  for (std::size_t s = 0; s < agg.n; ++s) {
    if (seen[s] || agg.adj[s].empty()) continue;
    seen[s] = true;
    stack.push_back(static_cast<VertexId>(s));
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      comp[u] = next;
      for (const auto& [v, c] : agg.adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return compact(comp);
}

struct Fit {
  NodePartition partition;
  double cost = 0.0;
};

Fit refine(const Aggregate& agg, const NodePartition& seed, std::size_t max_sweeps) {
  BlockState state(agg, seed);
  for (std::size_t i = 0; i < max_sweeps && state.sweep(); ++i) {
  }
  return Fit{state.partition(), state.cost()};
}

// Best of the local searches seeded from `previous` and from the segment's
// connected components; ties keep the previous-seeded result.
Fit best_fit(std::span<const StaticGraph> graphs, const NodePartition* previous, std::size_t max_sweeps) {
  const auto agg = aggregate(graphs);
  Fit best = refine(agg, component_partition(agg), max_sweeps);
  if (previous) {
    Fit seeded = refine(agg, *previous, max_sweeps);
    if (seeded.cost <= best.cost) best = std::move(seeded);
  }
  return best;
}

}  // namespace

double segment_cost(std::span<const StaticGraph> graphs, const NodePartition& partition) {
  if (graphs.empty()) return 0.0;
  if (partition.size() != graphs.front().vertex_count()) {
    throw std::invalid_argument("partition must cover every vertex");
  }
  const auto agg = aggregate(graphs);
  return BlockState(agg, partition).cost();
}

NodePartition refine_partition(std::span<const StaticGraph> graphs, NodePartition seed, std::size_t max_sweeps) {
  if (graphs.empty()) return seed;
  if (seed.size() != graphs.front().vertex_count()) throw std::invalid_argument("partition must cover every vertex");
  const auto agg = aggregate(graphs);
  return refine(agg, seed, max_sweeps).partition;
}

ChangePointResult graphscope_detect(const WindowedSequence& ws, const GraphscopeOptions& options) {
  if (ws.graphs.empty()) throw std::invalid_argument("change-point detection needs a nonempty sequence");
  ChangePointResult result;
  const std::span<const StaticGraph> graphs(ws.graphs);
  std::size_t begin = 0;
  Fit current = best_fit(graphs.subspan(0, 1), nullptr, options.max_sweeps);
  for (std::size_t p = 1; p < graphs.size(); ++p) {
    Fit extended = best_fit(graphs.subspan(begin, p - begin + 1), &current.partition, options.max_sweeps);
    Fit fresh = best_fit(graphs.subspan(p, 1), &current.partition, options.max_sweeps);
    const double extend_bits = extended.cost - current.cost;
    const bool split = fresh.cost < extend_bits;
    if (options.trace) options.trace->push_back(SegmentTrace{p, extend_bits, fresh.cost, split});
    if (split) {
      result.times.push_back(ws.spans[p].first);
      begin = p;
      current = std::move(fresh);
    } else {
      current = std::move(extended);
    }
  }
  return result;
}

double cp_pr_auc(std::span<const std::size_t> proposed, std::span<const std::size_t> truth, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sequence length must be positive");
  for (auto t : proposed) {
    if (t < 1 || t > n) throw std::out_of_range("proposed change point outside [1, n]");
  }
  for (auto t : truth) {
    if (t < 1 || t > n) throw std::out_of_range("true change point outside [1, n]");
  }
  if (proposed.empty() || truth.empty()) return 0.0;

  const auto dist = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  std::vector<std::size_t> nearest_truth(proposed.size(), n);
  std::vector<std::size_t> nearest_proposed(truth.size(), n);
  std::vector<std::size_t> grid{0, n};
  for (std::size_t i = 0; i < proposed.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const auto d = dist(proposed[i], truth[j]);
      grid.push_back(d);
      nearest_truth[i] = std::min(nearest_truth[i], d);
      nearest_proposed[j] = std::min(nearest_proposed[j], d);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto fraction_within = [](const std::vector<std::size_t>& nearest, std::size_t d) {
    std::size_t hits = 0;
    for (auto x : nearest) hits += x <= d ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(nearest.size());
  };
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double width = static_cast<double>(grid[i + 1] - grid[i]);
    area += width * fraction_within(nearest_truth, grid[i]) * fraction_within(nearest_proposed, grid[i]);
  }
  return area / static_cast<double>(n);
}

}  // namespace tscale
