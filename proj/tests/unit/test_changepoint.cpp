#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "tscale/changepoint.hpp"

using namespace tscale;

namespace {

WindowedSequence identity_windows(const GraphSequence& seq) {
  return apply_windowing(seq, Windowing::uniform(seq.length(), 1));
}

// Direct evaluation of the documented cost formula.
double cost_by_formula(std::span<const StaticGraph> graphs, const NodePartition& p) {
  const std::size_t n = p.size();
  std::size_t k = 0;
  for (auto g : p) k = std::max<std::size_t>(k, g + 1);
  std::vector<double> sizes(k, 0.0);
  for (auto g : p) sizes[g] += 1.0;
  double bits = log_star(static_cast<double>(k));
  for (double s : sizes) bits += log_star(s) - s * std::log2(s / static_cast<double>(n));
  std::vector<std::vector<double>> e(k, std::vector<double>(k, 0.0));
  for (const auto& g : graphs) {
    for (const auto& edge : g.edges()) {
      const auto a = std::min(p[edge.u], p[edge.v]);
      const auto b = std::max(p[edge.u], p[edge.v]);
      e[a][b] += 1.0;
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double pairs = a == b ? sizes[a] * (sizes[a] - 1) / 2 : sizes[a] * sizes[b];
      const double cap = static_cast<double>(graphs.size()) * pairs;
      if (cap == 0) continue;
      bits += std::log2(cap + 1) + cap * binary_entropy(e[a][b] / cap);
    }
  }
  return bits;
}

}  // namespace

TEST_CASE("log* and binary entropy") {
  CHECK(log_star(1.0) == doctest::Approx(std::log2(2.865064)));
  CHECK(log_star(2.0) == doctest::Approx(std::log2(2.865064) + 1.0));
  CHECK(log_star(16.0) == doctest::Approx(std::log2(2.865064) + 4.0 + 2.0 + 1.0));
  CHECK_THROWS(log_star(0.5));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
}

TEST_CASE("segment cost special cases") {
  const NodePartition one(6, 0);
  const std::vector<StaticGraph> empty{StaticGraph(6), StaticGraph(6)};
  const double header = log_star(1.0) + log_star(6.0);
  CHECK(segment_cost(empty, one) == doctest::Approx(header + std::log2(31.0)));
  const std::vector<StaticGraph> full{synth::clique(6, 0, 6)};
  CHECK(segment_cost(full, one) == doctest::Approx(header + std::log2(16.0)));
  CHECK_THROWS(segment_cost(full, NodePartition(5, 0)));
}

TEST_CASE("segment cost matches the formula on random partitions") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto seq = synth::random_sequence(9, 3, 0.3, 100 + trial);
    NodePartition p(9);
    std::uniform_int_distribution<std::uint32_t> pick(0, 2);
    for (auto& g : p) g = pick(rng);
    // compact labels so groups are numbered without gaps
    std::vector<int> relabel(3, -1);
    std::uint32_t next = 0;
    for (auto& g : p) {
      if (relabel[g] < 0) relabel[g] = static_cast<int>(next++);
      g = static_cast<std::uint32_t>(relabel[g]);
    }
    CHECK(segment_cost(seq.graphs(), p) == doctest::Approx(cost_by_formula(seq.graphs(), p)).epsilon(1e-12));
  }
}

TEST_CASE("two disjoint cliques prefer two groups") {
  std::vector<Edge> edges;
  for (VertexId base : {0u, 4u}) {
    for (VertexId u = base; u < base + 4; ++u) {
      for (VertexId v = u + 1; v < base + 4; ++v) edges.push_back({u, v});
    }
  }
  const std::vector<StaticGraph> gs{StaticGraph(8, edges)};
  const NodePartition one(8, 0);
  const NodePartition two{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(segment_cost(gs, two) < segment_cost(gs, one));
  // One misplaced vertex is moved back.
  const NodePartition near{0, 0, 0, 1, 1, 1, 1, 1};
  CHECK(refine_partition(gs, near) == two);
  CHECK(refine_partition(gs, two) == two);
}

TEST_CASE("refinement ends in a single-move local optimum") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto seq = synth::random_sequence(8, 2, 0.35, 300 + trial);
    const NodePartition seed{0, 1, 0, 1, 2, 2, 0, 1};
    const auto p = refine_partition(seq.graphs(), seed);
    const double cost = segment_cost(seq.graphs(), p);
    CHECK(cost <= segment_cost(seq.graphs(), seed) + 1e-9);
    std::uint32_t groups = 0;
    for (auto g : p) groups = std::max(groups, g + 1);
    for (std::size_t v = 0; v < p.size(); ++v) {
      for (std::uint32_t g = 0; g <= groups; ++g) {
        if (g == p[v]) continue;
        auto moved = p;
        moved[v] = g;
        // compact labels so groups are numbered without gaps
        std::vector<int> relabel(groups + 1, -1);
        std::uint32_t next = 0;
        for (auto& x : moved) {
          if (relabel[x] < 0) relabel[x] = static_cast<int>(next++);
          x = static_cast<std::uint32_t>(relabel[x]);
        }
        CHECK(segment_cost(seq.graphs(), moved) >= cost - 1e-9);
      }
    }
  }
}

TEST_CASE("relabeling invariance") {
  const auto seq = synth::random_sequence(8, 2, 0.4, 17);
  const NodePartition p{0, 0, 1, 1, 0, 1, 2, 2};
  std::vector<VertexId> perm{3, 0, 6, 1, 7, 2, 5, 4};
  std::vector<StaticGraph> moved;
  for (const auto& g : seq.graphs()) {
    std::vector<Edge> es;
    for (const auto& e : g.edges()) es.push_back(make_edge(perm[e.u], perm[e.v]));
    moved.emplace_back(8, es);
  }
  NodePartition q(8);
  for (VertexId v = 0; v < 8; ++v) q[perm[v]] = p[v];
  // Re-number groups in first-seen order.
  std::vector<int> relabel(3, -1);
  std::uint32_t next = 0;
  for (auto& g : q) {
    if (relabel[g] < 0) relabel[g] = static_cast<int>(next++);
    g = static_cast<std::uint32_t>(relabel[g]);
  }
  CHECK(segment_cost(moved, q) == doctest::Approx(segment_cost(seq.graphs(), p)).epsilon(1e-12));
}

TEST_CASE("graphscope on planted and constant sequences") {
  const auto planted = synth::two_regime_cliques();
  std::vector<SegmentTrace> trace;
  GraphscopeOptions opts;
  opts.trace = &trace;
  const auto result = graphscope_detect(identity_windows(planted), opts);
  CHECK(result.times == std::vector<std::size_t>{6});
  REQUIRE(trace.size() == 9);
  CHECK(trace[4].split);
  CHECK(trace[4].window == 5);
  CHECK(graphscope_detect(identity_windows(planted)) == result);

  CHECK(graphscope_detect(identity_windows(synth::constant_sequence(10))).times.empty());
  CHECK(graphscope_detect(identity_windows(synth::constant_sequence(1))).times.empty());
}

TEST_CASE("graphscope reports initial-resolution indices") {
  // Same planted switch at window granularity 2: windows [1,2],[3,4],...
  std::vector<StaticGraph> gs;
  for (std::size_t t = 1; t <= 20; ++t) gs.push_back(synth::clique(12, t <= 10 ? 0 : 6, 6));
  const GraphSequence seq(12, gs);
  const auto ws = apply_windowing(seq, Windowing::uniform(20, 2));
  CHECK(graphscope_detect(ws).times == std::vector<std::size_t>{11});
}

TEST_CASE("mirrored sequence gives mirrored change points") {
  const auto planted = synth::two_regime_cliques();
  std::vector<StaticGraph> reversed(planted.graphs().rbegin(), planted.graphs().rend());
  const GraphSequence mirror(12, reversed);
  // Boundary between steps 5 and 6 reflects onto itself.
  CHECK(graphscope_detect(identity_windows(mirror)).times == std::vector<std::size_t>{6});
}

TEST_CASE("cp_pr_auc examples") {
  const std::vector<std::size_t> two{2};
  CHECK(cp_pr_auc(two, two, 10) == 1.0);
  CHECK(cp_pr_auc(std::vector<std::size_t>{}, two, 10) == 0.0);
  CHECK(cp_pr_auc(two, std::vector<std::size_t>{}, 10) == 0.0);
  const std::vector<std::size_t> truth{2, 8};
  CHECK(cp_pr_auc(two, truth, 10) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(cp_pr_auc(std::vector<std::size_t>{11}, two, 10), std::out_of_range);
  CHECK_THROWS_AS(cp_pr_auc(std::vector<std::size_t>{0}, two, 10), std::out_of_range);
}

TEST_CASE("cp_pr_auc matches the unit-step sum and is 1 only for equal sets") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    std::uniform_int_distribution<std::size_t> at(1, n);
    std::vector<std::size_t> a(std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    std::vector<std::size_t> b(std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    for (auto& x : a) x = at(rng);
    for (auto& x : b) x = at(rng);
    const double v = cp_pr_auc(a, b, n);
    CHECK(v == doctest::Approx(oracle::cp_riemann(a, b, n)).epsilon(1e-12));
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    CHECK((v == 1.0) == (a == b));
  }
}
