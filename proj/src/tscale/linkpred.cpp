#include "tscale/linkpred.hpp"

#include <algorithm>

#include "tscale/errors.hpp"
#include "tscale/metrics.hpp"

namespace tscale {
namespace {

struct ActiveSubgraph {
  std::vector<VertexId> vertices;       // active index -> vertex id
  std::vector<std::ptrdiff_t> index;    // vertex id -> active index or -1
  Eigen::MatrixXd adjacency;
  std::size_t max_degree = 0;
};

ActiveSubgraph active_subgraph(const StaticGraph& g) {
  ActiveSubgraph s;
  const auto deg = g.degrees();
  s.index.assign(g.vertex_count(), -1);
  for (std::size_t v = 0; v < deg.size(); ++v) {
    if (deg[v] == 0) continue;
    s.index[v] = static_cast<std::ptrdiff_t>(s.vertices.size());
    s.vertices.push_back(static_cast<VertexId>(v));
    s.max_degree = std::max(s.max_degree, deg[v]);
  }
  const auto k = static_cast<Eigen::Index>(s.vertices.size());
  s.adjacency = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : g.edges()) {
    s.adjacency(s.index[e.u], s.index[e.v]) = 1.0;
    s.adjacency(s.index[e.v], s.index[e.u]) = 1.0;
  }
  return s;
}

bool exact_converges(const ActiveSubgraph& s, double beta) {
  // lambda_max <= max degree, so the eigen solve is only needed near the boundary.
  if (beta * static_cast<double>(s.max_degree) < 1.0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.adjacency, Eigen::EigenvaluesOnly);
  return beta * solver.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

Eigen::MatrixXd active_katz(const ActiveSubgraph& s, const KatzParams& params) {
  const auto k = s.adjacency.rows();
  if (k == 0) return Eigen::MatrixXd(0, 0);
  const bool convergent = exact_converges(s, params.beta);
  if (params.mode == KatzMode::Exact && !convergent) {
    throw KatzDivergence("beta * spectral radius >= 1; exact Katz solve diverges");
  }
  if (params.mode != KatzMode::Truncated && convergent) {
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) - params.beta * s.adjacency;
    Eigen::MatrixXd inv = system.llt().solve(Eigen::MatrixXd::Identity(k, k));
    inv -= Eigen::MatrixXd::Identity(k, k);
    return inv;
  }
  if (params.truncation < 1) throw std::invalid_argument("Katz truncation length must be >= 1");
  const Eigen::MatrixXd step = params.beta * s.adjacency;
  Eigen::MatrixXd term = step;
  Eigen::MatrixXd sum = step;
  for (std::size_t l = 2; l <= params.truncation; ++l) {
    term = term * step;
    sum += term;
  }
  return sum;
}

void check_params(const KatzParams& params) {
  if (!(params.beta > 0.0)) throw std::invalid_argument("Katz beta must be positive");
}

}  // namespace

Eigen::MatrixXd katz_score_matrix(const StaticGraph& g, const KatzParams& params) {
  check_params(params);
  const auto s = active_subgraph(g);
  const auto k = active_katz(s, params);
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < s.vertices.size(); ++a) {
    for (std::size_t b = 0; b < s.vertices.size(); ++b) {
      if (a != b) full(s.vertices[a], s.vertices[b]) = k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return full;
}

ScoredPairs katz_scores(const StaticGraph& g, const KatzParams& params) {
  check_params(params);
  const auto s = active_subgraph(g);
  const auto k = active_katz(s, params);
  ScoredPairs out;
  const auto m = s.vertices.size();
  out.reserve(m * (m - (m > 0 ? 1 : 0)) / 2);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const VertexId u = s.vertices[a];
      const VertexId v = s.vertices[b];
      if (g.has_edge(u, v)) continue;
      // Average the two triangles so the score is exactly symmetric.
      const double score = 0.5 * (k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +
                                  k(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
      out.push_back(ScoredPair{Edge{u, v}, score});
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredPair& x, const ScoredPair& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.pair < y.pair;
  });
  return out;
}

double ranking_pr_auc(const ScoredPairs& ranked, std::span<const Edge> positives) {
  std::vector<Edge> pos(positives.begin(), positives.end());
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  if (pos.empty()) throw UndefinedMetric("ranking PR-AUC with no positives");
  std::vector<std::uint8_t> relevance(ranked.size());
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    relevance[r] = std::binary_search(pos.begin(), pos.end(), ranked[r].pair) ? 1 : 0;
  }
  return average_precision(relevance, pos.size());
}

std::optional<double> link_step_score(std::span<const StaticGraph> past, std::size_t window_start,
                                      const StaticGraph& next, const KatzParams& params,
                                      NewLinkReference reference) {
  if (past.empty()) throw std::invalid_argument("link prediction needs a nonempty history");
  if (window_start >= past.size()) throw std::out_of_range("last window start beyond history");
  const StaticGraph last = StaticGraph::union_of(past.subspan(window_start));
  const StaticGraph& ref = reference == NewLinkReference::Windowed ? last : past.back();
  const auto positives = edge_difference(next, ref);
  if (positives.empty()) return std::nullopt;
  return ranking_pr_auc(katz_scores(last, params), positives);
}

std::optional<double> online_step_score(const WindowedSequence& history, const StaticGraph& next,
                                        const KatzParams& params) {
  if (history.graphs.empty()) throw std::invalid_argument("link prediction needs a nonempty history");
  const auto& last = history.graphs.back();
  const auto positives = edge_difference(next, last);
  if (positives.empty()) return std::nullopt;
  return ranking_pr_auc(katz_scores(last, params), positives);
}

}  // namespace tscale
