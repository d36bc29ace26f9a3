#pragma once

// Katz-score link prediction and ranking evaluation.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tscale/graph.hpp"
#include "tscale/windowing.hpp"

namespace tscale {

enum class KatzMode {
  Exact,      ///< closed form (I - bA)^-1 - I; throws KatzDivergence when b*lambda_max >= 1
  Truncated,  ///< sum of b^l A^l for l = 1..truncation
  Auto,       ///< exact when convergent, truncated otherwise
};

struct KatzParams {
  double beta = 0.005;
  std::size_t truncation = 8;
  KatzMode mode = KatzMode::Auto;
};

class KatzDivergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Which graph defines the "new" links at a prediction step.
enum class NewLinkReference {
  Windowed,  ///< edges of the next step absent from the most recent windowed graph
  Raw,       ///< edges of the next step absent from the previous raw step
};

struct ScoredPair {
  Edge pair;
  double score = 0.0;

  bool operator==(const ScoredPair&) const = default;
};

/// Descending score; ties in lexicographic pair order.
using ScoredPairs = std::vector<ScoredPair>;

/// Full n x n Katz matrix (zero diagonal). Rows of zero-degree vertices are zero.
Eigen::MatrixXd katz_score_matrix(const StaticGraph& g, const KatzParams& params);

/// Ranking of non-edges whose endpoints both have non-zero degree.
ScoredPairs katz_scores(const StaticGraph& g, const KatzParams& params);

/// Average precision of `ranked` against `positives` (duplicates ignored).
/// Positives absent from the ranking count as unretrieved.
double ranking_pr_auc(const ScoredPairs& ranked, std::span<const Edge> positives);

/// Scores the union of past[window_start..] against `next`; nullopt when
/// `next` holds no new links relative to the reference graph.
std::optional<double> link_step_score(std::span<const StaticGraph> past, std::size_t window_start,
                                      const StaticGraph& next, const KatzParams& params,
                                      NewLinkReference reference = NewLinkReference::Windowed);

/// Online step score using the last graph of an already windowed history.
std::optional<double> online_step_score(const WindowedSequence& history, const StaticGraph& next,
                                        const KatzParams& params);

/// 0-based start of the last window when `length` steps are windowed at `width`.
constexpr std::size_t uniform_last_window_start(std::size_t length, std::size_t width) {
  return length == 0 ? 0 : ((length - 1) / width) * width;
}

}  // namespace tscale
