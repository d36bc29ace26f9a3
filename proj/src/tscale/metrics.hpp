#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tscale {

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

/// Area under the ROC curve as the Mann-Whitney statistic with midranks
/// (tied positive/negative pairs count 1/2). Throws UndefinedMetric when
/// only one class is present.
double roc_auc(std::span<const ScoredLabel> items);

/// Average precision of a ranking: mean over all `total_positives` of
/// precision at the rank where each is retrieved; positives missing from
/// `relevance` count as never retrieved. Throws UndefinedMetric when
/// total_positives == 0.
double average_precision(std::span<const std::uint8_t> relevance, std::size_t total_positives);

}  // namespace tscale
