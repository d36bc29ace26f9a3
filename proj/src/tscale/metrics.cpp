#include "tscale/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tscale/errors.hpp"

namespace tscale {

double roc_auc(std::span<const ScoredLabel> items) {
  std::size_t positives = 0;
  for (const auto& it : items) positives += it.positive ? 1 : 0;
  const std::size_t negatives = items.size() - positives;
  if (positives == 0 || negatives == 0) throw UndefinedMetric("ROC-AUC needs both classes");

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return items[a].score < items[b].score; });

  // Ranks doubled so midranks stay integral: tied block [i, j) gets i + j + 1.
  unsigned long long positive_rank_sum2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && items[order[j]].score == items[order[i]].score) ++j;
    std::size_t block_pos = 0;
    for (std::size_t k = i; k < j; ++k) block_pos += items[order[k]].positive ? 1 : 0;
    positive_rank_sum2 += static_cast<unsigned long long>(block_pos) * (i + j + 1);
    i = j;
  }
  // U = R_pos - P(P+1)/2, everything doubled.
  const auto p = static_cast<unsigned long long>(positives);
  const unsigned long long u2 = positive_rank_sum2 - p * (p + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double average_precision(std::span<const std::uint8_t> relevance, std::size_t total_positives) {
  if (total_positives == 0) throw UndefinedMetric("average precision needs at least one positive");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < relevance.size(); ++r) {
    if (!relevance[r]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(total_positives);
}

}  // namespace tscale
