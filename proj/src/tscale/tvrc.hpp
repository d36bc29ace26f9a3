#pragma once

// Time-varying relational classifier for a binary vertex attribute.
//
// Model contract: weighted relational naive Bayes. For class c,
//   log P(c | v) ~ log P(c) + sum_f log P(x_f(v) | c)
//                + sum_i sum_{u ~_i v, u labeled} w_i * log P(class(u) | c)
// with w_i = (1 - theta)^(m - i) * theta for window i of m. Categorical
// features and neighbor classes use add-one smoothing, continuous features a
// per-class Gaussian with a variance floor.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tscale/graph.hpp"
#include "tscale/metrics.hpp"
#include "tscale/windowing.hpp"

namespace tscale {

struct KernelParams {
  double theta = 0.5;
};

/// Exponential kernel (1 - theta)^(total - index) * theta, index in 1..total.
double edge_weight(std::size_t total, std::size_t index, double theta);

struct TvrcOptions {
  KernelParams kernel;
  double variance_floor = 1e-9;
};

/// Per-vertex (window, neighbor) contacts of a windowed sequence.
class TemporalNeighborhood {
 public:
  struct Contact {
    std::uint32_t window;  // 1-based
    VertexId neighbor;
  };

  explicit TemporalNeighborhood(const WindowedSequence& ws);

  std::size_t window_count() const noexcept { return windows_; }
  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::span<const Contact> contacts(VertexId v) const {
    return std::span<const Contact>(contacts_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

 private:
  std::size_t windows_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Contact> contacts_;
};

struct GaussianSummary {
  double mean = 0.0;
  double variance = 0.0;
  double count = 0.0;
};

struct FeatureSummary {
  FeatureKind kind = FeatureKind::Categorical;
  /// [class][category] raw counts.
  std::array<std::vector<double>, 2> category_counts;
  std::array<GaussianSummary, 2> gaussian;
};

struct TvrcModel {
  std::array<double, 2> class_counts{};
  /// [class][neighbor class] kernel-weighted contact counts.
  std::array<std::array<double, 2>, 2> neighbor_counts{};
  std::vector<FeatureSummary> features;
  /// Target labels visible as neighbor evidence (-1 hidden).
  std::vector<std::int8_t> evidence;
  TvrcOptions options;
  std::vector<std::string> warnings;

  double prior(int cls) const;
  double neighbor_likelihood(int cls, int neighbor_cls) const;
  double categorical_likelihood(std::size_t feature, int cls, int code) const;
  /// Log density; the feature is ignored (returns 0 for both classes) unless
  /// both classes observed it.
  double log_gaussian(std::size_t feature, int cls, double x) const;
};

struct AttributePrediction {
  int label = 0;
  double positive_posterior = 0.5;
};

TvrcModel fit_tvrc(const TemporalNeighborhood& contacts, const VertexAttributes& attrs,
                   std::span<const VertexId> known, const TvrcOptions& options = {});
TvrcModel fit_tvrc(const WindowedSequence& ws, const VertexAttributes& attrs,
                   std::span<const VertexId> known, const TvrcOptions& options = {});

AttributePrediction predict_attribute(const TvrcModel& model, const TemporalNeighborhood& contacts,
                                      const VertexAttributes& attrs, VertexId vertex);
AttributePrediction predict_attribute(const TvrcModel& model, const WindowedSequence& ws,
                                      const VertexAttributes& attrs, VertexId vertex);

/// ceil(labeled / 10), at least 1.
std::size_t default_batch_size(std::size_t labeled);

/// Labeled vertices in ascending id are cut into batches of `batch_size`
/// (0 selects the default). Each batch is hidden, the model is fitted on
/// `fit_ws` with the remaining labels, and the batch is scored on `eval_ws`.
std::vector<ScoredLabel> batch_leave_out_predictions(const WindowedSequence& fit_ws,
                                                     const WindowedSequence& eval_ws,
                                                     const VertexAttributes& attrs,
                                                     std::size_t batch_size,
                                                     const TvrcOptions& options = {});

double batch_leave_out_auc(const WindowedSequence& ws, const VertexAttributes& attrs,
                           std::size_t batch_size, const TvrcOptions& options = {});

}  // namespace tscale
