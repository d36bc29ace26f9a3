#pragma once

// Window-size selection: supervised offline sweep, the online ledger-based
// selector, and the unsupervised baselines.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tscale/graph.hpp"
#include "tscale/windowing.hpp"

namespace tscale {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Offline supervised selection

/// Task score of the training data windowed uniformly at `width`; nullopt
/// marks a width the task could not score.
using WidthOracle = std::function<std::optional<double>(std::size_t width)>;

struct OfflineSelection {
  std::size_t width = 1;
  /// scores[w - 1] for w = 1..max_width.
  std::vector<std::optional<double>> scores;
};

/// Argmax over w in 1..max_width, smallest w on ties; 1 if nothing scored.
OfflineSelection supervised_offline_select(std::size_t max_width, const WidthOracle& oracle);

// ---------------------------------------------------------------------------
// Online selection

struct SelectorParams {
  std::size_t min_tests = 10;    // M
  std::size_t top_tested = 10;   // B
  double alpha = 0.5;            // 1 = unweighted mean
  std::uint64_t seed = 0;
};

/// Chronological score lists per window size.
class ScoreLedger {
 public:
  struct Entry {
    std::size_t step;
    double score;

    bool operator==(const Entry&) const = default;
  };

  void record(std::size_t width, std::size_t step, double score);
  std::size_t tests(std::size_t width) const;
  std::span<const Entry> scores(std::size_t width) const;
  /// Widths with at least one score, ascending.
  std::vector<std::size_t> widths() const;
  /// Mean with weights alpha^(now - step); nullopt when never scored.
  std::optional<double> mean(std::size_t width, std::size_t now, double alpha) const;

  bool operator==(const ScoreLedger&) const = default;

 private:
  std::map<std::size_t, std::vector<Entry>> scores_;
};

/// Score of predicting `next` from `past` windowed uniformly at `width`;
/// nullopt when `next` brings nothing to predict.
using StepScorer = std::function<std::optional<double>(std::span<const StaticGraph> past,
                                                       std::size_t width, const StaticGraph& next)>;

struct OnlineStep {
  std::size_t step = 0;
  std::vector<std::size_t> tested;
  std::vector<std::pair<std::size_t, double>> appended;
  /// Width behind the prediction evaluated at this step, and its score.
  std::size_t predicted_with = 1;
  std::optional<double> prediction_score;
  std::size_t chosen = 1;

  bool operator==(const OnlineStep&) const = default;
};

class OnlineWindowSelector {
 public:
  OnlineWindowSelector(SelectorParams params, StepScorer scorer);

  /// Consumes the next graph G_i. The prediction made after G_{i-1} is scored
  /// against it; while learning, the tested sizes are scored and the ledger
  /// and chosen size are updated.
  const OnlineStep& observe(const StaticGraph& graph);

  /// Stop adding scores; the chosen size stays fixed from now on.
  void freeze() { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  std::size_t chosen() const noexcept { return chosen_; }
  const ScoreLedger& ledger() const noexcept { return ledger_; }
  std::span<const OnlineStep> trace() const noexcept { return trace_; }
  std::span<const StaticGraph> history() const noexcept { return graphs_; }
  const SelectorParams& params() const noexcept { return params_; }

 private:
  std::vector<std::size_t> tested_sizes(std::size_t step) const;
  std::size_t argmax_mean(std::size_t now) const;

  SelectorParams params_;
  StepScorer scorer_;
  ScoreLedger ledger_;
  std::vector<StaticGraph> graphs_;
  std::vector<OnlineStep> trace_;
  std::size_t chosen_ = 1;
  bool frozen_ = false;
};

/// Runs the online ledger over the training stream and returns the size
/// chosen at its end.
std::size_t training_only_select(std::span<const StaticGraph> train, const SelectorParams& params,
                                 const StepScorer& scorer);

// ---------------------------------------------------------------------------
// Baselines

/// Dominant period of the edge-count series (mean removed, Hann taper);
/// DFT bin k maps to width round(T / k), k = 1..T/2. Falls back to 1 on a
/// flat spectrum.
std::size_t fourier_select(const GraphSequence& seq);
/// Score per candidate width (max |X_k| over bins rounding to it).
std::map<std::size_t, double> fourier_scores(std::span<const double> series);

/// Mean Jaccard index of consecutive windows at each width with at least two
/// windows; entry w - 1, nullopt where undefined.
std::vector<std::optional<double>> jaccard_curve(const GraphSequence& seq);
/// First width where the forward gain J(w+1) - J(w) drops below
/// tau * (max J - J(1)).
std::size_t jaccard_select(const GraphSequence& seq, double tau = 0.05);

/// Von Neumann entropy (bits) of the trace-normalized combinatorial Laplacian.
double von_neumann_entropy(const StaticGraph& g);
/// Mean per-window entropy minus the entropy of the union of all steps.
double entropy_quality(const GraphSequence& seq, const Windowing& windowing);
/// Greedy merging of adjacent windows while the quality does not increase.
Windowing entropy_select(const GraphSequence& seq);

/// Discrete power-law MLE of the exponent with x_min = 1 over positive
/// degrees; nullopt when every degree is zero.
std::optional<double> powerlaw_exponent(std::span<const std::size_t> degrees);
struct AdageOptions {
  double epsilon = 0.01;
  std::size_t consecutive = 3;
};
/// Smallest w at which the exponent of the union of G_1..G_w has changed by
/// less than epsilon (relative) for `consecutive` increments in a row; T otherwise.
std::size_t adage_select(const GraphSequence& seq, const AdageOptions& options = {});

/// Left to right, each window length uniform on [1, remaining].
Windowing random_windowing(std::size_t length, std::uint64_t seed);

enum class FixedMode { HandPicked, NoTime };
std::size_t fixed_select(FixedMode mode, std::size_t length);

}  // namespace tscale
