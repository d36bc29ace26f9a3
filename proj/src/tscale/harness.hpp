#pragma once

// Experimental protocol: interval plans, offline and online train/test loops,
// score curves and the cross-task analyses built on them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tscale/changepoint.hpp"
#include "tscale/graph.hpp"
#include "tscale/linkpred.hpp"
#include "tscale/selectors.hpp"
#include "tscale/tvrc.hpp"
#include "tscale/windowing.hpp"

namespace tscale {

enum class Task { LinkPrediction, Attribute, ChangePoint };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);
std::vector<std::string> task_names();

enum class SelectorKind {
  Supervised,      // offline sweep (attribute, change point)
  Online,          // ledger, unweighted mean (link prediction)
  OnlineWeighted,  // ledger, exponentially weighted mean
  TrainingOnly,    // ledger frozen after training
  HandPicked,
  NoTime,
  Random,
  Fourier,
  Jaccard,
  Entropy,
  Adage,
};

std::string_view selector_name(SelectorKind kind);
std::optional<SelectorKind> parse_selector(std::string_view name);
std::vector<std::string> selector_names();
bool selector_supports(SelectorKind kind, Task task);

struct IntervalPlan {
  std::vector<Span> intervals;
  /// (train, test) interval indices, 0-based.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const noexcept { return intervals.size(); }
  bool operator==(const IntervalPlan&) const = default;
};

/// k consecutive intervals covering 1..T; lengths differ by at most one,
/// longer intervals first.
IntervalPlan split_intervals(std::size_t length, std::size_t k);

struct Dataset {
  std::string id;
  GraphSequence sequence;
  std::optional<VertexAttributes> attributes;
  std::optional<ChangePointLabels> change_points;
};

struct HarnessParams {
  KatzParams katz;
  NewLinkReference reference = NewLinkReference::Windowed;
  SelectorParams selector;
  TvrcOptions tvrc;
  std::size_t batch_size = 0;  // 0 = default
  double jaccard_tau = 0.05;
  AdageOptions adage;
  GraphscopeOptions graphscope;
  bool carry_over = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// ---------------------------------------------------------------------------
// What a selector may see. The test phase only exposes edges, so a test
// ground-truth leak cannot be expressed.

struct TrainingView {
  std::span<const StaticGraph> graphs;
  const VertexAttributes* attributes = nullptr;
  ChangePointLabels change_points;
};

struct TestEdges {
  std::span<const StaticGraph> graphs;
};

struct Selection {
  Windowing windowing;
  /// Set when the selector emits a single size.
  std::optional<std::size_t> width;
  std::vector<std::string> log;
};

/// Windowing of the test edges chosen by an offline selector.
Selection select_offline(SelectorKind kind, Task task, const TrainingView& train, const TestEdges& test,
                         std::size_t vertex_count, const HarnessParams& params, std::uint64_t cell_seed);

// ---------------------------------------------------------------------------
// Reports

struct CellResult {
  std::string selector;
  std::size_t pair = 0;
  std::optional<double> score;
  std::vector<std::size_t> window_lengths;  // chosen test windowing (offline)
  std::vector<std::string> log;
  std::vector<OnlineStep> steps;  // per-step record (online)
};

struct ExperimentReport {
  std::string dataset_id;
  Task task = Task::LinkPrediction;
  std::string aggregation;  // "mean" or "pooled"
  IntervalPlan plan;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<CellResult> cells;
  std::map<std::string, std::optional<double>> aggregates;
};

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
/// One row per cell: selector,pair,train,test,score,windows.
std::string report_to_csv(const ExperimentReport& report);

/// Deterministic seed for an experiment cell.
std::uint64_t cell_seed(std::uint64_t master, std::string_view selector, std::size_t pair);

/// Attribute and change-point tasks: every (selector, pair) cell chooses a
/// test windowing from training data and test edges; change-point scores
/// are averaged over pairs, attribute predictions pooled into one AUC.
ExperimentReport run_offline(const IntervalPlan& plan, std::span<const SelectorKind> selectors, Task task,
                             const Dataset& data, const HarnessParams& params);

/// Link prediction: per pair, training steps warm up the selector, then each
/// test step with new links is predicted. Pair score is the mean step AP,
/// the aggregate the mean over scored pairs.
ExperimentReport run_online(const IntervalPlan& plan, std::span<const SelectorKind> selectors,
                            const Dataset& data, const HarnessParams& params);

// ---------------------------------------------------------------------------
// Curves and cross-task analysis

/// scores[interval][w - 1] for every uniform w on that interval.
struct ScoreCurves {
  std::string dataset_id;
  Task task = Task::LinkPrediction;
  IntervalPlan plan;
  std::vector<std::vector<std::optional<double>>> scores;
};

/// Score of the task on one interval windowed uniformly at `width`.
std::optional<double> interval_score(Task task, const Dataset& data, Span interval, std::size_t width,
                                     const HarnessParams& params);

ScoreCurves score_curves(const IntervalPlan& plan, Task task, const Dataset& data, const HarnessParams& params);

nlohmann::json curves_to_json(const ScoreCurves& curves);
ScoreCurves curves_from_json(const nlohmann::json& j);
/// Long format: interval,w,score.
std::string curves_to_csv(const ScoreCurves& curves);

/// Smallest w with the highest score; missing scores count as 0.
std::size_t curve_argmax(std::span<const std::optional<double>> curve);

/// entry(i, j) = mean over intervals of task j's score at task i's argmax
/// width. Curves must share the interval plan.
std::vector<std::vector<double>> cross_task_matrix(std::span<const ScoreCurves> curves);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
};

/// Pearson correlation of midranks with a two-sided t-approximation p-value.
/// Throws UndefinedMetric when either side has zero rank variance.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

/// Midranks (1-based, ties averaged).
std::vector<double> midranks(std::span<const double> xs);

/// Mean |score(w, i+1) - score(w, i)| over widths defined on both intervals.
double stability_diff(const ScoreCurves& curves);

struct SweepCell {
  std::size_t min_tests = 0;
  std::size_t top_tested = 0;
  std::optional<double> aggregate;
};

/// Online link prediction across M values (B fixed) and B values (M fixed).
std::vector<SweepCell> hyperparam_sweep(std::span<const std::size_t> m_values, std::span<const std::size_t> b_values,
                                        std::size_t fixed, SelectorKind selector, const Dataset& data,
                                        const IntervalPlan& plan, const HarnessParams& params);

}  // namespace tscale
