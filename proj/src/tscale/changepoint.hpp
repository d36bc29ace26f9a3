#pragma once

// MDL change-point detection over a windowed sequence (symmetric,
// single-partition block encoding) and the distance-tolerance PR-AUC used to
// score detected change points.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tscale/graph.hpp"
#include "tscale/windowing.hpp"

namespace tscale {

/// Universal integer code length in bits, log2(2.865064) + log2 x + log2 log2 x + ...
/// (positive terms only). Requires x >= 1.
double log_star(double x);

/// Binary entropy in bits with H(0) = H(1) = 0.
double binary_entropy(double p);

/// Group index per vertex; groups are numbered 0..k-1 without gaps.
using NodePartition = std::vector<std::uint32_t>;

/// Bits to encode `graphs` as one segment under `partition`:
///   log*(k) + sum_a log*(n_a) + n * H(n_1/n, .., n_k/n)
///   + sum over blocks a <= b of [log2(C_ab + 1) + C_ab * H(E_ab / C_ab)]
/// where C_ab = |graphs| * (n_a (n_a - 1) / 2 if a == b else n_a n_b) and
/// E_ab counts the block's edges summed over the segment's graphs.
double segment_cost(std::span<const StaticGraph> graphs, const NodePartition& partition);

/// Detected change times at the initial resolution (window start steps).
struct ChangePointResult {
  std::vector<std::size_t> times;

  bool operator==(const ChangePointResult&) const = default;
};

struct SegmentTrace {
  std::size_t window = 0;  // 0-based window index
  double extend_cost = 0.0;
  double fresh_cost = 0.0;
  bool split = false;
};

struct GraphscopeOptions {
  std::size_t max_sweeps = 50;
  /// Optional per-window decision log.
  std::vector<SegmentTrace>* trace = nullptr;
};

/// Local search: each vertex in turn moves to the group (or a new singleton
/// group) that lowers the segment cost most, until no move improves.
NodePartition refine_partition(std::span<const StaticGraph> graphs, NodePartition seed,
                               std::size_t max_sweeps = 50);

ChangePointResult graphscope_detect(const WindowedSequence& ws, const GraphscopeOptions& options = {});

/// Normalized area under the distance-tolerance precision-recall curve over
/// d in [0, n]; 0 when either set is empty. Times must lie in [1, n].
double cp_pr_auc(std::span<const std::size_t> proposed, std::span<const std::size_t> truth, std::size_t n);

}  // namespace tscale
