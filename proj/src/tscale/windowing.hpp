#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tscale/graph.hpp"

namespace tscale {

/// Inclusive 1-based step range.
struct Span {
  std::size_t first = 1;
  std::size_t last = 1;

  std::size_t size() const noexcept { return last - first + 1; }
  bool operator==(const Span&) const = default;
};

/// Segmentation of steps 1..T into contiguous, non-overlapping windows,
/// stored as the sorted cut indices k_1 < ... < k_{m-1} in [1, T-1].
class Windowing {
 public:
  Windowing() = default;
  Windowing(std::size_t length, std::vector<std::size_t> cuts);

  static Windowing uniform(std::size_t length, std::size_t width);
  static Windowing from_lengths(std::span<const std::size_t> lengths);
  static Windowing whole(std::size_t length) { return Windowing(length, {}); }

  std::size_t length() const noexcept { return length_; }
  std::size_t segment_count() const noexcept { return cuts_.size() + 1; }
  std::span<const std::size_t> cuts() const noexcept { return cuts_; }
  Span segment(std::size_t index) const;
  std::vector<Span> spans() const;
  std::vector<std::size_t> lengths() const;
  /// 0-based index of the window holding `step`.
  std::size_t segment_of(std::size_t step) const;

  bool operator==(const Windowing&) const = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::size_t> cuts_;
};

/// Uniform windowing; every window has `width` steps except possibly the last.
Windowing uniform_windowing(std::size_t length, std::size_t width);

/// Windowing of the original steps obtained by first applying `inner` and
/// then grouping its windows with `outer` (outer.length() == inner.segment_count()).
Windowing compose(const Windowing& inner, const Windowing& outer);

/// Union graphs H_1..H_m of a windowed sequence.
struct WindowedSequence {
  std::size_t vertex_count = 0;
  Windowing windowing;
  std::vector<Span> spans;
  std::vector<StaticGraph> graphs;

  std::size_t size() const noexcept { return graphs.size(); }
  /// The windowed graphs as a sequence, for re-windowing.
  GraphSequence as_sequence() const;
};

WindowedSequence apply_windowing(std::span<const StaticGraph> graphs, const Windowing& windowing);
WindowedSequence apply_windowing(const GraphSequence& seq, const Windowing& windowing);

std::string windowing_to_json(const Windowing& windowing);
Windowing windowing_from_json(std::string_view json, std::size_t length);
/// Human-readable "window  first  last  steps" table.
std::string span_table(const Windowing& windowing);

}  // namespace tscale
