#include "tscale/windowing.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "tscale/errors.hpp"

namespace tscale {

Windowing::Windowing(std::size_t length, std::vector<std::size_t> cuts)
    : length_(length), cuts_(std::move(cuts)) {
  if (length_ == 0) throw std::invalid_argument("windowing of an empty sequence");
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (cuts_[i] < 1 || cuts_[i] >= length_) {
      throw std::out_of_range("cut index " + std::to_string(cuts_[i]) + " outside [1, " +
                              std::to_string(length_ - 1) + "]");
    }
    if (i > 0 && cuts_[i] <= cuts_[i - 1]) throw std::invalid_argument("cut indices must be strictly increasing");
  }
}

Windowing Windowing::uniform(std::size_t length, std::size_t width) {
  if (width < 1 || width > length) {
    throw std::invalid_argument("window size " + std::to_string(width) + " outside [1, " +
                                std::to_string(length) + "]");
  }
  std::vector<std::size_t> cuts;
  for (std::size_t k = width; k < length; k += width) cuts.push_back(k);
  return Windowing(length, std::move(cuts));
}

Windowing Windowing::from_lengths(std::span<const std::size_t> lengths) {
  std::vector<std::size_t> cuts;
  std::size_t pos = 0;
  for (auto len : lengths) {
    if (len == 0) throw std::invalid_argument("zero-length window");
    if (pos > 0) cuts.push_back(pos);
    pos += len;
  }
  return Windowing(pos, std::move(cuts));
}

Span Windowing::segment(std::size_t index) const {
  if (index >= segment_count()) throw std::out_of_range("window index out of range");
  const std::size_t first = index == 0 ? 1 : cuts_[index - 1] + 1;
  const std::size_t last = index == cuts_.size() ? length_ : cuts_[index];
  return Span{first, last};
}

std::vector<Span> Windowing::spans() const {
  std::vector<Span> out;
  out.reserve(segment_count());
  for (std::size_t i = 0; i < segment_count(); ++i) out.push_back(segment(i));
  return out;
}

std::vector<std::size_t> Windowing::lengths() const {
  std::vector<std::size_t> out;
  for (const auto& s : spans()) out.push_back(s.size());
  return out;
}

std::size_t Windowing::segment_of(std::size_t step) const {
  if (step < 1 || step > length_) throw std::out_of_range("step out of range");
  return static_cast<std::size_t>(std::lower_bound(cuts_.begin(), cuts_.end(), step) - cuts_.begin());
}

Windowing uniform_windowing(std::size_t length, std::size_t width) { return Windowing::uniform(length, width); }

Windowing compose(const Windowing& inner, const Windowing& outer) {
  if (outer.length() != inner.segment_count()) {
    throw std::invalid_argument("outer windowing length must equal the inner window count");
  }
  std::vector<std::size_t> cuts;
  for (auto k : outer.cuts()) cuts.push_back(inner.segment(k - 1).last);
  return Windowing(inner.length(), std::move(cuts));
}

GraphSequence WindowedSequence::as_sequence() const { return GraphSequence(vertex_count, graphs); }

WindowedSequence apply_windowing(std::span<const StaticGraph> graphs, const Windowing& windowing) {
  if (windowing.length() != graphs.size()) {
    throw std::out_of_range("windowing covers " + std::to_string(windowing.length()) +
                            " steps but the sequence has " + std::to_string(graphs.size()));
  }
  WindowedSequence out;
  out.vertex_count = graphs.empty() ? 0 : graphs.front().vertex_count();
  out.windowing = windowing;
  out.spans = windowing.spans();
  out.graphs.reserve(out.spans.size());
  for (const auto& s : out.spans) out.graphs.push_back(StaticGraph::union_of(graphs.subspan(s.first - 1, s.size())));
  return out;
}

WindowedSequence apply_windowing(const GraphSequence& seq, const Windowing& windowing) {
  return apply_windowing(seq.graphs(), windowing);
}

std::string windowing_to_json(const Windowing& windowing) {
  return nlohmann::json(std::vector<std::size_t>(windowing.cuts().begin(), windowing.cuts().end())).dump();
}

Windowing windowing_from_json(std::string_view text, std::size_t length) {
  try {
    auto cuts = nlohmann::json::parse(text).get<std::vector<std::size_t>>();
    return Windowing(length, std::move(cuts));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("windowing JSON: ") + e.what(), 0);
  }
}

std::string span_table(const Windowing& windowing) {
  std::string out = "window  first   last  steps\n";
  char buf[64];
  const auto spans = windowing.spans();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%6zu %6zu %6zu %6zu\n", i + 1, spans[i].first, spans[i].last, spans[i].size());
    out += buf;
  }
  return out;
}

}  // namespace tscale
