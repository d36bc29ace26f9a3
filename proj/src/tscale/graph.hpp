#pragma once

// Time-stamped edge streams, static graphs and the initial binning into a
// graph sequence over a fixed vertex set.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tscale {

using VertexId = std::uint32_t;
using Timestamp = std::int64_t;

/// Unordered vertex pair stored canonically (u < v).
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Canonical pair for {a, b}. Throws std::invalid_argument on a == b.
Edge make_edge(VertexId a, VertexId b);

struct EdgeEvent {
  VertexId u = 0;
  VertexId v = 0;
  Timestamp t = 0;

  bool operator==(const EdgeEvent&) const = default;
};

/// Simple undirected graph: sorted, duplicate-free canonical edge list.
class StaticGraph {
 public:
  StaticGraph() = default;
  explicit StaticGraph(std::size_t n) : n_(n) {}
  /// Canonicalizes and deduplicates; rejects self-loops and out-of-range endpoints.
  StaticGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool has_edge(VertexId a, VertexId b) const;
  std::vector<std::size_t> degrees() const;
  std::vector<std::vector<VertexId>> adjacency() const;

  /// Edge-set union of graphs over the same vertex count.
  static StaticGraph union_of(std::span<const StaticGraph> graphs);

  bool operator==(const StaticGraph&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Edges of `a` that are absent from `b`.
std::vector<Edge> edge_difference(const StaticGraph& a, const StaticGraph& b);
std::size_t intersection_size(const StaticGraph& a, const StaticGraph& b);

/// Dense ids for external vertex labels, assigned in first-seen order.
class LabelTable {
 public:
  LabelTable() = default;
  explicit LabelTable(std::vector<std::string> labels);

  VertexId intern(std::string_view label);
  std::optional<VertexId> find(std::string_view label) const;
  const std::string& label(VertexId id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool operator==(const LabelTable& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> index_;
};

/// Ordered snapshots G_1..G_T over a fixed vertex set.
class GraphSequence {
 public:
  GraphSequence() = default;
  GraphSequence(std::size_t n, std::vector<StaticGraph> graphs, Timestamp resolution = 1,
                Timestamp origin = 0, LabelTable labels = {});

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t length() const noexcept { return graphs_.size(); }
  Timestamp resolution() const noexcept { return resolution_; }
  Timestamp origin() const noexcept { return origin_; }
  const LabelTable& labels() const noexcept { return labels_; }
  std::span<const StaticGraph> graphs() const noexcept { return graphs_; }
  /// 1-based step access.
  const StaticGraph& at(std::size_t step) const { return graphs_.at(step - 1); }

  /// Steps [first, last], 1-based inclusive; origin shifts accordingly.
  GraphSequence slice(std::size_t first, std::size_t last) const;

  bool operator==(const GraphSequence&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<StaticGraph> graphs_;
  Timestamp resolution_ = 1;
  Timestamp origin_ = 0;
  LabelTable labels_;
};

// ---------------------------------------------------------------------------
// Edge-stream ingestion

struct EdgeListFormat {
  /// ' ' splits on any run of blanks/tabs.
  char delimiter = ',';
  std::size_t src_column = 0;
  std::size_t dst_column = 1;
  std::size_t time_column = 2;
};

struct ParsedEdges {
  std::vector<EdgeEvent> events;
  LabelTable labels;

  std::size_t vertex_count() const noexcept { return labels.size(); }
};

/// Reads `src,dst,timestamp` lines; '#' comments and blank lines are skipped.
/// Pass a label table to extend an existing id assignment.
ParsedEdges parse_edge_stream(std::istream& in, const EdgeListFormat& format = {},
                              LabelTable labels = {});
ParsedEdges parse_edge_stream(std::string_view text, const EdgeListFormat& format = {});

/// Half-open bins [origin + i*r, origin + (i+1)*r). Origin defaults to t_min.
GraphSequence bin_initial(std::span<const EdgeEvent> events, std::size_t vertex_count,
                          Timestamp resolution, std::optional<Timestamp> origin = std::nullopt,
                          LabelTable labels = {});
GraphSequence bin_initial(const ParsedEdges& parsed, Timestamp resolution,
                          std::optional<Timestamp> origin = std::nullopt);

// ---------------------------------------------------------------------------
// Vertex attributes

enum class FeatureKind { Categorical, Continuous };

struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::Categorical;
  /// Category dictionary, for categorical columns.
  std::vector<std::string> categories;
  /// Category codes (-1 missing) for categorical; values (NaN missing) for continuous.
  std::vector<int> codes;
  std::vector<double> values;
};

struct AttributeSchema {
  char delimiter = ',';
  /// Columns read as continuous; everything else is categorical unless a
  /// `#schema` line in the file says otherwise.
  std::vector<std::string> continuous;
  /// Target value treated as the positive class; defaults to the
  /// lexicographically larger of the two values.
  std::optional<std::string> positive;
};

class VertexAttributes {
 public:
  static constexpr std::int8_t kUnknown = -1;

  VertexAttributes() = default;
  VertexAttributes(std::size_t n, std::vector<FeatureColumn> features, std::string target_name,
                   std::vector<std::int8_t> target, std::string negative_value,
                   std::string positive_value);

  std::size_t vertex_count() const noexcept { return target_.size(); }
  std::span<const FeatureColumn> features() const noexcept { return features_; }
  const std::string& target_name() const noexcept { return target_name_; }
  /// -1 unknown, 0 negative, 1 positive.
  std::int8_t target(VertexId v) const { return target_.at(v); }
  std::span<const std::int8_t> targets() const noexcept { return target_; }
  const std::string& positive_value() const noexcept { return positive_value_; }
  const std::string& negative_value() const noexcept { return negative_value_; }
  std::vector<VertexId> labeled_vertices() const;

  /// Same population with the two target classes exchanged.
  VertexAttributes with_swapped_target() const;

 private:
  std::vector<FeatureColumn> features_;
  std::string target_name_;
  std::vector<std::int8_t> target_;
  std::string negative_value_;
  std::string positive_value_;
};

/// Header row required; first column is the vertex label. Vertices of
/// `labels` absent from the file get empty records.
VertexAttributes load_attributes(std::istream& in, const std::string& target,
                                 const LabelTable& labels, const AttributeSchema& schema = {});
VertexAttributes load_attributes(std::string_view text, const std::string& target,
                                 const LabelTable& labels, const AttributeSchema& schema = {});

// ---------------------------------------------------------------------------
// Change-point labels

/// Strictly increasing 1-based step indices at the initial resolution.
struct ChangePointLabels {
  std::vector<std::size_t> times;

  /// Labels falling in [first, last], re-indexed so `first` maps to 1.
  ChangePointLabels restrict_to(std::size_t first, std::size_t last) const;
  bool operator==(const ChangePointLabels&) const = default;
};

ChangePointLabels parse_change_points(std::istream& in, std::size_t length);
ChangePointLabels parse_change_points(std::string_view text, std::size_t length);

// ---------------------------------------------------------------------------
// On-disk archive: manifest.json + edges.tsv (step, u, v; steps 1-based).

void write_archive(const GraphSequence& seq, const std::filesystem::path& dir);
GraphSequence read_archive(const std::filesystem::path& dir);

}  // namespace tscale
