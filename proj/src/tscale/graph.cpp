#include "tscale/graph.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

#include "tscale/errors.hpp"

namespace tscale {

Edge make_edge(VertexId a, VertexId b) {
  if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
  return a < b ? Edge{a, b} : Edge{b, a};
}

StaticGraph::StaticGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    e = make_edge(e.u, e.v);
    if (e.v >= n_) {
      throw std::invalid_argument("edge endpoint " + std::to_string(e.v) +
                                  " out of range for " + std::to_string(n_) + " vertices");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool StaticGraph::has_edge(VertexId a, VertexId b) const {
  if (a == b) return false;
  return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
}

std::vector<std::size_t> StaticGraph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<std::vector<VertexId>> StaticGraph::adjacency() const {
  std::vector<std::vector<VertexId>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

StaticGraph StaticGraph::union_of(std::span<const StaticGraph> graphs) {
  if (graphs.empty()) return StaticGraph{};
  StaticGraph out(graphs.front().vertex_count());
  if (graphs.size() == 1) return graphs.front();
  std::vector<Edge> merged;
  for (const auto& g : graphs) {
    if (g.vertex_count() != out.n_) throw std::invalid_argument("union of graphs with different vertex counts");
    std::vector<Edge> next;
    next.reserve(merged.size() + g.edge_count());
    std::set_union(merged.begin(), merged.end(), g.edges_.begin(), g.edges_.end(),
                   std::back_inserter(next));
    merged = std::move(next);
  }
  out.edges_ = std::move(merged);
  return out;
}

std::vector<Edge> edge_difference(const StaticGraph& a, const StaticGraph& b) {
  std::vector<Edge> out;
  std::set_difference(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(),
                      std::back_inserter(out));
  return out;
}

std::size_t intersection_size(const StaticGraph& a, const StaticGraph& b) {
  std::size_t count = 0;
  auto i = a.edges().begin();
  auto j = b.edges().begin();
  while (i != a.edges().end() && j != b.edges().end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

LabelTable::LabelTable(std::vector<std::string> labels) {
  for (auto& l : labels) {
    if (index_.count(l)) throw std::invalid_argument("duplicate vertex label '" + l + "'");
    index_.emplace(l, static_cast<VertexId>(labels_.size()));
    labels_.push_back(std::move(l));
  }
}

VertexId LabelTable::intern(std::string_view label) {
  std::string key(label);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<VertexId>(labels_.size());
  index_.emplace(key, id);
  labels_.push_back(std::move(key));
  return id;
}

std::optional<VertexId> LabelTable::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GraphSequence::GraphSequence(std::size_t n, std::vector<StaticGraph> graphs, Timestamp resolution,
                             Timestamp origin, LabelTable labels)
    : n_(n), graphs_(std::move(graphs)), resolution_(resolution), origin_(origin),
      labels_(std::move(labels)) {
  if (graphs_.empty()) throw std::invalid_argument("graph sequence must have at least one step");
  if (resolution_ <= 0) throw std::invalid_argument("resolution must be positive");
  for (const auto& g : graphs_) {
    if (g.vertex_count() != n_) throw std::invalid_argument("all graphs must share the vertex set");
  }
  if (labels_.size() != 0 && labels_.size() != n_) {
    throw std::invalid_argument("label table size does not match vertex count");
  }
}

GraphSequence GraphSequence::slice(std::size_t first, std::size_t last) const {
  if (first < 1 || last < first || last > length()) {
    throw std::out_of_range("slice [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] outside 1.." + std::to_string(length()));
  }
  std::vector<StaticGraph> part(graphs_.begin() + static_cast<std::ptrdiff_t>(first - 1),
                                graphs_.begin() + static_cast<std::ptrdiff_t>(last));
  return GraphSequence(n_, std::move(part), resolution_,
                       origin_ + static_cast<Timestamp>(first - 1) * resolution_, labels_);
}

GraphSequence bin_initial(std::span<const EdgeEvent> events, std::size_t vertex_count,
                          Timestamp resolution, std::optional<Timestamp> origin, LabelTable labels) {
  if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
  if (events.empty()) throw std::invalid_argument("cannot bin an empty event list");
  Timestamp t_min = events.front().t;
  Timestamp t_max = events.front().t;
  for (const auto& e : events) {
    t_min = std::min(t_min, e.t);
    t_max = std::max(t_max, e.t);
  }
  const Timestamp start = origin.value_or(t_min);
  if (start > t_min) {
    throw std::invalid_argument("binning origin " + std::to_string(start) +
                                " is after the first event at " + std::to_string(t_min));
  }
  const auto steps = static_cast<std::size_t>((t_max - start + 1 + resolution - 1) / resolution);
  std::vector<std::vector<Edge>> bins(steps);
  for (const auto& e : events) {
    if (e.u >= vertex_count || e.v >= vertex_count) throw std::invalid_argument("event endpoint out of range");
    bins[static_cast<std::size_t>((e.t - start) / resolution)].push_back(make_edge(e.u, e.v));
  }
  std::vector<StaticGraph> graphs;
  graphs.reserve(steps);
  for (auto& b : bins) graphs.emplace_back(vertex_count, std::move(b));
  return GraphSequence(vertex_count, std::move(graphs), resolution, start, std::move(labels));
}

GraphSequence bin_initial(const ParsedEdges& parsed, Timestamp resolution, std::optional<Timestamp> origin) {
  return bin_initial(parsed.events, parsed.vertex_count(), resolution, origin, parsed.labels);
}

ChangePointLabels ChangePointLabels::restrict_to(std::size_t first, std::size_t last) const {
  ChangePointLabels out;
  for (auto t : times) {
    if (t >= first && t <= last) out.times.push_back(t - first + 1);
  }
  return out;
}

}  // namespace tscale
