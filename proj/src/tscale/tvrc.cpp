#include "tscale/tvrc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tscale/errors.hpp"

namespace tscale {

double edge_weight(std::size_t total, std::size_t index, double theta) {
  if (index < 1 || index > total) throw std::out_of_range("kernel index outside 1..total");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("kernel theta must lie in (0, 1)");
  return std::pow(1.0 - theta, static_cast<double>(total - index)) * theta;
}

TemporalNeighborhood::TemporalNeighborhood(const WindowedSequence& ws) : windows_(ws.size()) {
  const auto n = ws.vertex_count;
  std::vector<std::size_t> degree(n, 0);
  for (const auto& g : ws.graphs) {
    for (const auto& e : g.edges()) {
      ++degree[e.u];
      ++degree[e.v];
    }
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  contacts_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < ws.graphs.size(); ++i) {
    const auto window = static_cast<std::uint32_t>(i + 1);
    for (const auto& e : ws.graphs[i].edges()) {
      contacts_[cursor[e.u]++] = Contact{window, e.v};
      contacts_[cursor[e.v]++] = Contact{window, e.u};
    }
  }
}

double TvrcModel::prior(int cls) const {
  return (class_counts[cls] + 1.0) / (class_counts[0] + class_counts[1] + 2.0);
}

double TvrcModel::neighbor_likelihood(int cls, int neighbor_cls) const {
  const auto& row = neighbor_counts[cls];
  return (row[neighbor_cls] + 1.0) / (row[0] + row[1] + 2.0);
}

double TvrcModel::categorical_likelihood(std::size_t feature, int cls, int code) const {
  const auto& counts = features.at(feature).category_counts[cls];
  double total = 0.0;
  for (double c : counts) total += c;
  return (counts.at(code) + 1.0) / (total + static_cast<double>(counts.size()));
}

double TvrcModel::log_gaussian(std::size_t feature, int cls, double x) const {
  const auto& g = features.at(feature).gaussian;
  if (g[0].count < 1.0 || g[1].count < 1.0) return 0.0;
  const double var = std::max(g[cls].variance, options.variance_floor);
  const double d = x - g[cls].mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

TvrcModel fit_tvrc(const TemporalNeighborhood& contacts, const VertexAttributes& attrs,
                   std::span<const VertexId> known, const TvrcOptions& options) {
  if (known.empty()) throw std::invalid_argument("TVRC needs at least one labeled vertex to fit");
  if (contacts.window_count() == 0) throw std::invalid_argument("TVRC needs a nonempty windowed sequence");
  if (contacts.vertex_count() != attrs.vertex_count()) throw std::invalid_argument("attribute population does not match graph");
  const double theta = options.kernel.theta;
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("kernel theta must lie in (0, 1)");

  TvrcModel model;
  model.options = options;
  model.evidence.assign(attrs.vertex_count(), VertexAttributes::kUnknown);
  for (auto v : known) {
    const auto t = attrs.target(v);
    if (t == VertexAttributes::kUnknown) throw std::invalid_argument("known vertex without a target value");
    model.evidence[v] = t;
    model.class_counts[t] += 1.0;
  }
  for (int c = 0; c < 2; ++c) {
    if (model.class_counts[c] == 0.0) {
      model.warnings.push_back("class '" + (c ? attrs.positive_value() : attrs.negative_value()) +
                               "' absent from the fitting set; prior rests on smoothing");
    }
  }

  const auto m = contacts.window_count();
  std::vector<double> weights(m);
  for (std::size_t i = 1; i <= m; ++i) weights[i - 1] = edge_weight(m, i, theta);
  for (auto v : known) {
    const int c = model.evidence[v];
    for (const auto& contact : contacts.contacts(v)) {
      const auto nc = model.evidence[contact.neighbor];
      if (nc == VertexAttributes::kUnknown) continue;
      model.neighbor_counts[c][nc] += weights[contact.window - 1];
    }
  }

  const auto features = attrs.features();
  model.features.resize(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& col = features[f];
    auto& summary = model.features[f];
    summary.kind = col.kind;
    if (col.kind == FeatureKind::Categorical) {
      for (auto& counts : summary.category_counts) counts.assign(col.categories.size(), 0.0);
      for (auto v : known) {
        if (col.codes[v] >= 0) summary.category_counts[model.evidence[v]][col.codes[v]] += 1.0;
      }
      continue;
    }
    for (int c = 0; c < 2; ++c) {
      auto& g = summary.gaussian[c];
      double sum = 0.0;
      for (auto v : known) {
        if (model.evidence[v] == c && !std::isnan(col.values[v])) {
          sum += col.values[v];
          g.count += 1.0;
        }
      }
      if (g.count == 0.0) continue;
      g.mean = sum / g.count;
      double ss = 0.0;
      for (auto v : known) {
        if (model.evidence[v] == c && !std::isnan(col.values[v])) ss += (col.values[v] - g.mean) * (col.values[v] - g.mean);
      }
      g.variance = std::max(ss / g.count, options.variance_floor);
    }
  }
  return model;
}

TvrcModel fit_tvrc(const WindowedSequence& ws, const VertexAttributes& attrs,
                   std::span<const VertexId> known, const TvrcOptions& options) {
  return fit_tvrc(TemporalNeighborhood(ws), attrs, known, options);
}

AttributePrediction predict_attribute(const TvrcModel& model, const TemporalNeighborhood& contacts,
                                      const VertexAttributes& attrs, VertexId vertex) {
  if (vertex >= attrs.vertex_count()) throw std::out_of_range("vertex outside the population");
  std::array<double, 2> lp{std::log(model.prior(0)), std::log(model.prior(1))};

  const auto features = attrs.features();
  for (std::size_t f = 0; f < features.size() && f < model.features.size(); ++f) {
    const auto& col = features[f];
    for (int c = 0; c < 2; ++c) {
      if (col.kind == FeatureKind::Categorical) {
        if (col.codes[vertex] >= 0) lp[c] += std::log(model.categorical_likelihood(f, c, col.codes[vertex]));
      } else if (!std::isnan(col.values[vertex])) {
        lp[c] += model.log_gaussian(f, c, col.values[vertex]);
      }
    }
  }

  const auto m = contacts.window_count();
  if (m > 0) {
    const std::array<std::array<double, 2>, 2> log_nl{{
        {std::log(model.neighbor_likelihood(0, 0)), std::log(model.neighbor_likelihood(0, 1))},
        {std::log(model.neighbor_likelihood(1, 0)), std::log(model.neighbor_likelihood(1, 1))},
    }};
    const double theta = model.options.kernel.theta;
    for (const auto& contact : contacts.contacts(vertex)) {
      const auto nc = model.evidence[contact.neighbor];
      if (nc == VertexAttributes::kUnknown) continue;
      const double w = edge_weight(m, contact.window, theta);
      lp[0] += w * log_nl[0][nc];
      lp[1] += w * log_nl[1][nc];
    }
  }

  AttributePrediction out;
  out.positive_posterior = 1.0 / (1.0 + std::exp(lp[0] - lp[1]));
  out.label = lp[1] > lp[0] ? 1 : 0;
  return out;
}

AttributePrediction predict_attribute(const TvrcModel& model, const WindowedSequence& ws,
                                      const VertexAttributes& attrs, VertexId vertex) {
  return predict_attribute(model, TemporalNeighborhood(ws), attrs, vertex);
}

std::size_t default_batch_size(std::size_t labeled) { return std::max<std::size_t>(1, (labeled + 9) / 10); }

std::vector<ScoredLabel> batch_leave_out_predictions(const WindowedSequence& fit_ws,
                                                     const WindowedSequence& eval_ws,
                                                     const VertexAttributes& attrs,
                                                     std::size_t batch_size,
                                                     const TvrcOptions& options) {
  const auto labeled = attrs.labeled_vertices();
  std::array<std::size_t, 2> per_class{};
  for (auto v : labeled) ++per_class[attrs.target(v)];
  if (per_class[0] == 0 || per_class[1] == 0) {
    throw UndefinedMetric("attribute '" + attrs.target_name() + "' has a single class among labeled vertices");
  }
  if (batch_size == 0) batch_size = default_batch_size(labeled.size());
  if (batch_size >= labeled.size()) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                " leaves no vertices to fit on (" + std::to_string(labeled.size()) + " labeled)");
  }
  const TemporalNeighborhood fit_contacts(fit_ws);
  const TemporalNeighborhood eval_contacts(eval_ws);

  std::vector<ScoredLabel> out;
  out.reserve(labeled.size());
  std::vector<VertexId> known;
  for (std::size_t start = 0; start < labeled.size(); start += batch_size) {
    const auto end = std::min(labeled.size(), start + batch_size);
    known.clear();
    known.insert(known.end(), labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(start));
    known.insert(known.end(), labeled.begin() + static_cast<std::ptrdiff_t>(end), labeled.end());
    const auto model = fit_tvrc(fit_contacts, attrs, known, options);
    for (std::size_t k = start; k < end; ++k) {
      const auto v = labeled[k];
      const auto p = predict_attribute(model, eval_contacts, attrs, v);
      out.push_back(ScoredLabel{p.positive_posterior, attrs.target(v) == 1});
    }
  }
  return out;
}

double batch_leave_out_auc(const WindowedSequence& ws, const VertexAttributes& attrs,
                           std::size_t batch_size, const TvrcOptions& options) {
  return roc_auc(batch_leave_out_predictions(ws, ws, attrs, batch_size, options));
}

}  // namespace tscale
