#include "tscale/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/minima.hpp>

namespace tscale {

OfflineSelection supervised_offline_select(std::size_t max_width, const WidthOracle& oracle) {
  if (max_width < 1) throw std::invalid_argument("training sequence must have at least one step");
  OfflineSelection out;
  out.scores.reserve(max_width);
  std::optional<double> best;
  for (std::size_t w = 1; w <= max_width; ++w) {
    auto score = oracle(w);
    if (score && (!best || *score > *best)) {
      best = score;
      out.width = w;
    }
    out.scores.push_back(score);
  }
  return out;
}

// ---------------------------------------------------------------------------

void ScoreLedger::record(std::size_t width, std::size_t step, double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw std::invalid_argument("ledger scores must lie in [0, 1]");
  scores_[width].push_back(Entry{step, score});
}

std::size_t ScoreLedger::tests(std::size_t width) const {
  auto it = scores_.find(width);
  return it == scores_.end() ? 0 : it->second.size();
}

std::span<const ScoreLedger::Entry> ScoreLedger::scores(std::size_t width) const {
  auto it = scores_.find(width);
  if (it == scores_.end()) return {};
  return it->second;
}

std::vector<std::size_t> ScoreLedger::widths() const {
  std::vector<std::size_t> out;
  for (const auto& [w, list] : scores_) {
    if (!list.empty()) out.push_back(w);
  }
  return out;
}

std::optional<double> ScoreLedger::mean(std::size_t width, std::size_t now, double alpha) const {
  auto it = scores_.find(width);
  if (it == scores_.end() || it->second.empty()) return std::nullopt;
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : it->second) {
    const double weight = std::pow(alpha, static_cast<double>(now - e.step));
    num += weight * e.score;
    den += weight;
  }
  return num / den;
}

OnlineWindowSelector::OnlineWindowSelector(SelectorParams params, StepScorer scorer)
    : params_(params), scorer_(std::move(scorer)) {
  if (params_.min_tests < 1 || params_.top_tested < 1) throw std::invalid_argument("M and B must be at least 1");
  if (!(params_.alpha > 0.0 && params_.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
}

std::vector<std::size_t> OnlineWindowSelector::tested_sizes(std::size_t step) const {
  std::vector<std::size_t> out;
  for (std::size_t w = 1; w < step; ++w) {
    if (ledger_.tests(w) < params_.min_tests) out.push_back(w);
  }
  // Ranking uses the means as of the graphs seen before this step.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (auto w : ledger_.widths()) ranked.emplace_back(*ledger_.mean(w, step - 1, params_.alpha), w);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  for (std::size_t r = 0; r < ranked.size() && r < params_.top_tested; ++r) out.push_back(ranked[r].second);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t OnlineWindowSelector::argmax_mean(std::size_t now) const {
  std::size_t best_w = 1;
  std::optional<double> best;
  for (auto w : ledger_.widths()) {
    const auto m = ledger_.mean(w, now, params_.alpha);
    if (!best || *m > *best) {
      best = m;
      best_w = w;
    }
  }
  return best_w;
}

const OnlineStep& OnlineWindowSelector::observe(const StaticGraph& graph) {
  const std::size_t step = graphs_.size() + 1;
  OnlineStep record;
  record.step = step;
  record.predicted_with = chosen_;
  if (step >= 2) {
    std::map<std::size_t, std::optional<double>> cache;
    auto score_of = [&](std::size_t w) {
      auto it = cache.find(w);
      if (it == cache.end()) it = cache.emplace(w, scorer_(graphs_, w, graph)).first;
      return it->second;
    };
    record.prediction_score = score_of(chosen_);
    if (!frozen_) {
      record.tested = tested_sizes(step);
      for (auto w : record.tested) {
        if (auto s = score_of(w)) {
          ledger_.record(w, step, *s);
          record.appended.emplace_back(w, *s);
        }
      }
      chosen_ = argmax_mean(step);
    }
  }
  record.chosen = chosen_;
  graphs_.push_back(graph);
  trace_.push_back(std::move(record));
  return trace_.back();
}

std::size_t training_only_select(std::span<const StaticGraph> train, const SelectorParams& params,
                                 const StepScorer& scorer) {
  OnlineWindowSelector selector(params, scorer);
  for (const auto& g : train) selector.observe(g);
  return selector.chosen();
}

// ---------------------------------------------------------------------------

std::map<std::size_t, double> fourier_scores(std::span<const double> series) {
  const std::size_t n = series.size();
  std::map<std::size_t, double> scores;
  if (n < 2) return scores;
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> tapered(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    tapered[i] = (series[i] - mean) * hann;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, tapered);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const auto width = static_cast<std::size_t>(std::lround(static_cast<double>(n) / static_cast<double>(k)));
    const double magnitude = std::abs(spectrum[k]);
    auto [it, inserted] = scores.emplace(width, magnitude);
    if (!inserted) it->second = std::max(it->second, magnitude);
  }
  return scores;
}

std::size_t fourier_select(const GraphSequence& seq) {
  std::vector<double> counts;
  double scale = 1.0;
  for (const auto& g : seq.graphs()) {
    counts.push_back(static_cast<double>(g.edge_count()));
    scale += static_cast<double>(g.edge_count());
  }
  std::size_t best_w = 1;
  double best = 1e-9 * scale;
  for (const auto& [w, score] : fourier_scores(counts)) {
    if (score > best) {
      best = score;
      best_w = w;
    }
  }
  return best_w;
}

namespace {

double jaccard(const StaticGraph& a, const StaticGraph& b) {
  const auto common = intersection_size(a, b);
  const auto uni = a.edge_count() + b.edge_count() - common;
  return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::optional<double>> jaccard_curve(const GraphSequence& seq) {
  const auto T = seq.length();
  std::vector<std::optional<double>> curve(T);
  for (std::size_t w = 1; w < T; ++w) {
    const auto ws = apply_windowing(seq, uniform_windowing(T, w));
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) sum += jaccard(ws.graphs[i], ws.graphs[i + 1]);
    curve[w - 1] = sum / static_cast<double>(ws.size() - 1);
  }
  return curve;
}

std::size_t jaccard_select(const GraphSequence& seq, double tau) {
  const auto curve = jaccard_curve(seq);
  std::vector<std::pair<std::size_t, double>> points;
  for (std::size_t w = 1; w <= curve.size(); ++w) {
    if (curve[w - 1]) points.emplace_back(w, *curve[w - 1]);
  }
  if (points.empty()) return 1;
  double peak = points.front().second;
  for (const auto& p : points) peak = std::max(peak, p.second);
  const double rise = peak - points.front().second;
  if (rise <= 0.0) return points.front().first;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1].second - points[i].second < tau * rise) return points[i].first;
  }
  return points.back().first;
}

double von_neumann_entropy(const StaticGraph& g) {
  if (g.empty()) return 0.0;
  const auto deg = g.degrees();
  std::vector<std::ptrdiff_t> index(g.vertex_count(), -1);
  Eigen::Index k = 0;
  for (std::size_t v = 0; v < deg.size(); ++v) {
    if (deg[v] > 0) index[v] = k++;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : g.edges()) {
    const auto a = index[e.u];
    const auto b = index[e.v];
    lap(a, b) -= 1.0;
    lap(b, a) -= 1.0;
    lap(a, a) += 1.0;
    lap(b, b) += 1.0;
  }
  lap /= 2.0 * static_cast<double>(g.edge_count());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda > 1e-12) h -= lambda * std::log2(lambda);
  }
  return h;
}

double entropy_quality(const GraphSequence& seq, const Windowing& windowing) {
  const auto ws = apply_windowing(seq, windowing);
  double sum = 0.0;
  for (const auto& g : ws.graphs) sum += von_neumann_entropy(g);
  return sum / static_cast<double>(ws.size()) - von_neumann_entropy(StaticGraph::union_of(seq.graphs()));
}

Windowing entropy_select(const GraphSequence& seq) {
  const auto graphs = seq.graphs();
  std::vector<std::size_t> lengths(graphs.size(), 1);
  std::vector<StaticGraph> layers(graphs.begin(), graphs.end());
  std::vector<double> h;
  for (const auto& g : layers) h.push_back(von_neumann_entropy(g));
  auto merged_of = [&](std::size_t i) {
    const StaticGraph pair[2] = {layers[i], layers[i + 1]};
    return StaticGraph::union_of(pair);
  };
  std::vector<StaticGraph> merged;
  std::vector<double> merged_h;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    merged.push_back(merged_of(i));
    merged_h.push_back(von_neumann_entropy(merged.back()));
  }
  // The union-of-all term is constant across merges, so only the mean moves.
  while (layers.size() > 1) {
    double sum = 0.0;
    for (double x : h) sum += x;
    const double m = static_cast<double>(layers.size());
    const double current = sum / m;
    std::size_t best = 0;
    double best_delta = 0.0;
    for (std::size_t i = 0; i < merged_h.size(); ++i) {
      const double delta = (sum - h[i] - h[i + 1] + merged_h[i]) / (m - 1.0) - current;
      if (i == 0 || delta < best_delta) {
        best_delta = delta;
        best = i;
      }
    }
    if (best_delta > 1e-12) break;
    layers[best] = std::move(merged[best]);
    h[best] = merged_h[best];
    lengths[best] += lengths[best + 1];
    layers.erase(layers.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    h.erase(h.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    lengths.erase(lengths.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(best));
    merged_h.erase(merged_h.begin() + static_cast<std::ptrdiff_t>(best));
    if (best > 0) {
      merged[best - 1] = merged_of(best - 1);
      merged_h[best - 1] = von_neumann_entropy(merged[best - 1]);
    }
    if (best < merged.size()) {
      merged[best] = merged_of(best);
      merged_h[best] = von_neumann_entropy(merged[best]);
    }
  }
  return Windowing::from_lengths(lengths);
}

std::optional<double> powerlaw_exponent(std::span<const std::size_t> degrees) {
  double log_sum = 0.0;
  double count = 0.0;
  for (auto d : degrees) {
    if (d == 0) continue;
    log_sum += std::log(static_cast<double>(d));
    count += 1.0;
  }
  if (count == 0.0) return std::nullopt;
  const auto negative_log_likelihood = [&](double gamma) {
    return count * std::log(boost::math::zeta(gamma)) + gamma * log_sum;
  };
  const auto [gamma, nll] = boost::math::tools::brent_find_minima(negative_log_likelihood, 1.0 + 1e-6, 50.0, 52);
  return gamma;
}

std::size_t adage_select(const GraphSequence& seq, const AdageOptions& options) {
  const auto T = seq.length();
  std::optional<double> previous;
  std::size_t run = 0;
  StaticGraph acc = seq.at(1);
  for (std::size_t w = 1; w <= T; ++w) {
    if (w > 1) {
      const StaticGraph pair[2] = {acc, seq.at(w)};
      acc = StaticGraph::union_of(pair);
    }
    const auto deg = acc.degrees();
    const auto gamma = powerlaw_exponent(deg);
    if (!gamma) continue;
    if (previous) {
      run = std::abs(*gamma - *previous) / *previous < options.epsilon ? run + 1 : 0;
      if (run >= options.consecutive) return w;
    }
    previous = gamma;
  }
  return T;
}

Windowing random_windowing(std::size_t length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("random windowing of an empty sequence");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> lengths;
  std::size_t remaining = length;
  while (remaining > 0) {
    std::uniform_int_distribution<std::size_t> pick(1, remaining);
    const auto len = pick(rng);
    lengths.push_back(len);
    remaining -= len;
  }
  return Windowing::from_lengths(lengths);
}

std::size_t fixed_select(FixedMode mode, std::size_t length) {
  if (length < 1) throw std::invalid_argument("sequence must have at least one step");
  return mode == FixedMode::HandPicked ? 1 : length;
}

}  // namespace tscale
