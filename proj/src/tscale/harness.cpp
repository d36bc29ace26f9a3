#include "tscale/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "tscale/errors.hpp"
#include "tscale/metrics.hpp"

namespace tscale {

namespace {

constexpr std::pair<Task, std::string_view> kTasks[] = {
    {Task::LinkPrediction, "linkpred"},
    {Task::Attribute, "attribute"},
    {Task::ChangePoint, "changepoint"},
};

constexpr std::pair<SelectorKind, std::string_view> kSelectors[] = {
    {SelectorKind::Supervised, "supervised"},
    {SelectorKind::Online, "online"},
    {SelectorKind::OnlineWeighted, "online-weighted"},
    {SelectorKind::TrainingOnly, "training-only"},
    {SelectorKind::HandPicked, "hand-picked"},
    {SelectorKind::NoTime, "no-time"},
    {SelectorKind::Random, "random"},
    {SelectorKind::Fourier, "fourier"},
    {SelectorKind::Jaccard, "jaccard"},
    {SelectorKind::Entropy, "entropy"},
    {SelectorKind::Adage, "adage"},
};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception (by index) is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t jobs, Body body) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::span<const StaticGraph> interval_graphs(const Dataset& data, Span s) {
  return data.sequence.graphs().subspan(s.first - 1, s.size());
}

GraphSequence as_sequence(std::size_t n, std::span<const StaticGraph> graphs) {
  return GraphSequence(n, std::vector<StaticGraph>(graphs.begin(), graphs.end()));
}

const VertexAttributes& require_attributes(const Dataset& data) {
  if (!data.attributes) throw ValidationError("dataset '" + data.id + "' has no vertex attributes");
  return *data.attributes;
}

const ChangePointLabels& require_change_points(const Dataset& data) {
  if (!data.change_points) throw ValidationError("dataset '" + data.id + "' has no change-point labels");
  return *data.change_points;
}

GraphscopeOptions detector_options(const HarnessParams& params) {
  GraphscopeOptions opts = params.graphscope;
  opts.trace = nullptr;
  return opts;
}

double change_point_score(std::span<const StaticGraph> graphs, const Windowing& windowing,
                          const ChangePointLabels& truth, const HarnessParams& params) {
  const auto detected = graphscope_detect(apply_windowing(graphs, windowing), detector_options(params));
  return cp_pr_auc(detected.times, truth.times, graphs.size());
}

std::vector<ScoredLabel> attribute_predictions(std::span<const StaticGraph> fit, std::size_t fit_width,
                                               std::span<const StaticGraph> eval, std::size_t eval_width,
                                               const VertexAttributes& attrs, const HarnessParams& params) {
  const auto fit_ws = apply_windowing(fit, Windowing::uniform(fit.size(), fit_width));
  const auto eval_ws = apply_windowing(eval, Windowing::uniform(eval.size(), eval_width));
  return batch_leave_out_predictions(fit_ws, eval_ws, attrs, params.batch_size, params.tvrc);
}

// Scores predicting `next` from `past` whose last window starts at `start`.
std::optional<double> link_score(std::span<const StaticGraph> past, std::size_t start, const StaticGraph& next,
                                 const HarnessParams& params) {
  return link_step_score(past, start, next, params.katz, params.reference);
}

StepScorer uniform_link_scorer(const HarnessParams& params) {
  return [params](std::span<const StaticGraph> past, std::size_t width, const StaticGraph& next) {
    return link_score(past, uniform_last_window_start(past.size(), width), next, params);
  };
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

nlohmann::json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

std::optional<double> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

nlohmann::json plan_to_json(const IntervalPlan& plan) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& s : plan.intervals) intervals.push_back({s.first, s.last});
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : plan.pairs) pairs.push_back({a, b});
  return {{"intervals", intervals}, {"pairs", pairs}};
}

IntervalPlan plan_from_json(const nlohmann::json& j) {
  IntervalPlan plan;
  for (const auto& s : j.at("intervals")) plan.intervals.push_back(Span{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  for (const auto& p : j.at("pairs")) plan.pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  return plan;
}

Task task_from_json(const nlohmann::json& j) {
  const auto name = j.get<std::string>();
  const auto task = parse_task(name);
  if (!task) throw ValidationError("unknown task '" + name + "'");
  return *task;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view task_name(Task task) {
  for (const auto& [t, name] : kTasks) {
    if (t == task) return name;
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (const auto& [t, n] : kTasks) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::vector<std::string> task_names() {
  std::vector<std::string> out;
  for (const auto& entry : kTasks) out.emplace_back(entry.second);
  return out;
}

std::string_view selector_name(SelectorKind kind) {
  for (const auto& [k, name] : kSelectors) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<SelectorKind> parse_selector(std::string_view name) {
  for (const auto& [k, n] : kSelectors) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> selector_names() {
  std::vector<std::string> out;
  for (const auto& entry : kSelectors) out.emplace_back(entry.second);
  return out;
}

bool selector_supports(SelectorKind kind, Task task) {
  switch (kind) {
    case SelectorKind::Supervised:
      return task != Task::LinkPrediction;
    case SelectorKind::Online:
    case SelectorKind::OnlineWeighted:
    case SelectorKind::TrainingOnly:
      return task == Task::LinkPrediction;
    default:
      return true;
  }
}

IntervalPlan split_intervals(std::size_t length, std::size_t k) {
  if (k < 1) throw std::invalid_argument("interval count must be at least 1");
  if (k > length) {
    throw std::invalid_argument("cannot split " + std::to_string(length) + " steps into " + std::to_string(k) +
                                " intervals");
  }
  IntervalPlan plan;
  const std::size_t base = length / k;
  const std::size_t extra = length % k;
  std::size_t first = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    plan.intervals.push_back(Span{first, first + len - 1});
    first += len;
  }
  for (std::size_t i = 0; i + 1 < k; ++i) plan.pairs.emplace_back(i, i + 1);
  return plan;
}

std::uint64_t cell_seed(std::uint64_t master, std::string_view selector, std::size_t pair) {
  return splitmix64(master ^ splitmix64(fnv1a(selector) + pair));
}

// ---------------------------------------------------------------------------

Selection select_offline(SelectorKind kind, Task task, const TrainingView& train, const TestEdges& test,
                         std::size_t vertex_count, const HarnessParams& params, std::uint64_t seed) {
  if (!selector_supports(kind, task)) {
    throw ValidationError("selector '" + std::string(selector_name(kind)) + "' does not apply to task '" +
                          std::string(task_name(task)) + "'");
  }
  const std::size_t T = test.graphs.size();
  if (T == 0) throw std::invalid_argument("empty test interval");
  Selection out;
  auto single = [&](std::size_t w) {
    w = std::clamp<std::size_t>(w, 1, T);
    out.width = w;
    out.windowing = Windowing::uniform(T, w);
  };

  switch (kind) {
    case SelectorKind::Supervised: {
      WidthOracle oracle;
      std::size_t max_width = train.graphs.size();
      if (task == Task::ChangePoint) {
        if (train.change_points.times.empty()) out.log.push_back("training interval has no change points");
        oracle = [&](std::size_t w) -> std::optional<double> {
          return change_point_score(train.graphs, Windowing::uniform(train.graphs.size(), w), train.change_points,
                                    params);
        };
      } else {
        if (!train.attributes) throw ValidationError("attribute selection needs training labels");
        // First half fits, second half scores; a single step serves as both.
        const std::size_t half = train.graphs.size() / 2;
        const auto fit = half == 0 ? train.graphs : train.graphs.first(half);
        const auto eval = half == 0 ? train.graphs : train.graphs.subspan(half);
        max_width = eval.size();
        oracle = [&, fit, eval](std::size_t w) -> std::optional<double> {
          return roc_auc(attribute_predictions(fit, std::min(w, fit.size()), eval, w, *train.attributes, params));
        };
      }
      const auto guarded = [&](std::size_t w) -> std::optional<double> {
        try {
          return oracle(w);
        } catch (const std::exception& e) {
          out.log.push_back("w=" + std::to_string(w) + " skipped: " + e.what());
          return std::nullopt;
        }
      };
      single(supervised_offline_select(max_width, guarded).width);
      break;
    }
    case SelectorKind::HandPicked:
      single(fixed_select(FixedMode::HandPicked, T));
      break;
    case SelectorKind::NoTime:
      single(fixed_select(FixedMode::NoTime, T));
      break;
    case SelectorKind::Random:
      out.windowing = random_windowing(T, seed);
      break;
    case SelectorKind::Entropy:
      out.windowing = entropy_select(as_sequence(vertex_count, test.graphs));
      break;
    case SelectorKind::Fourier:
      single(T < 2 ? 1 : fourier_select(as_sequence(vertex_count, test.graphs)));
      break;
    case SelectorKind::Jaccard:
      single(T < 2 ? 1 : jaccard_select(as_sequence(vertex_count, test.graphs), params.jaccard_tau));
      break;
    case SelectorKind::Adage:
      single(T < 2 ? 1 : adage_select(as_sequence(vertex_count, test.graphs), params.adage));
      break;
    default:
      throw ValidationError("selector '" + std::string(selector_name(kind)) + "' is online only");
  }
  return out;
}

// ---------------------------------------------------------------------------

ExperimentReport run_offline(const IntervalPlan& plan, std::span<const SelectorKind> selectors, Task task,
                             const Dataset& data, const HarnessParams& params) {
  if (task == Task::LinkPrediction) throw ValidationError("link prediction runs through the online protocol");
  for (auto s : selectors) {
    if (!selector_supports(s, task)) {
      throw ValidationError("selector '" + std::string(selector_name(s)) + "' does not apply to task '" +
                            std::string(task_name(task)) + "'");
    }
  }
  const VertexAttributes* attrs = task == Task::Attribute ? &require_attributes(data) : nullptr;
  const ChangePointLabels* truth = task == Task::ChangePoint ? &require_change_points(data) : nullptr;

  ExperimentReport report;
  report.dataset_id = data.id;
  report.task = task;
  report.aggregation = task == Task::Attribute ? "pooled" : "mean";
  report.plan = plan;
  report.seed = params.seed;

  const std::size_t pairs = plan.pairs.size();
  const std::size_t cells = selectors.size() * pairs;
  report.cells.resize(cells);
  std::vector<std::vector<ScoredLabel>> predictions(cells);

  parallel_for(cells, params.jobs, [&](std::size_t c) {
    const auto kind = selectors[c / pairs];
    const auto p = c % pairs;
    const auto train_span = plan.intervals[plan.pairs[p].first];
    const auto test_span = plan.intervals[plan.pairs[p].second];
    auto& cell = report.cells[c];
    cell.selector = std::string(selector_name(kind));
    cell.pair = p;

    TrainingView train{interval_graphs(data, train_span), attrs, {}};
    if (truth) train.change_points = truth->restrict_to(train_span.first, train_span.last);
    const TestEdges test{interval_graphs(data, test_span)};
    auto selection = select_offline(kind, task, train, test, data.sequence.vertex_count(), params,
                                    cell_seed(params.seed, cell.selector, p));
    cell.window_lengths = selection.windowing.lengths();
    cell.log = std::move(selection.log);

    try {
      if (truth) {
        cell.score = change_point_score(test.graphs, selection.windowing,
                                        truth->restrict_to(test_span.first, test_span.last), params);
      } else {
        const auto ws = apply_windowing(test.graphs, selection.windowing);
        predictions[c] = batch_leave_out_predictions(ws, ws, *attrs, params.batch_size, params.tvrc);
        cell.score = roc_auc(predictions[c]);
      }
    } catch (const UndefinedMetric& e) {
      cell.log.push_back(e.what());
    }
  });

  for (std::size_t s = 0; s < selectors.size(); ++s) {
    const std::string name(selector_name(selectors[s]));
    std::optional<double> aggregate;
    if (task == Task::ChangePoint) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t p = 0; p < pairs; ++p) {
        if (const auto& score = report.cells[s * pairs + p].score) {
          sum += *score;
          ++count;
        }
      }
      if (count > 0) aggregate = sum / static_cast<double>(count);
    } else {
      std::vector<ScoredLabel> pooled;
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto& part = predictions[s * pairs + p];
        pooled.insert(pooled.end(), part.begin(), part.end());
      }
      try {
        aggregate = roc_auc(pooled);
      } catch (const UndefinedMetric&) {
      }
    }
    report.aggregates[name] = aggregate;
  }
  return report;
}

namespace {

// Test-step scores of one pair for a selector that fixes a windowing of the
// whole pair stream up front.
std::vector<OnlineStep> fixed_windowing_steps(std::span<const StaticGraph> stream, std::size_t train_length,
                                              const Windowing& windowing, const HarnessParams& params) {
  std::vector<OnlineStep> steps;
  for (std::size_t i = train_length + 1; i <= stream.size(); ++i) {
    OnlineStep step;
    step.step = i;
    const auto past = stream.first(i - 1);
    const auto window = windowing.segment(windowing.segment_of(i - 1));
    step.predicted_with = window.size();
    step.chosen = step.predicted_with;
    step.prediction_score = link_score(past, window.first - 1, stream[i - 1], params);
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace

ExperimentReport run_online(const IntervalPlan& plan, std::span<const SelectorKind> selectors, const Dataset& data,
                            const HarnessParams& params) {
  for (auto s : selectors) {
    if (!selector_supports(s, Task::LinkPrediction)) {
      throw ValidationError("selector '" + std::string(selector_name(s)) + "' does not apply to task 'linkpred'");
    }
  }
  ExperimentReport report;
  report.dataset_id = data.id;
  report.task = Task::LinkPrediction;
  report.aggregation = "mean";
  report.plan = plan;
  report.seed = params.seed;

  const std::size_t pairs = plan.pairs.size();
  const auto graphs = data.sequence.graphs();
  report.cells.resize(selectors.size() * pairs);

  auto is_ledger = [](SelectorKind k) {
    return k == SelectorKind::Online || k == SelectorKind::OnlineWeighted || k == SelectorKind::TrainingOnly;
  };
  auto ledger_params = [&](SelectorKind k) {
    SelectorParams sp = params.selector;
    if (k == SelectorKind::Online) sp.alpha = 1.0;
    return sp;
  };

  // A carried-over ledger makes the pairs of one selector sequential, so the
  // parallel unit is then the selector rather than the cell.
  const bool carry = params.carry_over;
  const std::size_t units = carry ? selectors.size() : selectors.size() * pairs;
  parallel_for(units, params.jobs, [&](std::size_t u) {
    const std::size_t s = carry ? u : u / pairs;
    const auto kind = selectors[s];
    const std::string name(selector_name(kind));
    const std::size_t first_pair = carry ? 0 : u % pairs;
    const std::size_t last_pair = carry ? pairs : first_pair + 1;

    std::optional<OnlineWindowSelector> shared;
    for (std::size_t p = first_pair; p < last_pair; ++p) {
      const auto train_span = plan.intervals[plan.pairs[p].first];
      const auto test_span = plan.intervals[plan.pairs[p].second];
      auto& cell = report.cells[s * pairs + p];
      cell.selector = name;
      cell.pair = p;

      std::vector<OnlineStep> steps;
      if (is_ledger(kind)) {
        const bool fresh = !carry || !shared;
        if (fresh) shared.emplace(ledger_params(kind), uniform_link_scorer(params));
        auto& selector = *shared;
        // With carry-over the ledger's stream starts at the first interval;
        // otherwise each pair restarts at its training interval.
        const std::size_t offset = carry ? plan.intervals[plan.pairs[0].first].first - 1 : train_span.first - 1;
        if (fresh) {
          for (std::size_t t = train_span.first; t <= train_span.last; ++t) selector.observe(graphs[t - 1]);
        }
        if (kind == SelectorKind::TrainingOnly) selector.freeze();
        for (std::size_t t = test_span.first; t <= test_span.last; ++t) {
          auto step = selector.observe(graphs[t - 1]);
          step.step = t - offset;
          steps.push_back(std::move(step));
        }
      } else {
        const auto stream = graphs.subspan(train_span.first - 1, test_span.last - train_span.first + 1);
        const auto seq = as_sequence(data.sequence.vertex_count(), stream);
        const auto L = stream.size();
        Windowing windowing;
        switch (kind) {
          case SelectorKind::HandPicked:
            windowing = Windowing::uniform(L, fixed_select(FixedMode::HandPicked, L));
            break;
          case SelectorKind::NoTime:
            windowing = Windowing::uniform(L, fixed_select(FixedMode::NoTime, L));
            break;
          case SelectorKind::Random:
            windowing = random_windowing(L, cell_seed(params.seed, name, p));
            break;
          case SelectorKind::Entropy:
            windowing = entropy_select(seq);
            break;
          case SelectorKind::Fourier:
            windowing = Windowing::uniform(L, fourier_select(seq));
            break;
          case SelectorKind::Jaccard:
            windowing = Windowing::uniform(L, jaccard_select(seq, params.jaccard_tau));
            break;
          case SelectorKind::Adage:
            windowing = Windowing::uniform(L, adage_select(seq, params.adage));
            break;
          default:
            throw std::logic_error("unhandled selector");
        }
        cell.window_lengths = windowing.lengths();
        steps = fixed_windowing_steps(stream, train_span.size(), windowing, params);
      }

      double sum = 0.0;
      std::size_t scored = 0;
      for (const auto& step : steps) {
        if (step.prediction_score) {
          sum += *step.prediction_score;
          ++scored;
        }
      }
      if (scored > 0) {
        cell.score = sum / static_cast<double>(scored);
      } else {
        cell.log.push_back("no test step brings new links; pair skipped");
      }
      cell.steps = std::move(steps);
    }
  });

  for (std::size_t s = 0; s < selectors.size(); ++s) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
      if (const auto& score = report.cells[s * pairs + p].score) {
        sum += *score;
        ++count;
      }
    }
    report.aggregates[std::string(selector_name(selectors[s]))] =
        count > 0 ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt;
  }
  return report;
}

// ---------------------------------------------------------------------------

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    const auto train = report.plan.intervals[report.plan.pairs[cell.pair].first];
    const auto test = report.plan.intervals[report.plan.pairs[cell.pair].second];
    nlohmann::json j{{"selector", cell.selector},
                     {"pair", cell.pair},
                     {"train", {train.first, train.last}},
                     {"test", {test.first, test.last}},
                     {"score", optional_json(cell.score)},
                     {"log", cell.log}};
    if (!cell.window_lengths.empty()) j["windows"] = cell.window_lengths;
    if (!cell.steps.empty()) {
      nlohmann::json steps = nlohmann::json::array();
      for (const auto& st : cell.steps) {
        nlohmann::json appended = nlohmann::json::array();
        for (const auto& [w, score] : st.appended) appended.push_back({w, score});
        steps.push_back({{"step", st.step},
                         {"tested", st.tested},
                         {"appended", appended},
                         {"predicted_with", st.predicted_with},
                         {"prediction", optional_json(st.prediction_score)},
                         {"chosen", st.chosen}});
      }
      j["steps"] = steps;
    }
    cells.push_back(std::move(j));
  }
  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto& [name, value] : report.aggregates) aggregates[name] = optional_json(value);
  return {{"format", "tscale-report"},
          {"version", 1},
          {"dataset", report.dataset_id},
          {"task", task_name(report.task)},
          {"aggregation", report.aggregation},
          {"seed", report.seed},
          {"config_hash", report.config_hash},
          {"plan", plan_to_json(report.plan)},
          {"cells", cells},
          {"aggregates", aggregates}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "tscale-report") throw ValidationError("not a tscale report");
  ExperimentReport r;
  r.dataset_id = j.at("dataset").get<std::string>();
  r.task = task_from_json(j.at("task"));
  r.aggregation = j.at("aggregation").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.plan = plan_from_json(j.at("plan"));
  for (const auto& c : j.at("cells")) {
    CellResult cell;
    cell.selector = c.at("selector").get<std::string>();
    cell.pair = c.at("pair").get<std::size_t>();
    cell.score = optional_from_json(c.at("score"));
    cell.log = c.at("log").get<std::vector<std::string>>();
    if (c.contains("windows")) cell.window_lengths = c.at("windows").get<std::vector<std::size_t>>();
    if (c.contains("steps")) {
      for (const auto& s : c.at("steps")) {
        OnlineStep st;
        st.step = s.at("step").get<std::size_t>();
        st.tested = s.at("tested").get<std::vector<std::size_t>>();
        for (const auto& a : s.at("appended")) st.appended.emplace_back(a.at(0).get<std::size_t>(), a.at(1).get<double>());
        st.predicted_with = s.at("predicted_with").get<std::size_t>();
        st.prediction_score = optional_from_json(s.at("prediction"));
        st.chosen = s.at("chosen").get<std::size_t>();
        cell.steps.push_back(std::move(st));
      }
    }
    r.cells.push_back(std::move(cell));
  }
  for (const auto& [name, value] : j.at("aggregates").items()) r.aggregates[name] = optional_from_json(value);
  return r;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "selector,pair,train_first,train_last,test_first,test_last,score,windows\n";
  for (const auto& cell : report.cells) {
    const auto train = report.plan.intervals[report.plan.pairs[cell.pair].first];
    const auto test = report.plan.intervals[report.plan.pairs[cell.pair].second];
    os << cell.selector << ',' << cell.pair << ',' << train.first << ',' << train.last << ',' << test.first << ','
       << test.last << ',' << (cell.score ? format_double(*cell.score) : "") << ',';
    for (std::size_t i = 0; i < cell.window_lengths.size(); ++i) os << (i ? " " : "") << cell.window_lengths[i];
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::optional<double> interval_score(Task task, const Dataset& data, Span interval, std::size_t width,
                                     const HarnessParams& params) {
  const auto graphs = interval_graphs(data, interval);
  const auto windowing = Windowing::uniform(graphs.size(), width);
  try {
    switch (task) {
      case Task::LinkPrediction: {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 2; i <= graphs.size(); ++i) {
          const auto past = graphs.first(i - 1);
          if (auto s = link_score(past, uniform_last_window_start(past.size(), width), graphs[i - 1], params)) {
            sum += *s;
            ++count;
          }
        }
        if (count == 0) return std::nullopt;
        return sum / static_cast<double>(count);
      }
      case Task::ChangePoint:
        return change_point_score(graphs, windowing, require_change_points(data).restrict_to(interval.first, interval.last),
                                  params);
      case Task::Attribute:
        return batch_leave_out_auc(apply_windowing(graphs, windowing), require_attributes(data), params.batch_size,
                                   params.tvrc);
    }
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
  return std::nullopt;
}

ScoreCurves score_curves(const IntervalPlan& plan, Task task, const Dataset& data, const HarnessParams& params) {
  if (task == Task::Attribute) require_attributes(data);
  if (task == Task::ChangePoint) require_change_points(data);
  ScoreCurves curves;
  curves.dataset_id = data.id;
  curves.task = task;
  curves.plan = plan;
  curves.scores.resize(plan.size());
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    curves.scores[i].resize(plan.intervals[i].size());
    for (std::size_t w = 1; w <= plan.intervals[i].size(); ++w) cells.emplace_back(i, w);
  }
  parallel_for(cells.size(), params.jobs, [&](std::size_t c) {
    const auto [i, w] = cells[c];
    curves.scores[i][w - 1] = interval_score(task, data, plan.intervals[i], w, params);
  });
  return curves;
}

nlohmann::json curves_to_json(const ScoreCurves& curves) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& row : curves.scores) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& x : row) r.push_back(optional_json(x));
    scores.push_back(std::move(r));
  }
  return {{"format", "tscale-curves"},
          {"version", 1},
          {"dataset", curves.dataset_id},
          {"task", task_name(curves.task)},
          {"plan", plan_to_json(curves.plan)},
          {"scores", scores}};
}

ScoreCurves curves_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "tscale-curves") throw ValidationError("not a score-curve file");
  ScoreCurves c;
  c.dataset_id = j.at("dataset").get<std::string>();
  c.task = task_from_json(j.at("task"));
  c.plan = plan_from_json(j.at("plan"));
  for (const auto& row : j.at("scores")) {
    std::vector<std::optional<double>> r;
    for (const auto& x : row) r.push_back(optional_from_json(x));
    c.scores.push_back(std::move(r));
  }
  if (c.scores.size() != c.plan.size()) throw ValidationError("curve rows do not match the interval plan");
  for (std::size_t i = 0; i < c.plan.size(); ++i) {
    if (c.scores[i].size() != c.plan.intervals[i].size()) {
      throw ValidationError("curve for interval " + std::to_string(i + 1) + " does not cover its window sizes");
    }
  }
  return c;
}

std::string curves_to_csv(const ScoreCurves& curves) {
  std::ostringstream os;
  os << "interval,w,score\n";
  for (std::size_t i = 0; i < curves.scores.size(); ++i) {
    for (std::size_t w = 1; w <= curves.scores[i].size(); ++w) {
      const auto& x = curves.scores[i][w - 1];
      os << i + 1 << ',' << w << ',' << (x ? format_double(*x) : "") << '\n';
    }
  }
  return os.str();
}

std::size_t curve_argmax(std::span<const std::optional<double>> curve) {
  std::size_t best_w = 1;
  double best = -1.0;
  for (std::size_t w = 1; w <= curve.size(); ++w) {
    const double x = curve[w - 1].value_or(0.0);
    if (x > best) {
      best = x;
      best_w = w;
    }
  }
  return best_w;
}

std::vector<std::vector<double>> cross_task_matrix(std::span<const ScoreCurves> curves) {
  const std::size_t k = curves.size();
  for (const auto& c : curves) {
    if (!(c.plan == curves.front().plan)) throw std::invalid_argument("score curves use different interval plans");
  }
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
  if (k == 0) return m;
  const std::size_t intervals = curves.front().plan.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t t = 0; t < intervals; ++t) {
      const auto w = curve_argmax(curves[i].scores[t]);
      for (std::size_t j = 0; j < k; ++j) m[i][j] += curves[j].scores[t][w - 1].value_or(0.0);
    }
    for (auto& x : m[i]) x /= static_cast<double>(intervals);
  }
  return m;
}

std::vector<double> midranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman inputs differ in length");
  if (xs.size() < 3) throw std::invalid_argument("spearman needs at least three points");
  const auto rx = midranks(xs);
  const auto ry = midranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedMetric("spearman correlation undefined: constant ranking");
  SpearmanResult out;
  out.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(out.rho) >= 1.0) {
    out.p = 0.0;
    return out;
  }
  const double df = n - 2.0;
  const double t = out.rho * std::sqrt(df / (1.0 - out.rho * out.rho));
  const boost::math::students_t dist(df);
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return out;
}

double stability_diff(const ScoreCurves& curves) {
  if (curves.scores.size() < 2) throw std::invalid_argument("stability needs at least two intervals");
  std::size_t width = curves.scores.front().size();
  for (const auto& row : curves.scores) width = std::min(width, row.size());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < curves.scores.size(); ++i) {
    for (std::size_t w = 0; w < width; ++w) {
      const auto& a = curves.scores[i][w];
      const auto& b = curves.scores[i + 1][w];
      if (a && b) {
        sum += std::abs(*b - *a);
        ++count;
      }
    }
  }
  if (count == 0) throw UndefinedMetric("no window size is scored on two consecutive intervals");
  return sum / static_cast<double>(count);
}

std::vector<SweepCell> hyperparam_sweep(std::span<const std::size_t> m_values, std::span<const std::size_t> b_values,
                                        std::size_t fixed, SelectorKind selector, const Dataset& data,
                                        const IntervalPlan& plan, const HarnessParams& params) {
  std::vector<SweepCell> grid;
  for (auto m : m_values) grid.push_back(SweepCell{m, fixed, std::nullopt});
  for (auto b : b_values) grid.push_back(SweepCell{fixed, b, std::nullopt});
  const SelectorKind kinds[] = {selector};
  HarnessParams inner = params;
  inner.jobs = 1;
  parallel_for(grid.size(), params.jobs, [&](std::size_t c) {
    HarnessParams cell_params = inner;
    cell_params.selector.min_tests = grid[c].min_tests;
    cell_params.selector.top_tested = grid[c].top_tested;
    const auto report = run_online(plan, kinds, data, cell_params);
    grid[c].aggregate = report.aggregates.begin()->second;
  });
  return grid;
}

}  // namespace tscale
