#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "tscale/errors.hpp"
#include "tscale/harness.hpp"

using namespace tscale;

namespace {

// Cliques on 0..5 for steps 1..5, on 6..11 for 6..15, back to 0..5 for 16..20.
Dataset alternating_cliques() {
  std::vector<StaticGraph> gs;
  for (std::size_t t = 1; t <= 20; ++t) gs.push_back(synth::clique(12, (t >= 6 && t <= 15) ? 6 : 0, 6));
  Dataset d;
  d.id = "cliques";
  d.sequence = GraphSequence(12, gs);
  d.change_points = ChangePointLabels{{6, 16}};
  return d;
}

StepScorer plain_link_scorer() {
  return [](std::span<const StaticGraph> past, std::size_t w, const StaticGraph& next) {
    return link_step_score(past, uniform_last_window_start(past.size(), w), next, KatzParams{});
  };
}

ScoreCurves curves_of(Task task, const IntervalPlan& plan, std::vector<std::vector<std::optional<double>>> scores) {
  ScoreCurves c;
  c.dataset_id = "d";
  c.task = task;
  c.plan = plan;
  c.scores = std::move(scores);
  return c;
}

}  // namespace

TEST_CASE("task and selector registries") {
  CHECK(task_names() == std::vector<std::string>{"linkpred", "attribute", "changepoint"});
  CHECK(parse_task("attribute") == Task::Attribute);
  CHECK_FALSE(parse_task("bogus").has_value());
  CHECK(selector_names().size() == 11);
  for (const auto& name : selector_names()) CHECK(selector_name(*parse_selector(name)) == name);
  CHECK_FALSE(selector_supports(SelectorKind::Supervised, Task::LinkPrediction));
  CHECK(selector_supports(SelectorKind::Supervised, Task::ChangePoint));
  CHECK_FALSE(selector_supports(SelectorKind::OnlineWeighted, Task::Attribute));
  CHECK(selector_supports(SelectorKind::Random, Task::Attribute));
}

TEST_CASE("split_intervals") {
  const auto even = split_intervals(12, 6);
  for (const auto& s : even.intervals) CHECK(s.size() == 2);
  CHECK(even.intervals.back() == Span{11, 12});
  std::vector<std::size_t> lengths;
  for (const auto& s : split_intervals(13, 6).intervals) lengths.push_back(s.size());
  CHECK(lengths == std::vector<std::size_t>{3, 2, 2, 2, 2, 2});
  CHECK(split_intervals(13, 6).pairs.size() == 5);
  CHECK(split_intervals(13, 6).pairs[4] == std::pair<std::size_t, std::size_t>{4, 5});
  CHECK_THROWS_AS(split_intervals(5, 6), std::invalid_argument);
  CHECK_THROWS_AS(split_intervals(5, 0), std::invalid_argument);
}

TEST_CASE("cell seeds are deterministic and distinct") {
  CHECK(cell_seed(1, "random", 0) == cell_seed(1, "random", 0));
  CHECK(cell_seed(1, "random", 0) != cell_seed(1, "random", 1));
  CHECK(cell_seed(1, "random", 0) != cell_seed(2, "random", 0));
  CHECK(cell_seed(1, "random", 0) != cell_seed(1, "entropy", 0));
}

TEST_CASE("offline selection") {
  const auto data = alternating_cliques();
  const auto graphs = data.sequence.graphs();
  TrainingView train{graphs.first(10), nullptr, data.change_points->restrict_to(1, 10)};
  const TestEdges test{graphs.subspan(10)};
  const HarnessParams params;
  CHECK(select_offline(SelectorKind::HandPicked, Task::ChangePoint, train, test, 12, params, 0).width == 1);
  CHECK(select_offline(SelectorKind::NoTime, Task::ChangePoint, train, test, 12, params, 0).width == 10);
  const auto r1 = select_offline(SelectorKind::Random, Task::ChangePoint, train, test, 12, params, 5);
  CHECK(r1.windowing == select_offline(SelectorKind::Random, Task::ChangePoint, train, test, 12, params, 5).windowing);
  CHECK(r1.windowing.length() == 10);
  const auto sup = select_offline(SelectorKind::Supervised, Task::ChangePoint, train, test, 12, params, 0);
  REQUIRE(sup.width.has_value());
  CHECK(*sup.width == 1);  // only w = 1 puts a detection on step 6 exactly
  CHECK_THROWS_AS(select_offline(SelectorKind::Supervised, Task::LinkPrediction, train, test, 12, params, 0),
                  ValidationError);
  CHECK_THROWS_AS(select_offline(SelectorKind::Online, Task::ChangePoint, train, test, 12, params, 0), ValidationError);

  TrainingView quiet{graphs.first(5), nullptr, {}};
  const auto logged = select_offline(SelectorKind::Supervised, Task::ChangePoint, quiet, test, 12, params, 0);
  REQUIRE_FALSE(logged.log.empty());
  CHECK(logged.log.front() == "training interval has no change points");
}

TEST_CASE("offline change-point run adds no transformation") {
  const auto data = alternating_cliques();
  const auto plan = split_intervals(20, 2);
  const SelectorKind kinds[] = {SelectorKind::HandPicked};
  const auto report = run_offline(plan, kinds, Task::ChangePoint, data, {});
  REQUIRE(report.cells.size() == 1);
  const auto test = data.sequence.graphs().subspan(10);
  const auto detected = graphscope_detect(apply_windowing(test, Windowing::uniform(10, 1)));
  const double direct = cp_pr_auc(detected.times, data.change_points->restrict_to(11, 20).times, 10);
  CHECK(report.cells[0].score == direct);
  CHECK(direct == 1.0);
  CHECK(report.aggregates.at("hand-picked") == direct);
  CHECK(report.aggregation == "mean");
}

TEST_CASE("change-point aggregate is the mean over pairs") {
  const auto data = alternating_cliques();
  const auto plan = split_intervals(20, 4);
  const SelectorKind kinds[] = {SelectorKind::HandPicked, SelectorKind::NoTime, SelectorKind::Random};
  HarnessParams params;
  params.jobs = 3;
  const auto report = run_offline(plan, kinds, Task::ChangePoint, data, params);
  for (std::size_t s = 0; s < 3; ++s) {
    double sum = 0.0;
    for (std::size_t p = 0; p < 3; ++p) sum += report.cells[s * 3 + p].score.value();
    CHECK(report.aggregates.at(report.cells[s * 3].selector) == doctest::Approx(sum / 3).epsilon(1e-15));
  }
  params.jobs = 1;
  CHECK(report_to_json(run_offline(plan, kinds, Task::ChangePoint, data, params)) == report_to_json(report));
}

TEST_CASE("attribute scores are pooled, not averaged") {
  // Pooling differs from averaging on this hand case.
  const std::vector<ScoredLabel> a{{0.9, true}, {0.8, false}};
  const std::vector<ScoredLabel> b{{0.2, true}, {0.1, false}};
  std::vector<ScoredLabel> both(a);
  both.insert(both.end(), b.begin(), b.end());
  CHECK(roc_auc(a) == 1.0);
  CHECK(roc_auc(b) == 1.0);
  CHECK(roc_auc(both) == 0.75);

  const auto data = synth::task_dependence_dataset();
  const auto plan = split_intervals(data.sequence.length(), 3);
  const SelectorKind kinds[] = {SelectorKind::HandPicked};
  const auto report = run_offline(plan, kinds, Task::Attribute, data, {});
  CHECK(report.aggregation == "pooled");
  std::vector<ScoredLabel> pooled;
  for (const auto& [train, test] : plan.pairs) {
    const auto span = plan.intervals[test];
    const auto ws = apply_windowing(data.sequence.graphs().subspan(span.first - 1, span.size()),
                                    Windowing::uniform(span.size(), 1));
    const auto part = batch_leave_out_predictions(ws, ws, *data.attributes, 0);
    pooled.insert(pooled.end(), part.begin(), part.end());
  }
  CHECK(report.aggregates.at("hand-picked") == roc_auc(pooled));
}

TEST_CASE("offline run argument checks") {
  const auto data = alternating_cliques();
  const auto plan = split_intervals(20, 2);
  const SelectorKind sup[] = {SelectorKind::Supervised};
  CHECK_THROWS_AS(run_offline(plan, sup, Task::LinkPrediction, data, {}), ValidationError);
  CHECK_THROWS_AS(run_offline(plan, sup, Task::Attribute, data, {}), ValidationError);
}

TEST_CASE("online run: one new-link step scored 1") {
  const StaticGraph path(3, {{0, 1}, {1, 2}});
  const StaticGraph closed(3, {{0, 1}, {1, 2}, {0, 2}});
  Dataset d;
  d.id = "tiny";
  d.sequence = GraphSequence(3, {path, path, path, closed});
  const SelectorKind kinds[] = {SelectorKind::HandPicked};
  const auto report = run_online(split_intervals(4, 2), kinds, d, {});
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].score == 1.0);
  CHECK(report.cells[0].steps.size() == 2);
  CHECK_FALSE(report.cells[0].steps[0].prediction_score.has_value());

  Dataset still = d;
  still.sequence = GraphSequence(3, {path, path, path, path});
  const auto skipped = run_online(split_intervals(4, 2), kinds, still, {});
  CHECK_FALSE(skipped.cells[0].score.has_value());
  CHECK_FALSE(skipped.cells[0].log.empty());
  CHECK_FALSE(skipped.aggregates.at("hand-picked").has_value());
}

TEST_CASE("online run with unlimited M and B matches the exhaustive reference") {
  Dataset d;
  d.id = "random";
  d.sequence = synth::random_sequence(10, 16, 0.15, 31);
  const auto plan = split_intervals(16, 2);
  HarnessParams params;
  params.selector.min_tests = kUnlimited;
  params.selector.top_tested = kUnlimited;
  const SelectorKind kinds[] = {SelectorKind::Online};
  const auto report = run_online(plan, kinds, d, params);
  const auto stream = std::vector<StaticGraph>(d.sequence.graphs().begin(), d.sequence.graphs().end());
  const auto ref = oracle::exhaustive_online(stream, 1.0, plain_link_scorer());
  REQUIRE(report.cells[0].steps.size() == 8);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(report.cells[0].steps[k] == ref.steps[8 + k]);
    if (ref.steps[8 + k].prediction_score) {
      sum += *ref.steps[8 + k].prediction_score;
      ++count;
    }
  }
  REQUIRE(count > 0);
  CHECK(*report.cells[0].score == doctest::Approx(sum / count).epsilon(1e-15));
}

TEST_CASE("online aggregate is the mean over pairs") {
  Dataset d;
  d.id = "random";
  d.sequence = synth::random_sequence(10, 18, 0.15, 8);
  const auto plan = split_intervals(18, 3);
  const SelectorKind kinds[] = {SelectorKind::OnlineWeighted, SelectorKind::TrainingOnly, SelectorKind::NoTime};
  HarnessParams params;
  params.jobs = 4;
  const auto report = run_online(plan, kinds, d, params);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& c0 = report.cells[s * 2];
    const auto& c1 = report.cells[s * 2 + 1];
    CHECK(report.aggregates.at(c0.selector) == doctest::Approx((*c0.score + *c1.score) / 2).epsilon(1e-15));
  }
  // Training-only never updates after the training interval.
  for (const auto& step : report.cells[2].steps) CHECK(step.tested.empty());
  params.jobs = 1;
  CHECK(report_to_json(run_online(plan, kinds, d, params)) == report_to_json(report));
}

TEST_CASE("carried-over ledger continues across pairs") {
  Dataset d;
  d.id = "random";
  d.sequence = synth::random_sequence(10, 18, 0.15, 8);
  const auto plan = split_intervals(18, 3);
  const SelectorKind kinds[] = {SelectorKind::OnlineWeighted};
  HarnessParams params;
  params.carry_over = true;
  const auto carried = run_online(plan, kinds, d, params);
  CHECK(carried.cells[0].steps.front().step == 7);
  CHECK(carried.cells[1].steps.front().step == 13);
  params.carry_over = false;
  const auto fresh = run_online(plan, kinds, d, params);
  CHECK(fresh.cells[1].steps.front().step == 7);
  // The first pair is identical either way.
  CHECK(carried.cells[0].steps == fresh.cells[0].steps);
}

TEST_CASE("report serialization") {
  const auto data = alternating_cliques();
  const SelectorKind kinds[] = {SelectorKind::HandPicked, SelectorKind::Entropy};
  auto report = run_offline(split_intervals(20, 3), kinds, Task::ChangePoint, data, {});
  report.config_hash = "abc";
  const auto j = report_to_json(report);
  CHECK(j.at("format") == "tscale-report");
  CHECK(report_to_json(report_from_json(j)) == j);
  const auto csv = report_to_csv(report);
  CHECK(csv.rfind("selector,pair,train_first,train_last,test_first,test_last,score,windows\n", 0) == 0);
  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"format", "x"}}), ValidationError);
}

TEST_CASE("score curves and the cross-task matrix") {
  const auto plan = split_intervals(6, 2);
  const auto flat = curves_of(Task::LinkPrediction, plan, {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  const auto peaked = curves_of(Task::ChangePoint, plan, {{0.1, 0.9, 0.2}, {0.3, 0.2, 0.8}});
  CHECK(curve_argmax(flat.scores[0]) == 1);
  CHECK(curve_argmax(peaked.scores[1]) == 3);
  const std::vector<std::optional<double>> holes{std::nullopt, 0.2, std::nullopt};
  CHECK(curve_argmax(holes) == 2);
  const std::vector<ScoreCurves> both{flat, peaked};
  const auto m = cross_task_matrix(both);
  CHECK(m[0][0] == 0.5);
  CHECK(m[0][1] == doctest::Approx((0.1 + 0.3) / 2));
  CHECK(m[1][1] == doctest::Approx((0.9 + 0.8) / 2));
  CHECK(m[1][0] == 0.5);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(m[i][i] >= m[j][i]);
  }
  const std::vector<ScoreCurves> two_flat{flat, flat};
  const auto equal_rows = cross_task_matrix(two_flat);
  CHECK(equal_rows[0] == equal_rows[1]);
  const std::vector<ScoreCurves> mismatched{flat, curves_of(Task::Attribute, split_intervals(6, 3), {{0.1, 0.2}, {0.1, 0.2}, {0.1, 0.2}})};
  CHECK_THROWS(cross_task_matrix(mismatched));
}

TEST_CASE("curves computed from data round-trip") {
  const auto data = alternating_cliques();
  const auto plan = split_intervals(20, 2);
  HarnessParams params;
  params.jobs = 2;
  const auto curves = score_curves(plan, Task::ChangePoint, data, params);
  REQUIRE(curves.scores.size() == 2);
  CHECK(curves.scores[0].size() == 10);
  CHECK(curves.scores[0][0] == interval_score(Task::ChangePoint, data, plan.intervals[0], 1, params));
  const auto j = curves_to_json(curves);
  CHECK(curves_to_json(curves_from_json(j)) == j);
  auto broken = j;
  broken["scores"][0].erase(0);
  CHECK_THROWS_AS(curves_from_json(broken), ValidationError);
  CHECK(curves_to_csv(curves).rfind("interval,w,score\n1,1,", 0) == 0);
  CHECK_THROWS_AS(score_curves(plan, Task::Attribute, data, params), ValidationError);
}

TEST_CASE("Spearman correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, x).rho == 1.0);
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(spearman(x, rev).rho == -1.0);
  const std::vector<double> swapped{2, 1, 3, 4, 5};
  const auto r = spearman(x, swapped);
  CHECK(r.rho == doctest::Approx(0.9));
  CHECK(r.p == doctest::Approx(0.0373860735).epsilon(1e-6));
  const std::vector<double> flat{1, 1, 1, 1, 1};
  CHECK_THROWS_AS(spearman(x, flat), UndefinedMetric);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{2, 1}), std::invalid_argument);

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(20), b(20);
    for (auto& v : a) v = std::uniform_int_distribution<int>(0, 9)(rng);
    for (auto& v : b) v = std::uniform_int_distribution<int>(0, 9)(rng);
    CHECK(midranks(a) == oracle::midranks(a));
    CHECK(std::abs(spearman(a, b).rho - oracle::pearson(oracle::midranks(a), oracle::midranks(b))) < 1e-12);
  }
}

TEST_CASE("stability difference") {
  const auto plan = split_intervals(9, 3);
  const auto same = curves_of(Task::Attribute, plan, {{0.2, 0.4, 0.6}, {0.2, 0.4, 0.6}, {0.2, 0.4, 0.6}});
  CHECK(stability_diff(same) == 0.0);
  const auto shifted = curves_of(Task::Attribute, plan, {{0.2, 0.4, 0.6}, {0.3, 0.5, 0.7}, {0.2, 0.4, 0.6}});
  CHECK(stability_diff(shifted) == doctest::Approx(0.1));

  std::mt19937_64 rng(2);
  std::vector<std::vector<std::optional<double>>> rows(3, std::vector<std::optional<double>>(3));
  for (auto& row : rows) {
    for (auto& v : row) {
      if (std::bernoulli_distribution(0.8)(rng)) v = std::uniform_real_distribution<double>(0, 1)(rng);
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < 3; ++i) {
    for (std::size_t w = 0; w < 3; ++w) {
      if (rows[i][w] && rows[i + 1][w]) {
        sum += std::abs(*rows[i + 1][w] - *rows[i][w]);
        ++count;
      }
    }
  }
  const auto random = curves_of(Task::Attribute, plan, rows);
  if (count > 0) {
    CHECK(stability_diff(random) == doctest::Approx(sum / count).epsilon(1e-15));
  } else {
    CHECK_THROWS_AS(stability_diff(random), UndefinedMetric);
  }
}

TEST_CASE("hyperparameter sweep") {
  Dataset d;
  d.id = "random";
  d.sequence = synth::random_sequence(10, 12, 0.15, 4);
  const auto plan = split_intervals(12, 2);
  HarnessParams params;
  params.selector.min_tests = 2;
  params.selector.top_tested = 3;
  const std::size_t ms[] = {2};
  const auto grid = hyperparam_sweep(ms, {}, 3, SelectorKind::OnlineWeighted, d, plan, params);
  REQUIRE(grid.size() == 1);
  const SelectorKind kinds[] = {SelectorKind::OnlineWeighted};
  CHECK(grid[0].aggregate == run_online(plan, kinds, d, params).aggregates.at("online-weighted"));
  const std::size_t bs[] = {2};
  const auto twin = hyperparam_sweep(ms, bs, 2, SelectorKind::OnlineWeighted, d, plan, params);
  REQUIRE(twin.size() == 2);
  CHECK(twin[0].min_tests == twin[1].min_tests);
  CHECK(twin[0].top_tested == twin[1].top_tested);
  CHECK(twin[0].aggregate == twin[1].aggregate);
}
