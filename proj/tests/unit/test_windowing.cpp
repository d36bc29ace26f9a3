#include <doctest.h>

#include "support/synthetic.hpp"
#include "tscale/errors.hpp"
#include "tscale/windowing.hpp"

using namespace tscale;

TEST_CASE("uniform windowing") {
  CHECK(Windowing::uniform(4, 2).spans() == std::vector<Span>{{1, 2}, {3, 4}});
  CHECK(Windowing::uniform(4, 3).spans() == std::vector<Span>{{1, 3}, {4, 4}});
  const auto id = Windowing::uniform(5, 1);
  CHECK(id.segment_count() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(id.segment(i) == Span{i + 1, i + 1});
  CHECK(Windowing::uniform(7, 7) == Windowing::whole(7));
  CHECK_THROWS_AS(Windowing::uniform(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(Windowing::uniform(4, 5), std::invalid_argument);
}

TEST_CASE("explicit windowings validate their cuts") {
  CHECK_NOTHROW(Windowing(5, {1, 4}));
  CHECK_THROWS(Windowing(5, {0}));
  CHECK_THROWS(Windowing(5, {5}));
  CHECK_THROWS(Windowing(5, {3, 2}));
  CHECK_THROWS(Windowing(5, {2, 2}));
  CHECK_THROWS(Windowing(0, {}));
  const std::vector<std::size_t> zero{2, 0, 1};
  CHECK_THROWS(Windowing::from_lengths(zero));
}

TEST_CASE("segment_of and lengths") {
  const Windowing w(9, {2, 6});
  CHECK(w.lengths() == std::vector<std::size_t>{2, 4, 3});
  CHECK(w.segment_of(1) == 0);
  CHECK(w.segment_of(2) == 0);
  CHECK(w.segment_of(3) == 1);
  CHECK(w.segment_of(9) == 2);
  CHECK_THROWS_AS(w.segment_of(10), std::out_of_range);
  CHECK_THROWS_AS(w.segment(3), std::out_of_range);
}

TEST_CASE("apply_windowing unions each window") {
  const std::vector<StaticGraph> gs{StaticGraph(3, {{0, 1}}), StaticGraph(3, {{1, 2}})};
  const auto ws = apply_windowing(gs, Windowing::uniform(2, 2));
  REQUIRE(ws.size() == 1);
  CHECK(ws.graphs[0] == StaticGraph(3, {{0, 1}, {1, 2}}));

  const auto seq = synth::random_sequence(7, 9, 0.2, 3);
  const auto identity = apply_windowing(seq, Windowing::uniform(9, 1));
  for (std::size_t i = 0; i < 9; ++i) CHECK(identity.graphs[i] == seq.at(i + 1));
  const auto all = apply_windowing(seq, Windowing::whole(9));
  CHECK(all.graphs.front() == StaticGraph::union_of(seq.graphs()));
  CHECK_THROWS_AS(apply_windowing(seq, Windowing::uniform(8, 1)), std::out_of_range);
}

TEST_CASE("compose groups windows of windows") {
  const Windowing inner(6, {2, 3, 5});  // [1,2] [3] [4,5] [6]
  const Windowing outer(4, {1});        // {w1} {w2,w3,w4}
  const auto c = compose(inner, outer);
  CHECK(c == Windowing(6, {2}));
  CHECK_THROWS_AS(compose(inner, Windowing(3, {})), std::invalid_argument);
}

TEST_CASE("windowed sequence can be windowed again") {
  const auto seq = synth::random_sequence(6, 8, 0.25, 11);
  const auto inner = Windowing::uniform(8, 2);
  const auto outer = Windowing::uniform(4, 2);
  const auto twice = apply_windowing(apply_windowing(seq, inner).as_sequence(), outer);
  const auto once = apply_windowing(seq, compose(inner, outer));
  CHECK(twice.graphs == once.graphs);
  CHECK(compose(inner, outer) == Windowing::uniform(8, 4));
}

TEST_CASE("json round trip and span table") {
  for (const auto& w : synth::all_windowings(6)) CHECK(windowing_from_json(windowing_to_json(w), 6) == w);
  CHECK(windowing_to_json(Windowing(5, {1, 4})) == "[1,4]");
  CHECK_THROWS_AS(windowing_from_json("[1,", 5), ParseError);
  CHECK_THROWS(windowing_from_json("[7]", 5));
  const auto table = span_table(Windowing(5, {2}));
  CHECK(table.find("     1      1      2      2") != std::string::npos);
  CHECK(table.find("     2      3      5      3") != std::string::npos);
}

TEST_CASE("enumeration produces every windowing once") {
  for (std::size_t T = 1; T <= 6; ++T) {
    const auto all = synth::all_windowings(T);
    CHECK(all.size() == (std::size_t{1} << (T - 1)));
    for (std::size_t i = 1; i < all.size(); ++i) CHECK_FALSE(all[i] == all[i - 1]);
  }
}
