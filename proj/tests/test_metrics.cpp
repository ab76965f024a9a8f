#include <set>
#include <sstream>

#include "doctest.h"
#include "ripe/error.hpp"
#include "ripe/metrics.hpp"

using namespace ripe;

TEST_CASE("precision recall f1") {
  const std::vector<Edge> truth{{0, 1}, {1, 2}};
  auto r = precision_recall_f1(std::vector<Edge>{{0, 1}, {0, 2}}, truth);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 0.5);
  CHECK(r.f1 == 0.5);
  r = precision_recall_f1(truth, truth);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  r = precision_recall_f1(std::vector<Edge>{}, truth);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  // reversed edge is both a false positive and a false negative
  r = precision_recall_f1(std::vector<Edge>{{1, 0}}, std::vector<Edge>{{0, 1}});
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  r = precision_recall_f1(std::vector<Edge>{{0, 1}, {0, 1}}, truth);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
}

TEST_CASE("graph comparison requires matching labels") {
  DirectedGraph a(std::vector<std::string>{"x", "y"}), b(std::vector<std::string>{"x", "z"});
  a.add_edge(0, 1);
  CHECK(precision_recall_f1(a, a).f1 == 1.0);
  try {
    precision_recall_f1(a, b);
    FAIL("expected LabelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LabelMismatch);
  }
}

TEST_CASE("significance of an exact estimate") {
  std::vector<Edge> gold;
  for (Node i = 0; i + 1 < 50; ++i) gold.emplace_back(i, i + 1);
  const auto s = er_significance(gold, gold, {50, {}}, 10000, 1);
  CHECK(s.observed_tp == 49);
  CHECK(s.trials == 10000);
  CHECK(s.p_value <= 0.01);
  CHECK(s.p_value == doctest::Approx(1.0 / 10001.0));
  std::size_t total = 0;
  for (auto h : s.histogram) total += h;
  CHECK(total == 10000);

  const auto none = er_significance(gold, std::vector<Edge>{}, {50, {}}, 500, 2);
  CHECK(none.observed_tp == 0);
  CHECK(none.p_value == 1.0);

  const auto again = er_significance(gold, gold, {50, {}}, 10000, 1, 3);
  CHECK(again.histogram == s.histogram);
  CHECK(again.p_value == s.p_value);
}

TEST_CASE("significance errors") {
  const std::vector<Edge> three{{0, 1}, {1, 2}, {2, 0}};
  CHECK_THROWS_AS(er_significance(three, three, {3, {}}, 0, 1), Error);
  std::vector<Edge> many;
  for (Node a = 0; a < 3; ++a)
    for (Node b = 0; b < 3; ++b)
      if (a != b) many.emplace_back(a, b);
  many.emplace_back(0, 0);
  try {
    er_significance(many, three, {3, {}}, 10, 1);
    FAIL("expected EdgeBudgetTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EdgeBudgetTooLarge);
  }
  try {
    er_significance(three, three, {3, {0}}, 10, 1);
    FAIL("expected EdgeBudgetTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EdgeBudgetTooLarge);
  }
}

TEST_CASE("null graphs") {
  const NullModel full{30, {}};
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = sample_null_graph(40, full, s);
    REQUIRE(g.size() == 40);
    std::set<Edge> uniq(g.begin(), g.end());
    REQUIRE(uniq.size() == 40);
    for (const auto& [a, b] : g) {
      REQUIRE(a != b);
      REQUIRE(a < 30);
      REQUIRE(b < 30);
    }
  }
  const NullModel layered{30, {3, 7, 11}};
  for (std::uint64_t s = 0; s < 100; ++s) {
    for (const auto& [a, b] : sample_null_graph(60, layered, s)) {
      REQUIRE((a == 3 || a == 7 || a == 11));
      REQUIRE(a != b);
    }
  }
  CHECK(sample_null_graph(87, layered, 1).size() == 87);
}

TEST_CASE("null mean grows linearly with the estimate size") {
  // E[TP] = |estimate| * |gold| / (admissible cells)
  std::vector<Edge> gold;
  for (Node i = 0; i < 40; ++i) gold.emplace_back(i, (i + 1) % 40);
  for (Node i = 0; i < 40; i += 2) gold.emplace_back(i, (i + 7) % 40);
  const double cells = 40.0 * 39.0;
  for (std::size_t m : {50, 100, 200, 400}) {
    std::vector<Edge> est;
    for (std::size_t e = 0; est.size() < m; ++e) {
      const Node a = e % 40, b = (e / 40 + a + 1) % 40;
      if (a != b) est.emplace_back(a, b);
    }
    const auto s = er_significance(est, gold, {40, {}}, 10000, m);
    CHECK(s.null_mean() == doctest::Approx(m * gold.size() / cells).epsilon(0.05));
  }
  // two-layer: sources restricted to 10 genes
  std::vector<Node> tfs{0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  const auto s = er_significance(std::vector<Edge>(gold.begin(), gold.begin() + 30), gold, {40, tfs}, 10000, 9);
  double admissible_gold = 0;
  for (const auto& [a, b] : gold) admissible_gold += a % 2 == 0 && a < 20;
  CHECK(s.null_mean() == doctest::Approx(30 * admissible_gold / (10.0 * 39.0)).epsilon(0.05));
}

TEST_CASE("histogram output") {
  Significance s;
  s.trials = 3;
  s.histogram = {1, 2};
  std::ostringstream out;
  write_null_histogram(out, s);
  CHECK(out.str() == "true_positives\ttrials\n0\t1\n1\t2\n");
  CHECK(s.null_mean() == doctest::Approx(2.0 / 3.0));
}
