#include <random>
#include <sstream>

#include "doctest.h"
#include "ripe/consensus.hpp"
#include "ripe/error.hpp"

using namespace ripe;

namespace {

DagEstimate make(std::size_t p, double score, std::vector<WeightedEdge> edges) {
  DagEstimate e;
  e.p = p;
  e.score = score;
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return std::pair(a.target, a.source) < std::pair(b.target, b.source); });
  e.edges = std::move(edges);
  e.ordering.sequence.resize(p);
  for (Node i = 0; i < p; ++i) e.ordering.sequence[i] = i;
  return e;
}

std::vector<DagEstimate> scored(std::vector<double> scores) {
  std::vector<DagEstimate> out;
  for (double s : scores) out.push_back(make(2, s, {}));
  return out;
}

}  // namespace

TEST_CASE("selecting the lowest-scoring orderings") {
  const auto ten = scored({5, 3, 1, 9, 2, 8, 4, 10, 6, 7});
  CHECK(select_top_orderings(ten, 0.1) == std::vector<std::size_t>{2});
  CHECK(select_top_orderings(ten, 0.2) == std::vector<std::size_t>{2, 4});
  CHECK(select_top_orderings(ten, 0.25) == std::vector<std::size_t>{1, 2, 4});
  CHECK(select_top_orderings(ten, 1.0).size() == 10);
  const auto same = scored({2, 2, 2, 2});
  CHECK(select_top_orderings(same, 0.1).size() == 4);
  const auto ties = scored({1, 3, 3, 5});
  CHECK(select_top_orderings(ties, 0.5) == std::vector<std::size_t>{0, 1, 2});
  CHECK(select_top_orderings(scored({4}), 0.01) == std::vector<std::size_t>{0});
  try {
    select_top_orderings(std::vector<DagEstimate>{}, 0.1);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
  CHECK_THROWS_AS(select_top_orderings(ten, 0.0), Error);
  CHECK_THROWS_AS(select_top_orderings(ten, 1.5), Error);
}

TEST_CASE("consensus arithmetic") {
  std::vector<DagEstimate> q{make(3, 0, {{0, 1, 0.5}}), make(3, 0, {{0, 1, 0.3}, {1, 2, 1.0}}),
                             make(3, 0, {{0, 1, -0.4}, {1, 2, -1.0}}), make(3, 0, {})};
  const auto c = build_consensus(q);
  CHECK(c.members == 4);
  CHECK(c.confidence(0, 1) == 0.75);
  CHECK(c.sign(0, 1) == 1.0);
  CHECK(c.magnitude(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.counts(0, 1) == 3);
  CHECK(c.confidence(1, 2) == 0.5);
  CHECK(c.sign(1, 2) == 0.0);
  CHECK(c.confidence(2, 0) == 0.0);
  CHECK(c.sign(2, 0) == 0.0);
  CHECK(c.magnitude(2, 0) == 0.0);

  const std::vector<std::size_t> subset{0, 2};
  const auto s = build_consensus(q, subset);
  CHECK(s.members == 2);
  CHECK(s.confidence(0, 1) == 1.0);
  CHECK(s.sign(0, 1) == 0.0);

  std::vector<DagEstimate> mixed{make(3, 0, {}), make(4, 0, {})};
  try {
    build_consensus(mixed);
    FAIL("expected GeneSetMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GeneSetMismatch);
  }
}

TEST_CASE("consensus equals a brute-force recomputation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 2 + rng() % 8, m = 1 + rng() % 12;
    std::vector<DagEstimate> ests;
    std::vector<Eigen::MatrixXd> dense;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<WeightedEdge> edges;
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
      for (Node a = 0; a < p; ++a) {
        for (Node b = 0; b < p; ++b) {
          if (a == b || rng() % 3) continue;
          const double x = u(rng);
          edges.push_back({a, b, x});
          w(a, b) = x;
        }
      }
      ests.push_back(make(p, u(rng), edges));
      dense.push_back(w);
    }
    const auto c = build_consensus(ests);
    for (Node a = 0; a < p; ++a) {
      for (Node b = 0; b < p; ++b) {
        double count = 0, signs = 0, mag = 0;
        for (const auto& w : dense) {
          count += w(a, b) != 0.0;
          signs += (w(a, b) > 0) - (w(a, b) < 0);
          mag += std::fabs(w(a, b));
        }
        REQUIRE(c.confidence(a, b) == count / m);
        REQUIRE(c.sign(a, b) == static_cast<double>((signs > 0) - (signs < 0)));
        REQUIRE(c.magnitude(a, b) == doctest::Approx(mag / m).epsilon(1e-14));
      }
    }
    double prev = 2.0;
    std::vector<Edge> prev_edges;
    for (double tau : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      const auto e = threshold_edges(c, tau);
      for (const auto& [a, b] : e) REQUIRE(c.confidence(a, b) >= tau - 1e-12);
      if (prev <= 1.0) {
        for (const auto& edge : e) REQUIRE(std::find(prev_edges.begin(), prev_edges.end(), edge) != prev_edges.end());
      }
      prev = tau;
      prev_edges = e;
    }
  }
}

TEST_CASE("thresholding") {
  std::vector<DagEstimate> q;
  for (int k = 0; k < 20; ++k) {
    std::vector<WeightedEdge> edges;
    if (k < 15) edges.push_back({0, 1, 1.0});
    if (k < 5) edges.push_back({1, 2, 1.0});
    if (k < 2) edges.push_back({2, 0, 1.0});
    q.push_back(make(3, 0, edges));
  }
  const auto c = build_consensus(q);
  CHECK(threshold_edges(c, 0.25) == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(threshold_edges(c, 1.0).empty());
  std::vector<DagEstimate> all(3, make(3, 0, {{0, 2, 0.1}}));
  CHECK(threshold_edges(build_consensus(all), 1.0) == std::vector<Edge>{{0, 2}});
  CHECK_THROWS_AS(threshold_edges(c, 0.0), Error);
  CHECK_THROWS_AS(threshold_edges(c, 1.1), Error);
}

TEST_CASE("consensus may contain cycles") {
  std::vector<DagEstimate> q{make(2, 0, {{0, 1, 0.7}}), make(2, 0, {{1, 0, 0.7}})};
  CHECK(threshold_edges(build_consensus(q), 0.25) == std::vector<Edge>{{0, 1}, {1, 0}});
}

TEST_CASE("consensus output") {
  std::vector<DagEstimate> q{make(2, 0, {{0, 1, -0.5}})};
  std::ostringstream out;
  write_consensus(out, build_consensus(q), {"a", "b"});
  CHECK(out.str().rfind("source\ttarget\tconfidence\tsign\tmagnitude\na\tb\t1\t-1\t0.5", 0) == 0);
}
