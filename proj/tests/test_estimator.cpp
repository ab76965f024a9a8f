#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ripe/error.hpp"
#include "ripe/estimator.hpp"
#include "ripe/sem.hpp"
#include "support.hpp"

using namespace ripe;

namespace {

CausalOrdering ordering_of(std::vector<Node> seq) {
  CausalOrdering o;
  o.sequence = std::move(seq);
  return o;
}

// g1..g5 as nodes 0..4, influence parents from the worked example.
InfluenceMatrix worked_influence() {
  auto m = InfluenceMatrix::full(gene_labels(5));
  m.set(1, 0, true);  // 2 -> 1
  m.set(0, 2, true);  // 1 -> 3
  m.set(1, 2, true);  // 2 -> 3
  m.set(0, 3, true);
  m.set(1, 3, true);
  m.set(1, 4, true);
  m.set(2, 4, true);
  m.set(3, 4, true);
  return m;
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& x) { return x.rowwise() - x.colwise().mean(); }

WeightedNetwork chain2(double w) {
  WeightedNetwork net;
  net.labels = gene_labels(2);
  net.weights = Eigen::MatrixXd::Zero(2, 2);
  net.weights(0, 1) = w;
  return net;
}

}  // namespace

TEST_CASE("restricted predictor sets of the worked example") {
  const auto inf = worked_influence();
  const std::vector<Node> order{1, 0, 2, 3, 4};
  CHECK(restrict_predictors(1, order, inf).empty());
  CHECK(restrict_predictors(0, order, inf) == std::vector<Node>{1});
  CHECK(restrict_predictors(2, order, inf) == std::vector<Node>{0, 1});
  CHECK(restrict_predictors(3, order, inf) == std::vector<Node>{0, 1});
  CHECK(restrict_predictors(4, order, inf) == std::vector<Node>{1, 2, 3});

  auto later = worked_influence();
  later.set(2, 0, true);  // 3 -> 1, but 3 comes after 1
  CHECK(restrict_predictors(0, order, later) == std::vector<Node>{1});
  try {
    restrict_predictors(4, std::vector<Node>{1, 0}, inf);
    FAIL("expected NodeNotInOrdering");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NodeNotInOrdering);
  }
}

TEST_CASE("an empty influence matrix gives the centered variance score") {
  auto net = assign_weights(random_dag(6, 8, 1, 1), WeightSpec::constant(0.8), 2);
  const auto data = sample_sem(net, 50, 1.0, 3);
  const auto est = estimate_dag_for_ordering(data, ordering_of({5, 4, 3, 2, 1, 0}), InfluenceMatrix::full(net.labels));
  CHECK(est.edges.empty());
  const Eigen::MatrixXd c = centered(data.values);
  double want = 0.0;
  for (Eigen::Index j = 0; j < 6; ++j) want += c.col(j).squaredNorm() / 50.0;
  CHECK(est.score == doctest::Approx(want).epsilon(1e-12));
  CHECK(est.dense().isZero());
}

TEST_CASE("score equals the sum of independently recomputed node objectives") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t p = 5 + t % 10;
    auto net = assign_weights(random_dag(p, 2 * p, 2, rng()), WeightSpec::uniform(0.2, 0.8), rng());
    const auto data = sample_sem(net, 40 + t * 5, 1.0, rng());
    const auto inf = true_influence(net);
    auto seq = identity_priority(p);
    std::shuffle(seq.begin(), seq.end(), rng);
    LassoConfig cfg;
    cfg.standardize = t % 2 == 1;
    const auto est = estimate_dag_for_ordering(data, ordering_of(seq), inf, cfg);

    Eigen::MatrixXd x = centered(data.values);
    if (cfg.standardize) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) /= std::sqrt(x.col(j).squaredNorm() / x.rows());
    }
    const Eigen::MatrixXd w = est.dense();
    const double n = static_cast<double>(data.samples());
    double total = 0.0;
    for (std::size_t pos = 0; pos < p; ++pos) {
      const Node i = seq[pos];
      const auto preds = restrict_predictors(i, seq, inf);
      Eigen::VectorXd r = x.col(i);
      double l1 = 0.0;
      for (Node j : preds) {
        // back to the working scale
        double theta = w(j, i);
        if (cfg.standardize) {
          const Eigen::MatrixXd raw = centered(data.values);
          theta *= std::sqrt(raw.col(j).squaredNorm() / n) / std::sqrt(raw.col(i).squaredNorm() / n);
        }
        r -= theta * x.col(j);
        l1 += std::fabs(theta);
      }
      double obj = r.squaredNorm() / n;
      if (pos >= 1 && !preds.empty()) obj += lambda_schedule(data.samples(), p, pos + 1, cfg) * l1;
      CHECK(est.node_objective[i] == doctest::Approx(obj).epsilon(1e-10));
      total += obj;
    }
    CHECK(est.score == doctest::Approx(total).epsilon(1e-10));
  }
}

TEST_CASE("profile score") {
  auto net = assign_weights(random_dag(8, 10, 1, 5), WeightSpec::constant(0.8), 6);
  const auto data = sample_sem(net, 60, 1.0, 7);
  LassoConfig cfg;
  cfg.score = ScoreKind::Profile;
  const auto est = estimate_dag_for_ordering(data, ordering_of(identity_priority(8)), true_influence(net), cfg);
  double want = 0.0;
  for (Node i = 0; i < 8; ++i) {
    want += 30.0 * std::log(est.node_rss[i] / 60.0);
    double l1 = 0.0;
    for (const auto& e : est.edges) l1 += e.target == i ? std::fabs(e.weight) : 0.0;
    if (l1 > 0.0) want += lambda_schedule(60, 8, i + 1, cfg) * l1;
  }
  CHECK(est.score == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("every fitted edge respects ordering and influence") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const std::size_t p = 10 + t % 15;
    auto net = assign_weights(random_cyclic(p, 2 * p, rng()), WeightSpec::uniform(0.2, 0.8), rng());
    const auto data = sample_sem(net, 80, 1.0, rng());
    NoiseSpec noise;
    noise.fp_rate = 0.05;
    noise.seed = rng();
    const auto inf = perturb_influence(true_influence(net), noise);
    std::vector<CausalOrdering> orders;
    for (int k = 0; k < 5; ++k) {
      auto s = identity_priority(p);
      std::shuffle(s.begin(), s.end(), rng);
      orders.push_back(ordering_of(s));
    }
    const DagEstimator estimator(data, inf, LassoConfig{});
    for (const auto& est : estimator.estimate_all(orders)) {
      const auto pos = testing::positions(est.ordering.sequence);
      for (const auto& e : est.edges) {
        REQUIRE(e.weight != 0.0);
        REQUIRE(inf.influences(e.source, e.target));
        REQUIRE(pos[e.source] < pos[e.target]);
      }
      REQUIRE(std::is_sorted(est.edges.begin(), est.edges.end(), [](const auto& a, const auto& b) {
        return std::pair(a.target, a.source) < std::pair(b.target, b.source);
      }));
    }
  }
}

TEST_CASE("a two-gene chain is recovered") {
  std::size_t ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto net = chain2(0.8);
    const auto data = sample_sem(net, 1000, 1.0, seed);
    const auto est = estimate_dag_for_ordering(data, ordering_of({0, 1}), true_influence(net));
    if (est.edges.size() == 1 && est.edges[0].source == 0 && std::fabs(est.edges[0].weight - 0.8) <= 0.1) ++ok;
  }
  CHECK(ok >= 19);
}

TEST_CASE("estimates do not depend on worker count") {
  auto net = assign_weights(random_dag(30, 50, 3, 9), WeightSpec::uniform(0.2, 0.8), 10);
  const auto data = sample_sem(net, 60, 1.0, 11);
  const DagEstimator estimator(data, true_influence(net), LassoConfig{});
  std::mt19937_64 rng(12);
  std::vector<CausalOrdering> orders;
  for (int k = 0; k < 12; ++k) {
    auto s = identity_priority(30);
    std::shuffle(s.begin(), s.end(), rng);
    orders.push_back(ordering_of(s));
  }
  const auto a = estimator.estimate_all(orders, 1), b = estimator.estimate_all(orders, 4);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    CHECK(a[k].score == b[k].score);
    CHECK(a[k].dense() == b[k].dense());
  }
}

TEST_CASE("estimator input errors") {
  auto net = assign_weights(random_dag(4, 3, 1, 1), WeightSpec::constant(0.8), 1);
  const auto data = sample_sem(net, 20, 1.0, 1);
  const DagEstimator estimator(data, true_influence(net), LassoConfig{});
  try {
    estimator.estimate(ordering_of({0, 1, 2}));
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
  CHECK_THROWS_AS(estimator.estimate(ordering_of({0, 1, 2, 2})), Error);
  try {
    DagEstimator(data, InfluenceMatrix::full({"a", "b", "c", "d"}), LassoConfig{});
    FAIL("expected GeneSetMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GeneSetMismatch);
  }
}

TEST_CASE("two-layer estimation with every gene perturbed matches the plain estimate") {
  auto net = assign_weights(random_dag(12, 20, 2, 13), WeightSpec::uniform(0.2, 0.8), 14);
  const auto data = sample_sem(net, 50, 1.0, 15);
  const DagEstimator estimator(data, true_influence(net), LassoConfig{});
  std::vector<CausalOrdering> orders{ordering_of(topological_sort(net.skeleton()))};
  const auto plain = estimator.estimate_all(orders);
  const auto two = estimator.estimate_two_layer(orders);
  CHECK(two[0].score == doctest::Approx(plain[0].score).epsilon(1e-14));
  CHECK(two[0].dense() == plain[0].dense());
}

TEST_CASE("two-layer estimation with one perturbed gene") {
  WeightedNetwork net;
  net.labels = gene_labels(3);
  net.weights = Eigen::MatrixXd::Zero(3, 3);
  net.weights(0, 1) = 0.8;
  net.weights(0, 2) = -0.6;
  const auto data = sample_sem(net, 200, 1.0, 16);
  InfluenceMatrix inf(net.labels, {0});
  inf.set(0, 1, true);
  inf.set(0, 2, true);
  const DagEstimator estimator(data, inf, LassoConfig{});
  const auto est = estimator.estimate_two_layer(std::vector<CausalOrdering>{ordering_of({0})});
  REQUIRE(est.size() == 1);
  CHECK(est[0].ordering.sequence == std::vector<Node>{0, 1, 2});
  const Eigen::MatrixXd w = est[0].dense();
  for (Node i : {1, 2}) {
    const double lambda = lambda_schedule(200, 3, i + 1, LassoConfig{});
    const auto uni = lasso_solve(data.values.col(i), data.values.col(0), lambda);
    CHECK(w(0, i) == doctest::Approx(uni.coefficients(0)).epsilon(1e-9));
  }
  CHECK(w(1, 2) == 0.0);
  CHECK_THROWS_AS(estimator.estimate_two_layer(std::vector<CausalOrdering>{ordering_of({1})}), Error);
}

TEST_CASE("estimate file output") {
  const auto net = chain2(0.8);
  const auto data = sample_sem(net, 500, 1.0, 17);
  const auto est = estimate_dag_for_ordering(data, ordering_of({0, 1}), true_influence(net));
  std::ostringstream out;
  write_estimate(out, est, net.labels);
  CHECK(out.str().rfind("source\ttarget\tweight\nG1\tG2\t", 0) == 0);
}
