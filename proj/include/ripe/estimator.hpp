#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ripe/expression.hpp"
#include "ripe/graph.hpp"
#include "ripe/influence.hpp"
#include "ripe/orderings.hpp"

namespace ripe {

enum class ScoreKind {
  Objective,  // sum of attained per-node lasso objectives
  Profile,    // sum of (n/2) log(RSS_i / n) plus the l1 penalties
};

struct LassoConfig {
  double alpha = 0.1;
  double shrink = 0.6;
  double tol = 1e-9;  // max absolute coefficient change per sweep
  std::size_t max_iter = 10000;
  bool center = true;
  bool standardize = false;
  ScoreKind score = ScoreKind::Objective;
};

void validate(const LassoConfig& cfg);
std::uint64_t config_hash(const LassoConfig& cfg);

// shrink * 2 n^{-1/2} * Phi^{-1}(1 - alpha / (2 p (i - 1))). Throws
// InvalidPosition when i < 2.
double lambda_schedule(std::size_t n, std::size_t p, std::size_t i, const LassoConfig& cfg);

struct LassoResult {
  Eigen::VectorXd coefficients;
  std::size_t iterations = 0;
  bool converged = true;
  double objective = 0.0;  // n^-1 ||y - X theta||^2 + lambda ||theta||_1
  double rss = 0.0;        // ||y - X theta||^2
};

// Minimizes n^-1 ||y - X theta||^2 + lambda ||theta||_1 by cyclic coordinate
// descent. With cfg.center, y and the columns of X are centered first; with
// cfg.standardize, y and the columns are also scaled to unit variance and the
// returned coefficients are mapped back to the original scale. objective and
// rss are on the working (centered, scaled) data.
LassoResult lasso_solve(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double lambda,
                        const LassoConfig& cfg = {});

// Coordinate descent on a Gram matrix S = X^T X / n. Solves the regression of
// column `target` on columns `predictors`; theta is written in predictor order.
struct GramFit {
  std::vector<double> theta;
  double rss_over_n = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};
GramFit lasso_gram(const Eigen::MatrixXd& gram, Node target, std::span<const Node> predictors, double lambda,
                   const LassoConfig& cfg);

// Influence parents of i that precede it in the ordering, ascending.
std::vector<Node> restrict_predictors(Node i, std::span<const Node> ordering, const InfluenceMatrix& influence);

struct WeightedEdge {
  Node source = 0;
  Node target = 0;
  double weight = 0.0;
};

struct DagEstimate {
  CausalOrdering ordering;
  std::size_t p = 0;
  std::vector<WeightedEdge> edges;  // sorted by (target, source)
  double score = 0.0;
  std::vector<double> node_objective;
  std::vector<double> node_rss;
  std::size_t iterations = 0;
  bool converged = true;

  Eigen::MatrixXd dense() const;  // entry (j, i) for edge j -> i
};

// Centered (optionally standardized) steady-state data reduced to its Gram
// matrix; shared read-only across orderings.
struct PreparedData {
  Eigen::MatrixXd gram;
  Eigen::VectorXd scale;  // per-column standard deviation when standardized, else 1
  std::size_t n = 0;
  std::vector<std::string> labels;
};

PreparedData prepare_data(const ExpressionDataset& steady, const LassoConfig& cfg);

class DagEstimator {
 public:
  DagEstimator(const ExpressionDataset& steady, const InfluenceMatrix& influence, LassoConfig cfg);
  DagEstimator(PreparedData data, const InfluenceMatrix& influence, LassoConfig cfg);

  std::size_t p() const { return data_.labels.size(); }
  const PreparedData& data() const { return data_; }
  const LassoConfig& config() const { return cfg_; }

  // Throws LengthMismatch unless the ordering is a permutation of all genes.
  DagEstimate estimate(const CausalOrdering& ordering) const;
  std::vector<DagEstimate> estimate_all(std::span<const CausalOrdering> orderings, std::size_t workers = 1) const;

  // Orderings permute the perturbed genes only; every other gene is appended
  // in label order and regressed once on its perturbed influence parents.
  std::vector<DagEstimate> estimate_two_layer(std::span<const CausalOrdering> tf_orderings,
                                              std::size_t workers = 1) const;

 private:
  struct NodeResult {
    std::vector<WeightedEdge> edges;
    double objective = 0.0;
    double rss = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
  };
  NodeResult fit_node(Node i, std::size_t position, const std::vector<Node>& predictors) const;
  DagEstimate assemble(CausalOrdering ordering, std::vector<NodeResult>& nodes) const;

  PreparedData data_;
  LassoConfig cfg_;
  std::vector<std::vector<Node>> parents_;
  std::vector<Node> perturbed_;
};

DagEstimate estimate_dag_for_ordering(const ExpressionDataset& steady, const CausalOrdering& ordering,
                                      const InfluenceMatrix& influence, const LassoConfig& cfg = {});

// "source<TAB>target<TAB>weight" rows.
void write_estimate(std::ostream& out, const DagEstimate& estimate, const std::vector<std::string>& labels);

}  // namespace ripe
