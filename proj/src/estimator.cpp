#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "ripe/error.hpp"
#include "ripe/estimator.hpp"
#include "ripe/parallel.hpp"

namespace ripe {

Eigen::MatrixXd DagEstimate::dense() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (const auto& e : edges) w(e.source, e.target) = e.weight;
  return w;
}

PreparedData prepare_data(const ExpressionDataset& steady, const LassoConfig& cfg) {
  validate(cfg);
  const auto n = steady.values.rows();
  const auto p = steady.values.cols();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "steady-state data has no samples");
  if (static_cast<std::size_t>(p) != steady.gene_labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "expression columns do not match gene labels");
  }
  Eigen::MatrixXd X = steady.values;
  if (cfg.center) X.rowwise() -= X.colwise().mean();
  PreparedData data;
  data.scale = Eigen::VectorXd::Ones(p);
  if (cfg.standardize) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double sd = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
      if (sd > 0.0) {
        data.scale(j) = sd;
        X.col(j) /= sd;
      }
    }
  }
  data.gram = Eigen::MatrixXd::Zero(p, p);
  data.gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / static_cast<double>(n));
  data.gram.triangularView<Eigen::StrictlyUpper>() = data.gram.transpose();
  data.n = static_cast<std::size_t>(n);
  data.labels = steady.gene_labels;
  return data;
}

std::vector<Node> restrict_predictors(Node i, std::span<const Node> ordering, const InfluenceMatrix& influence) {
  const auto at = std::find(ordering.begin(), ordering.end(), i);
  if (at == ordering.end()) {
    throw Error(ErrorCode::NodeNotInOrdering, "gene " + std::to_string(i) + " is not in the ordering");
  }
  std::vector<Node> out;
  for (auto it = ordering.begin(); it != at; ++it) {
    if (*it < influence.p() && *it != i && influence.influences(*it, i)) out.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DagEstimator::DagEstimator(const ExpressionDataset& steady, const InfluenceMatrix& influence, LassoConfig cfg)
    : DagEstimator(prepare_data(steady, cfg), influence, cfg) {}

DagEstimator::DagEstimator(PreparedData data, const InfluenceMatrix& influence, LassoConfig cfg)
    : data_(std::move(data)), cfg_(cfg) {
  validate(cfg_);
  if (influence.gene_labels != data_.labels) {
    throw Error(ErrorCode::GeneSetMismatch, "influence matrix and expression data use different genes");
  }
  parents_ = influence.parents();
  perturbed_ = influence.perturbed;
  std::sort(perturbed_.begin(), perturbed_.end());
}

DagEstimator::NodeResult DagEstimator::fit_node(Node i, std::size_t position,
                                                const std::vector<Node>& predictors) const {
  NodeResult r;
  const double n = static_cast<double>(data_.n);
  if (position < 2 || predictors.empty()) {
    r.objective = data_.gram(i, i);
    r.rss = n * data_.gram(i, i);
    return r;
  }
  const double lambda = lambda_schedule(data_.n, p(), position, cfg_);
  const GramFit fit = lasso_gram(data_.gram, i, predictors, lambda, cfg_);
  r.objective = fit.objective;
  r.rss = n * fit.rss_over_n;
  r.iterations = fit.iterations;
  r.converged = fit.converged;
  for (std::size_t a = 0; a < predictors.size(); ++a) {
    if (fit.theta[a] == 0.0) continue;
    const Node j = predictors[a];
    r.edges.push_back({j, i, fit.theta[a] * data_.scale(i) / data_.scale(j)});
  }
  return r;
}

DagEstimate DagEstimator::assemble(CausalOrdering ordering, std::vector<NodeResult>& nodes) const {
  DagEstimate est;
  est.ordering = std::move(ordering);
  est.p = p();
  est.node_objective.resize(p());
  est.node_rss.resize(p());
  const double n = static_cast<double>(data_.n);
  for (Node i = 0; i < p(); ++i) {
    auto& r = nodes[i];
    est.edges.insert(est.edges.end(), r.edges.begin(), r.edges.end());
    est.node_objective[i] = r.objective;
    est.node_rss[i] = r.rss;
    est.iterations += r.iterations;
    est.converged = est.converged && r.converged;
    if (cfg_.score == ScoreKind::Objective) {
      est.score += r.objective;
    } else {
      const double penalty = r.objective - r.rss / n;
      est.score += 0.5 * n * std::log(std::max(r.rss / n, 1e-300)) + penalty;
    }
  }
  return est;
}

namespace {

std::vector<std::size_t> positions_of(std::span<const Node> sequence, std::size_t p) {
  std::vector<std::size_t> pos(p, 0);
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const Node v = sequence[t];
    if (v >= p || pos[v] != 0) throw Error(ErrorCode::LengthMismatch, "ordering is not a permutation");
    pos[v] = t + 1;
  }
  return pos;
}

}  // namespace

DagEstimate DagEstimator::estimate(const CausalOrdering& ordering) const {
  if (ordering.sequence.size() != p()) {
    throw Error(ErrorCode::LengthMismatch, "ordering has " + std::to_string(ordering.sequence.size()) +
                                               " genes, expected " + std::to_string(p()));
  }
  const auto pos = positions_of(ordering.sequence, p());
  std::vector<NodeResult> nodes(p());
  std::vector<Node> predictors;
  for (Node i = 0; i < p(); ++i) {
    predictors.clear();
    for (Node j : parents_[i]) {
      if (pos[j] < pos[i]) predictors.push_back(j);
    }
    nodes[i] = fit_node(i, pos[i], predictors);
  }
  return assemble(ordering, nodes);
}

std::vector<DagEstimate> DagEstimator::estimate_all(std::span<const CausalOrdering> orderings,
                                                    std::size_t workers) const {
  std::vector<DagEstimate> out(orderings.size());
  parallel_for(orderings.size(), workers, [&](std::size_t t) { out[t] = estimate(orderings[t]); });
  return out;
}

std::vector<DagEstimate> DagEstimator::estimate_two_layer(std::span<const CausalOrdering> tf_orderings,
                                                          std::size_t workers) const {
  const std::size_t k = perturbed_.size();
  std::vector<char> is_tf(p(), 0);
  for (Node g : perturbed_) is_tf[g] = 1;
  std::vector<Node> rest;
  for (Node i = 0; i < p(); ++i) {
    if (!is_tf[i]) rest.push_back(i);
  }
  // Non-TF regressions do not depend on the TF ordering.
  std::vector<NodeResult> tail(rest.size());
  parallel_for(rest.size(), workers, [&](std::size_t t) {
    const Node i = rest[t];
    tail[t] = fit_node(i, k + t + 1, parents_[i]);
  });

  std::vector<DagEstimate> out(tf_orderings.size());
  parallel_for(tf_orderings.size(), workers, [&](std::size_t o) {
    const auto& seq = tf_orderings[o].sequence;
    if (seq.size() != k) throw Error(ErrorCode::LengthMismatch, "TF ordering must permute the perturbed genes");
    const auto pos = positions_of(seq, p());
    for (Node g : seq) {
      if (!is_tf[g]) throw Error(ErrorCode::LengthMismatch, "TF ordering contains an unperturbed gene");
    }
    std::vector<NodeResult> nodes(p());
    std::vector<Node> predictors;
    for (Node i : seq) {
      predictors.clear();
      for (Node j : parents_[i]) {
        if (pos[j] != 0 && pos[j] < pos[i]) predictors.push_back(j);
      }
      nodes[i] = fit_node(i, pos[i], predictors);
    }
    for (std::size_t t = 0; t < rest.size(); ++t) nodes[rest[t]] = tail[t];
    CausalOrdering full = tf_orderings[o];
    full.sequence.insert(full.sequence.end(), rest.begin(), rest.end());
    out[o] = assemble(std::move(full), nodes);
  });
  return out;
}

DagEstimate estimate_dag_for_ordering(const ExpressionDataset& steady, const CausalOrdering& ordering,
                                      const InfluenceMatrix& influence, const LassoConfig& cfg) {
  return DagEstimator(steady, influence, cfg).estimate(ordering);
}

void write_estimate(std::ostream& out, const DagEstimate& estimate, const std::vector<std::string>& labels) {
  out << "source\ttarget\tweight\n" << std::setprecision(17);
  for (const auto& e : estimate.edges) out << labels[e.source] << '\t' << labels[e.target] << '\t' << e.weight << '\n';
}

}  // namespace ripe
