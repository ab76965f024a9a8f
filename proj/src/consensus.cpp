#include "ripe/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "ripe/error.hpp"

namespace ripe {

std::vector<std::size_t> select_top_orderings(std::span<const DagEstimate> estimates, double q) {
  if (estimates.empty()) throw Error(ErrorCode::EmptyInput, "no estimates to select from");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "q must lie in (0,1]");
  std::vector<double> scores;
  scores.reserve(estimates.size());
  for (const auto& e : estimates) scores.push_back(e.score);
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const auto M = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(M) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, M);
  const double bound = sorted[rank - 1];
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < M; ++t) {
    if (scores[t] <= bound) out.push_back(t);
  }
  return out;
}

ConsensusNetwork build_consensus(std::span<const DagEstimate> estimates, std::span<const std::size_t> members) {
  if (members.empty()) throw Error(ErrorCode::EmptyInput, "consensus needs at least one member");
  const std::size_t p = estimates[members.front()].p;
  const auto pp = static_cast<Eigen::Index>(p);
  ConsensusNetwork net;
  net.counts = Eigen::MatrixXi::Zero(pp, pp);
  Eigen::MatrixXi sign_sum = Eigen::MatrixXi::Zero(pp, pp);
  Eigen::MatrixXd abs_sum = Eigen::MatrixXd::Zero(pp, pp);
  for (std::size_t m : members) {
    if (m >= estimates.size()) throw Error(ErrorCode::ValueOutOfRange, "member index out of range");
    const auto& est = estimates[m];
    if (est.p != p) throw Error(ErrorCode::GeneSetMismatch, "members estimate different gene sets");
    for (const auto& e : est.edges) {
      if (e.weight == 0.0) continue;
      net.counts(e.source, e.target) += 1;
      sign_sum(e.source, e.target) += e.weight > 0.0 ? 1 : -1;
      abs_sum(e.source, e.target) += std::fabs(e.weight);
    }
  }
  const double Q = static_cast<double>(members.size());
  net.members = members.size();
  net.confidence = net.counts.cast<double>() / Q;
  net.sign = sign_sum.unaryExpr([](int s) { return static_cast<double>((s > 0) - (s < 0)); });
  net.magnitude = abs_sum / Q;
  return net;
}

ConsensusNetwork build_consensus(std::span<const DagEstimate> estimates) {
  std::vector<std::size_t> all(estimates.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_consensus(estimates, all);
}

std::vector<Edge> threshold_edges(const ConsensusNetwork& network, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "tau must lie in (0,1]");
  // Compare counts rather than rounded fractions so the boundary is inclusive.
  const double need = tau * static_cast<double>(network.members) - 1e-9;
  std::vector<Edge> out;
  for (Eigen::Index j = 0; j < network.counts.rows(); ++j) {
    for (Eigen::Index i = 0; i < network.counts.cols(); ++i) {
      const int c = network.counts(j, i);
      if (c > 0 && static_cast<double>(c) >= need) out.emplace_back(static_cast<Node>(j), static_cast<Node>(i));
    }
  }
  return out;
}

void write_consensus(std::ostream& out, const ConsensusNetwork& network, const std::vector<std::string>& labels) {
  out << "source\ttarget\tconfidence\tsign\tmagnitude\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < network.counts.rows(); ++j) {
    for (Eigen::Index i = 0; i < network.counts.cols(); ++i) {
      if (network.counts(j, i) == 0) continue;
      out << labels[static_cast<std::size_t>(j)] << '\t' << labels[static_cast<std::size_t>(i)] << '\t'
          << network.confidence(j, i) << '\t' << static_cast<int>(network.sign(j, i)) << '\t'
          << network.magnitude(j, i) << '\n';
    }
  }
}

}  // namespace ripe
