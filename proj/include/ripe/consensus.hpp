#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ripe/estimator.hpp"
#include "ripe/graph.hpp"

namespace ripe {

struct ConsensusNetwork {
  Eigen::MatrixXd confidence;  // (j, i): fraction of members with edge j -> i
  Eigen::MatrixXd sign;        // sgn of the summed member signs
  Eigen::MatrixXd magnitude;   // mean |weight| over all members
  Eigen::MatrixXi counts;      // members with a nonzero weight
  double q = 1.0;
  std::size_t members = 0;

  std::size_t p() const { return static_cast<std::size_t>(confidence.rows()); }
};

// Indices of estimates whose score is <= the ceil(q M)-th smallest score;
// ties at the boundary are all kept. Result is in input order.
std::vector<std::size_t> select_top_orderings(std::span<const DagEstimate> estimates, double q);

ConsensusNetwork build_consensus(std::span<const DagEstimate> estimates, std::span<const std::size_t> members);
ConsensusNetwork build_consensus(std::span<const DagEstimate> estimates);

// Edges with confidence >= tau, tau in (0, 1]. Sorted by (source, target).
std::vector<Edge> threshold_edges(const ConsensusNetwork& network, double tau);

// "source target confidence sign magnitude" rows for every cell with nonzero confidence.
void write_consensus(std::ostream& out, const ConsensusNetwork& network, const std::vector<std::string>& labels);

}  // namespace ripe
