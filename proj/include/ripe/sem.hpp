#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ripe/expression.hpp"
#include "ripe/graph.hpp"
#include "ripe/influence.hpp"

namespace ripe {

// weights(j, i) is the effect of gene j on gene i.
struct WeightedNetwork {
  Eigen::MatrixXd weights;
  bool cyclic = false;
  std::vector<std::string> labels;

  std::size_t p() const { return labels.size(); }
  std::size_t edge_count() const;
  DirectedGraph skeleton() const;
};

std::vector<std::string> gene_labels(std::size_t p);  // "G1".."Gp"

// Acyclic skeleton (unit weights) with exactly edge_target edges. Hubs take
// half of the edges; when p >= 20 the first two nodes of the hidden order are
// parentless. Throws InfeasibleTarget.
WeightedNetwork random_dag(std::size_t p, std::size_t edge_target, std::size_t hub_count, std::uint64_t seed);

// Uniform random digraph skeleton with exactly edge_target edges. When
// seed_cycle >= 2 a directed cycle through that many random nodes is placed
// first; otherwise a 2-cycle is forced if sampling left the graph acyclic.
WeightedNetwork random_cyclic(std::size_t p, std::size_t edge_target, std::uint64_t seed,
                              std::size_t seed_cycle = 0);

// Acyclic forward skeleton plus `loops` feedback edges, each closing a
// directed cycle of length <= max_loop by pointing back along a forward path.
// Total edge count is edge_target. Throws InfeasibleTarget.
WeightedNetwork random_feedback(std::size_t p, std::size_t edge_target, std::size_t loops, std::size_t max_loop,
                                std::uint64_t seed);

struct WeightSpec {
  std::optional<double> fixed;  // every edge gets this weight
  double lo = 0.2;              // otherwise +-U(lo, hi)
  double hi = 0.8;

  static WeightSpec constant(double w) { return {w, 0.0, 0.0}; }
  static WeightSpec uniform(double lo, double hi) { return {std::nullopt, lo, hi}; }
};

WeightedNetwork assign_weights(const WeightedNetwork& skeleton, const WeightSpec& spec, std::uint64_t seed);

// Spectral radius of |W|, computed per strongly connected block.
double abs_spectral_radius(const Eigen::MatrixXd& weights);

// If rho(|W|) >= 1, scales every weight by 0.95 / rho. Returns the factor.
double stabilize(WeightedNetwork& network);

// Samples x = W^T x + b + z with z ~ N(0, sigma^2); every row is wild type.
// Throws SingularSystem when rho(|W|) >= 1 on a cyclic network.
ExpressionDataset sample_sem(const WeightedNetwork& network, std::size_t n, double noise_sd, std::uint64_t seed,
                             double baseline = 0.0);

// entries[i, j] = 1 iff j is reachable from i by a path of length >= 1.
InfluenceMatrix true_influence(const WeightedNetwork& network);

struct ScreenOptions {
  // Intercept added to every structural equation. With 0 a knockout only
  // changes descendant variances; a positive value also shifts their means.
  double baseline = 0.0;
  // Value the knocked-out gene is clamped to.
  double knockout_level = 0.0;
  // Genes to knock out; empty means all.
  std::vector<Node> targets;
};

// n_0 wild-type samples plus n_i samples per knockout; a knockout replaces
// gene g's equation with X_g = knockout_level.
ExpressionDataset simulate_perturbation_screen(const WeightedNetwork& network, std::size_t n_i, std::size_t n_0,
                                               double noise_sd, std::uint64_t seed, const ScreenOptions& options = {});

struct NoiseSpec {
  double fp_rate = 0.0;       // per absent off-diagonal cell
  double fn_rate = 0.0;       // per present cell
  double reverse_prop = 0.0;  // fraction of present edges flipped
  std::uint64_t seed = 0;
};

struct NoiseReport {
  double expected_false_positives = 0.0;
  double expected_false_negatives = 0.0;
  std::size_t reversed = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

// Reversal first, then independent FN / FP draws against the reversed matrix.
InfluenceMatrix perturb_influence(const InfluenceMatrix& influence, const NoiseSpec& spec,
                                  NoiseReport* report = nullptr);

std::size_t absent_cells(const InfluenceMatrix& influence);
// Rate giving the requested expected number of false positives / negatives.
double calibrate_fp_rate(const InfluenceMatrix& influence, double expected_false_edges);
double calibrate_fn_rate(const InfluenceMatrix& influence, double expected_false_edges);

// "source<TAB>target<TAB>weight" rows with that header.
void write_network(std::ostream& out, const WeightedNetwork& network);
WeightedNetwork read_network(std::istream& in, const std::vector<std::string>& labels);

}  // namespace ripe
