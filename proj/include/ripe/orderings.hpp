#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ripe/graph.hpp"

namespace ripe {

enum class OrderingSource { Exhaustive, McDfs, Supplied };

struct CausalOrdering {
  std::vector<Node> sequence;
  OrderingSource source = OrderingSource::Supplied;
  std::uint64_t labeling = 0;  // MC-DFS run index or combination index
};

struct OrderingUniverse {
  std::vector<CausalOrdering> orderings;
  bool exhaustive = false;
  std::vector<std::size_t> per_component_counts;  // indexed by component
};

struct SccOrderings {
  std::vector<std::vector<Node>> sequences;  // local indices of the input graph
  bool cap_reached = false;
};

// Every distinct descending-post ordering reachable by some DFS execution on a
// strongly connected graph: all start nodes and all neighbour-exploration
// orders, found by backtracking over the choice of next unvisited neighbour.
// Sequences are sorted lexicographically. Throws NotStronglyConnected.
SccOrderings enumerate_scc_orderings(const DirectedGraph& component, std::size_t cap);

// m whole-graph DFS runs, each under a uniform random node priority drawn
// from derive_seed(seed, ., run). Each result is regrouped into whole
// components laid out in the canonical super-DAG order, members keeping their
// DFS order, then deduplicated in run order.
std::vector<CausalOrdering> mc_dfs_sample(const DirectedGraph& graph, std::size_t m, std::uint64_t seed,
                                          std::size_t workers = 1);

// Concatenates one sequence per component, components arranged by the
// canonical topological sort of the super DAG. Products above `cap` are
// replaced by a seeded uniform sample of `cap` distinct combinations.
// per_scc[c] holds sequences of global node ids for component c.
OrderingUniverse compose_universe(const Condensation& condensation,
                                  const std::vector<std::vector<std::vector<Node>>>& per_scc, std::size_t cap,
                                  std::uint64_t seed);

// True iff every edge between different SCCs points forward. Throws
// LengthMismatch when the ordering is not a permutation of the nodes.
bool is_consistent(std::span<const Node> ordering, const DirectedGraph& graph);
bool is_consistent(std::span<const Node> ordering, const DirectedGraph& graph, const Condensation& condensation);

enum class OrderingStrategy {
  Auto,        // exhaustive when every SCC is small, else whole-graph MC-DFS
  Exhaustive,  // per-SCC enumeration regardless of size
  McDfs,       // whole-graph MC-DFS
  PerSccMc,    // enumeration for small SCCs, MC-DFS inside large ones, composed
};

struct OrderingConfig {
  OrderingStrategy strategy = OrderingStrategy::Auto;
  std::size_t m = 1000;
  std::size_t exhaustive_max_scc = 10;
  std::size_t cap = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

OrderingUniverse generate_orderings(const DirectedGraph& graph, const OrderingConfig& config);

struct OrderingsHeader {
  std::uint64_t graph_hash = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  bool exhaustive = false;
};

// One ordering per line, comma-separated labels, after a '#' header line.
void write_orderings(std::ostream& out, const std::vector<CausalOrdering>& orderings,
                     const std::vector<std::string>& labels, const OrderingsHeader& header);
// Each line must be a permutation of `labels` unless `subset` is given, in
// which case it must be a permutation of those genes.
std::vector<CausalOrdering> read_orderings(std::istream& in, const std::vector<std::string>& labels,
                                           const std::vector<Node>* subset = nullptr);
std::vector<CausalOrdering> read_orderings(const std::filesystem::path& path, const std::vector<std::string>& labels,
                                           const std::vector<Node>* subset = nullptr);

}  // namespace ripe
