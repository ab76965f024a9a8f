#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ripe/graph.hpp"

namespace ripe {

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Directed pairs compared exactly; duplicates are ignored.
EvalReport precision_recall_f1(std::span<const Edge> estimate, std::span<const Edge> truth);
// Throws LabelMismatch unless both graphs carry the same labels in the same order.
EvalReport precision_recall_f1(const DirectedGraph& estimate, const DirectedGraph& truth);

struct Significance {
  std::size_t observed_tp = 0;
  std::size_t trials = 0;
  double p_value = 1.0;                 // (#{null TP >= observed} + 1) / (trials + 1)
  std::vector<std::size_t> histogram;   // histogram[t] = trials with t true positives
  double null_mean() const;
};

struct NullModel {
  std::size_t p = 0;
  // Allowed edge sources; empty means every gene.
  std::vector<Node> sources;
};

// Draws `trials` uniform directed graphs with exactly |estimate| edges (no
// self-loops, sources restricted per the model) and compares their overlap
// with `gold` against the estimate's. Throws EdgeBudgetTooLarge.
Significance er_significance(std::span<const Edge> estimate, std::span<const Edge> gold, const NullModel& model,
                             std::size_t trials, std::uint64_t seed, std::size_t workers = 1);

// One trial's random edge set; exposed for structural checks.
std::vector<Edge> sample_null_graph(std::size_t edges, const NullModel& model, std::uint64_t seed);

// "true_positives<TAB>trials" rows.
void write_null_histogram(std::ostream& out, const Significance& sig);

}  // namespace ripe
