#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ripe/expression.hpp"
#include "ripe/graph.hpp"

namespace ripe {

enum class TTestKind { Welch, Student };
enum class PAdjust { None, BenjaminiHochberg };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  // Both groups had zero variance; p forced to 0 (means differ) or 1.
  bool degenerate = false;
};

// Two-sided test of mean(a) vs mean(b). Requires |a|, |b| >= 2.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                         TTestKind kind = TTestKind::Welch);

// Benjamini-Hochberg step-up adjustment; result in input order.
std::vector<double> bh_adjust(std::span<const double> pvalues);

// Binary k x p matrix: row r describes the knockout of gene perturbed[r].
struct InfluenceMatrix {
  std::vector<std::string> gene_labels;
  std::vector<Node> perturbed;
  std::vector<std::uint8_t> entries;         // row-major k x p
  std::optional<Eigen::MatrixXd> pvalues;    // k x p, as thresholded

  InfluenceMatrix() = default;
  InfluenceMatrix(std::vector<std::string> labels, std::vector<Node> perturbed_genes);
  // Square matrix with every gene perturbed.
  static InfluenceMatrix full(std::vector<std::string> labels);

  std::size_t p() const { return gene_labels.size(); }
  std::size_t k() const { return perturbed.size(); }

  bool at(std::size_t row, Node gene) const { return entries[row * p() + gene] != 0; }
  // Diagonal writes (gene perturbed[row] itself) are ignored.
  void set(std::size_t row, Node gene, bool value);

  // Row of a perturbed gene, or nullopt.
  std::optional<std::size_t> row_of(Node gene) const;
  bool influences(Node from, Node to) const;

  std::size_t edge_count() const;
  DirectedGraph graph() const;
  // Influence parents of every gene.
  std::vector<std::vector<Node>> parents() const;

 private:
  std::vector<std::int64_t> row_index_;
  void rebuild_index();
  friend InfluenceMatrix influence_from_graph(const DirectedGraph&, std::optional<std::vector<Node>>);
};

// Sources must be in `perturbed` when given; otherwise every gene is perturbed.
InfluenceMatrix influence_from_graph(const DirectedGraph& graph,
                                     std::optional<std::vector<Node>> perturbed = std::nullopt);

struct PValueTable {
  std::vector<std::string> gene_labels;
  std::vector<Node> perturbed;   // ascending gene index
  Eigen::MatrixXd raw;           // k x p, diagonal = 1
};

// One test per (knocked-out gene, other gene) against the wild-type rows.
// Throws MissingWildType / InsufficientReplicates.
PValueTable screen_pvalues(const ExpressionDataset& data, TTestKind kind = TTestKind::Welch,
                           std::size_t workers = 1);

// BH is applied jointly over all off-diagonal cells.
InfluenceMatrix threshold_pvalues(const PValueTable& table, double cutoff, PAdjust adjust = PAdjust::None);

InfluenceMatrix build_influence_matrix(const ExpressionDataset& data, double cutoff,
                                       PAdjust adjust = PAdjust::None,
                                       TTestKind kind = TTestKind::Welch, std::size_t workers = 1);

struct ScanRow {
  double cutoff = 0.0;
  std::size_t edges = 0;
  std::size_t largest_scc = 0;
  std::size_t largest_wcc = 0;
};

// Rows are returned sorted by ascending cutoff.
std::vector<ScanRow> cutoff_scan(const PValueTable& table, std::span<const double> grid,
                                 PAdjust adjust = PAdjust::None);
std::vector<ScanRow> cutoff_scan(const ExpressionDataset& data, std::span<const double> grid,
                                 PAdjust adjust = PAdjust::None, TTestKind kind = TTestKind::Welch,
                                 std::size_t workers = 1);

// 40 log-spaced cutoffs in [1e-6, 0.1].
std::vector<double> default_cutoff_grid();

void write_scan(std::ostream& out, std::span<const ScanRow> rows);

// Influence edge list: "# perturbed=<labels,...>" comment (omitted when every
// gene is perturbed), then "source<TAB>target" rows.
void write_influence(std::ostream& out, const InfluenceMatrix& influence);
InfluenceMatrix read_influence(const std::filesystem::path& path, const std::vector<std::string>& genes);
InfluenceMatrix read_influence(std::istream& in, const std::vector<std::string>& genes);

}  // namespace ripe
