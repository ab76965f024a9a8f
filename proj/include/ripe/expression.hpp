#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ripe/graph.hpp"

namespace ripe {

// Sample condition: wild type, or knockout of one gene.
struct Condition {
  std::optional<Node> knockout;

  static Condition wild_type() { return {}; }
  static Condition knockout_of(Node gene) { return {gene}; }
  bool is_wild_type() const { return !knockout.has_value(); }
  bool operator==(const Condition&) const = default;
};

// n x p expression matrix (rows samples, columns genes).
struct ExpressionDataset {
  Eigen::MatrixXd values;
  std::vector<std::string> gene_labels;
  std::vector<std::string> sample_ids;
  std::vector<Condition> conditions;

  std::size_t samples() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t genes() const { return static_cast<std::size_t>(values.cols()); }

  std::vector<std::size_t> rows_where(const Condition& c) const;
  // Wild-type rows only.
  Eigen::MatrixXd wild_type_values() const;
};

// Header "sample_id<TAB>condition<TAB>gene1...geneP"; condition is WT or
// KO:<gene label>. Malformed input raises Error(Parse) citing the line.
ExpressionDataset read_expression(std::istream& in, const std::string& source = "expression");
ExpressionDataset read_expression(const std::filesystem::path& path);
void write_expression(std::ostream& out, const ExpressionDataset& data);

}  // namespace ripe
