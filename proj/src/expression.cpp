#include "ripe/expression.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <unordered_set>

#include "ripe/error.hpp"
#include "tsv.hpp"

namespace ripe {

std::vector<std::size_t> ExpressionDataset::rows_where(const Condition& c) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i] == c) rows.push_back(i);
  }
  return rows;
}

Eigen::MatrixXd ExpressionDataset::wild_type_values() const {
  const auto rows = rows_where(Condition::wild_type());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = values.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

ExpressionDataset read_expression(std::istream& in, const std::string& source) {
  tsv::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) tsv::fail(source, reader.number(), "empty file");
  const auto header = tsv::split(line);
  if (header.size() < 3 || tsv::trim(header[0]) != "sample_id" || tsv::trim(header[1]) != "condition") {
    tsv::fail(source, reader.number(), "expected header 'sample_id<TAB>condition<TAB>genes...'");
  }
  ExpressionDataset data;
  std::unordered_set<std::string> seen;
  for (std::size_t k = 2; k < header.size(); ++k) {
    std::string label(tsv::trim(header[k]));
    if (label.empty()) tsv::fail(source, reader.number(), "empty gene label");
    if (!seen.insert(label).second) tsv::fail(source, reader.number(), "duplicate gene label '" + label + "'");
    data.gene_labels.push_back(std::move(label));
  }
  const auto index = label_index(data.gene_labels);
  const std::size_t p = data.gene_labels.size();

  std::vector<double> flat;
  while (reader.next(line)) {
    const auto fields = tsv::split(line);
    if (fields.size() != p + 2) {
      tsv::fail(source, reader.number(),
                "expected " + std::to_string(p + 2) + " columns, found " + std::to_string(fields.size()));
    }
    data.sample_ids.emplace_back(tsv::trim(fields[0]));
    const auto cond = tsv::trim(fields[1]);
    if (cond == "WT") {
      data.conditions.push_back(Condition::wild_type());
    } else if (cond.starts_with("KO:")) {
      const std::string gene(cond.substr(3));
      const auto it = index.find(gene);
      if (it == index.end()) tsv::fail(source, reader.number(), "knockout of unknown gene '" + gene + "'");
      data.conditions.push_back(Condition::knockout_of(it->second));
    } else {
      tsv::fail(source, reader.number(), "condition must be WT or KO:<gene>");
    }
    for (std::size_t k = 0; k < p; ++k) {
      const auto v = tsv::parse_double(fields[k + 2]);
      if (!v || !std::isfinite(*v)) {
        tsv::fail(source, reader.number(), "non-numeric or missing value in column " + std::to_string(k + 3));
      }
      flat.push_back(*v);
    }
  }
  const auto n = static_cast<Eigen::Index>(data.sample_ids.size());
  data.values.resize(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) data.values(i, static_cast<Eigen::Index>(k)) = flat[static_cast<std::size_t>(i) * p + k];
  }
  return data;
}

ExpressionDataset read_expression(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_expression(in, path.string());
}

void write_expression(std::ostream& out, const ExpressionDataset& data) {
  out << "sample_id\tcondition";
  for (const auto& g : data.gene_labels) out << '\t' << g;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.samples(); ++i) {
    out << data.sample_ids[i] << '\t';
    const auto& c = data.conditions[i];
    if (c.is_wild_type()) {
      out << "WT";
    } else {
      out << "KO:" << data.gene_labels[*c.knockout];
    }
    for (std::size_t k = 0; k < data.genes(); ++k) {
      out << '\t' << data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    out << '\n';
  }
}

}  // namespace ripe
