#include "ripe/influence.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <iomanip>
#include <sstream>

#include "ripe/error.hpp"
#include "ripe/kernels.hpp"
#include "ripe/parallel.hpp"
#include "tsv.hpp"

namespace ripe {

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, TTestKind kind) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InsufficientReplicates, "t-test needs at least two observations per group");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = kernels::sum(a) / na;
  const double mb = kernels::sum(b) / nb;
  const double va = kernels::squared_deviation(a, ma) / (na - 1.0);
  const double vb = kernels::squared_deviation(b, mb) / (nb - 1.0);

  TTestResult r;
  double se = 0.0;
  if (kind == TTestKind::Student) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  } else {
    const double sa = va / na, sb = vb / nb;
    se = std::sqrt(sa + sb);
    const double denom = sa * sa / (na - 1.0) + sb * sb / (nb - 1.0);
    r.df = denom > 0.0 ? (sa + sb) * (sa + sb) / denom : na + nb - 2.0;
  }
  if (!(se > 0.0)) {
    r.degenerate = true;
    if (ma == mb) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = ma > mb ? HUGE_VAL : -HUGE_VAL;
      r.p_value = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / se;
  const boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

std::vector<double> bh_adjust(std::span<const double> pvalues) {
  const std::size_t m = pvalues.size();
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "p-values must lie in [0,1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return pvalues[x] < pvalues[y]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double candidate = pvalues[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, candidate);
    adjusted[order[r]] = std::min(1.0, running);
  }
  return adjusted;
}

InfluenceMatrix::InfluenceMatrix(std::vector<std::string> labels, std::vector<Node> perturbed_genes)
    : gene_labels(std::move(labels)), perturbed(std::move(perturbed_genes)) {
  entries.assign(perturbed.size() * gene_labels.size(), 0);
  rebuild_index();
}

InfluenceMatrix InfluenceMatrix::full(std::vector<std::string> labels) {
  std::vector<Node> all(labels.size());
  std::iota(all.begin(), all.end(), Node{0});
  return InfluenceMatrix(std::move(labels), std::move(all));
}

void InfluenceMatrix::rebuild_index() {
  row_index_.assign(gene_labels.size(), -1);
  for (std::size_t r = 0; r < perturbed.size(); ++r) {
    if (perturbed[r] >= gene_labels.size()) throw Error(ErrorCode::ValueOutOfRange, "perturbed gene out of range");
    row_index_[perturbed[r]] = static_cast<std::int64_t>(r);
  }
}

void InfluenceMatrix::set(std::size_t row, Node gene, bool value) {
  if (perturbed[row] == gene) return;
  entries[row * p() + gene] = value ? 1 : 0;
}

std::optional<std::size_t> InfluenceMatrix::row_of(Node gene) const {
  if (gene >= row_index_.size() || row_index_[gene] < 0) return std::nullopt;
  return static_cast<std::size_t>(row_index_[gene]);
}

bool InfluenceMatrix::influences(Node from, Node to) const {
  const auto row = row_of(from);
  return row && at(*row, to);
}

std::size_t InfluenceMatrix::edge_count() const {
  return static_cast<std::size_t>(std::count(entries.begin(), entries.end(), std::uint8_t{1}));
}

DirectedGraph InfluenceMatrix::graph() const {
  std::vector<Edge> edges;
  edges.reserve(edge_count());
  std::vector<std::size_t> rows(k());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(), [&](auto x, auto y) { return perturbed[x] < perturbed[y]; });
  for (std::size_t r : rows) {
    for (Node j = 0; j < p(); ++j) {
      if (at(r, j)) edges.emplace_back(perturbed[r], j);
    }
  }
  return graph_from_unique_edges(gene_labels, edges);
}

std::vector<std::vector<Node>> InfluenceMatrix::parents() const {
  std::vector<std::vector<Node>> out(p());
  std::vector<std::size_t> rows(k());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(), [&](auto x, auto y) { return perturbed[x] < perturbed[y]; });
  for (std::size_t r : rows) {
    for (Node j = 0; j < p(); ++j) {
      if (at(r, j)) out[j].push_back(perturbed[r]);
    }
  }
  return out;
}

InfluenceMatrix influence_from_graph(const DirectedGraph& graph, std::optional<std::vector<Node>> perturbed) {
  InfluenceMatrix m = perturbed ? InfluenceMatrix(graph.labels(), *perturbed) : InfluenceMatrix::full(graph.labels());
  for (const auto& [u, v] : graph.edges()) {
    const auto row = m.row_of(u);
    if (!row) {
      throw Error(ErrorCode::LabelMismatch, "influence edge from unperturbed gene '" + graph.label(u) + "'");
    }
    m.set(*row, v, true);
  }
  return m;
}

PValueTable screen_pvalues(const ExpressionDataset& data, TTestKind kind, std::size_t workers) {
  const std::size_t p = data.genes();
  const auto wt_rows = data.rows_where(Condition::wild_type());
  if (wt_rows.empty()) throw Error(ErrorCode::MissingWildType, "dataset has no wild-type samples");
  if (wt_rows.size() < 2) throw Error(ErrorCode::InsufficientReplicates, "need at least 2 wild-type samples");

  std::vector<Node> perturbed;
  for (const auto& c : data.conditions) {
    if (c.knockout) perturbed.push_back(*c.knockout);
  }
  std::sort(perturbed.begin(), perturbed.end());
  perturbed.erase(std::unique(perturbed.begin(), perturbed.end()), perturbed.end());

  std::vector<std::vector<std::size_t>> ko_rows(perturbed.size());
  for (std::size_t r = 0; r < perturbed.size(); ++r) {
    ko_rows[r] = data.rows_where(Condition::knockout_of(perturbed[r]));
    if (ko_rows[r].size() < 2) {
      throw Error(ErrorCode::InsufficientReplicates,
                  "knockout of '" + data.gene_labels[perturbed[r]] + "' has fewer than 2 replicates");
    }
  }

  // Column-major copy of the wild-type block for contiguous per-gene access.
  const Eigen::MatrixXd wt = data.wild_type_values();
  PValueTable table{data.gene_labels, perturbed, Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(perturbed.size()), static_cast<Eigen::Index>(p))};
  parallel_for(perturbed.size(), workers, [&](std::size_t r) {
    Eigen::MatrixXd ko(static_cast<Eigen::Index>(ko_rows[r].size()), static_cast<Eigen::Index>(p));
    for (std::size_t s = 0; s < ko_rows[r].size(); ++s) ko.row(static_cast<Eigen::Index>(s)) = data.values.row(static_cast<Eigen::Index>(ko_rows[r][s]));
    for (std::size_t j = 0; j < p; ++j) {
      if (j == perturbed[r]) continue;
      const auto col = static_cast<Eigen::Index>(j);
      const std::span<const double> a(ko.col(col).data(), static_cast<std::size_t>(ko.rows()));
      const std::span<const double> b(wt.col(col).data(), static_cast<std::size_t>(wt.rows()));
      table.raw(static_cast<Eigen::Index>(r), col) = welch_t_test(a, b, kind).p_value;
    }
  });
  return table;
}

namespace {

Eigen::MatrixXd adjusted_pvalues(const PValueTable& table, PAdjust adjust) {
  if (adjust == PAdjust::None) return table.raw;
  std::vector<double> flat;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index r = 0; r < table.raw.rows(); ++r) {
    for (Eigen::Index j = 0; j < table.raw.cols(); ++j) {
      if (static_cast<Node>(j) == table.perturbed[static_cast<std::size_t>(r)]) continue;
      flat.push_back(table.raw(r, j));
      cells.emplace_back(r, j);
    }
  }
  const auto adj = bh_adjust(flat);
  Eigen::MatrixXd out = table.raw;
  for (std::size_t c = 0; c < cells.size(); ++c) out(cells[c].first, cells[c].second) = adj[c];
  return out;
}

InfluenceMatrix threshold_adjusted(const PValueTable& table, const Eigen::MatrixXd& pv, double cutoff) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "cutoff must lie in (0,1]");
  InfluenceMatrix m(table.gene_labels, table.perturbed);
  for (std::size_t r = 0; r < m.k(); ++r) {
    for (Node j = 0; j < m.p(); ++j) {
      if (j == m.perturbed[r]) continue;
      m.set(r, j, pv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) <= cutoff);
    }
  }
  m.pvalues = pv;
  return m;
}

}  // namespace

InfluenceMatrix threshold_pvalues(const PValueTable& table, double cutoff, PAdjust adjust) {
  return threshold_adjusted(table, adjusted_pvalues(table, adjust), cutoff);
}

InfluenceMatrix build_influence_matrix(const ExpressionDataset& data, double cutoff, PAdjust adjust,
                                       TTestKind kind, std::size_t workers) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "cutoff must lie in (0,1]");
  return threshold_pvalues(screen_pvalues(data, kind, workers), cutoff, adjust);
}

std::vector<ScanRow> cutoff_scan(const PValueTable& table, std::span<const double> grid, PAdjust adjust) {
  if (grid.empty()) throw Error(ErrorCode::EmptyInput, "cutoff grid is empty");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  const Eigen::MatrixXd pv = adjusted_pvalues(table, adjust);
  std::vector<ScanRow> rows;
  for (double c : sorted) {
    const auto m = threshold_adjusted(table, pv, c);
    const auto sizes = component_size_summary(m.graph());
    rows.push_back({c, sizes.edge_count, sizes.largest_scc, sizes.largest_wcc});
  }
  return rows;
}

std::vector<ScanRow> cutoff_scan(const ExpressionDataset& data, std::span<const double> grid, PAdjust adjust,
                                 TTestKind kind, std::size_t workers) {
  if (grid.empty()) throw Error(ErrorCode::EmptyInput, "cutoff grid is empty");
  for (double c : grid) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "cutoff must lie in (0,1]");
  }
  return cutoff_scan(screen_pvalues(data, kind, workers), grid, adjust);
}

std::vector<double> default_cutoff_grid() {
  std::vector<double> grid(40);
  const double lo = std::log10(1e-6), hi = std::log10(0.1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / 39.0);
  }
  return grid;
}

void write_scan(std::ostream& out, std::span<const ScanRow> rows) {
  out << "cutoff\tedges\tlargest_scc\tlargest_wcc\n";
  for (const auto& r : rows) {
    out << std::setprecision(6) << r.cutoff << '\t' << r.edges << '\t' << r.largest_scc << '\t' << r.largest_wcc
        << '\n';
  }
}

void write_influence(std::ostream& out, const InfluenceMatrix& influence) {
  if (influence.k() != influence.p()) {
    out << "# perturbed=";
    auto sorted = influence.perturbed;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) out << (i ? "," : "") << influence.gene_labels[sorted[i]];
    out << '\n';
  }
  write_edge_list(out, influence.graph());
}

InfluenceMatrix read_influence(std::istream& in, const std::vector<std::string>& genes) {
  auto file = read_edge_list(in, &genes);
  std::optional<std::vector<Node>> perturbed;
  const auto index = label_index(genes);
  for (const auto& c : file.comments) {
    constexpr std::string_view key = "# perturbed=";
    if (!c.starts_with(key)) continue;
    perturbed.emplace();
    for (auto label : tsv::split(std::string_view(c).substr(key.size()), ',')) {
      label = tsv::trim(label);
      if (label.empty()) continue;
      const auto it = index.find(std::string(label));
      if (it == index.end()) throw Error(ErrorCode::LabelMismatch, "unknown perturbed gene '" + std::string(label) + "'");
      perturbed->push_back(it->second);
    }
    std::sort(perturbed->begin(), perturbed->end());
    perturbed->erase(std::unique(perturbed->begin(), perturbed->end()), perturbed->end());
  }
  return influence_from_graph(file.graph, perturbed);
}

InfluenceMatrix read_influence(const std::filesystem::path& path, const std::vector<std::string>& genes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return read_influence(in, genes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace ripe
