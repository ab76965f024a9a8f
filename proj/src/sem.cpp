#include "ripe/sem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include "ripe/error.hpp"
#include "ripe/parallel.hpp"
#include "tsv.hpp"

namespace ripe {

namespace {

constexpr std::uint64_t kStageDag = 0x444147ULL;
constexpr std::uint64_t kStageCyclic = 0x435943ULL;
constexpr std::uint64_t kStageWeights = 0x5747ULL;
constexpr std::uint64_t kStageSample = 0x53414dULL;
constexpr std::uint64_t kStageScreen = 0x5343ULL;

using Index = Eigen::Index;

WeightedNetwork empty_network(std::size_t p, bool cyclic) {
  WeightedNetwork net;
  net.weights = Eigen::MatrixXd::Zero(static_cast<Index>(p), static_cast<Index>(p));
  net.cyclic = cyclic;
  net.labels = gene_labels(p);
  return net;
}

}  // namespace

std::vector<std::string> gene_labels(std::size_t p) {
  std::vector<std::string> labels(p);
  for (std::size_t i = 0; i < p; ++i) labels[i] = "G" + std::to_string(i + 1);
  return labels;
}

std::size_t WeightedNetwork::edge_count() const {
  return static_cast<std::size_t>((weights.array() != 0.0).count());
}

DirectedGraph WeightedNetwork::skeleton() const {
  std::vector<Edge> edges;
  for (Index j = 0; j < weights.rows(); ++j) {
    for (Index i = 0; i < weights.cols(); ++i) {
      if (i != j && weights(j, i) != 0.0) edges.emplace_back(static_cast<Node>(j), static_cast<Node>(i));
    }
  }
  return graph_from_unique_edges(labels, edges);
}

WeightedNetwork random_dag(std::size_t p, std::size_t edge_target, std::size_t hub_count, std::uint64_t seed) {
  const bool reserve_second_root = p >= 20;
  const std::size_t max_edges = p * (p > 0 ? p - 1 : 0) / 2 - (reserve_second_root ? 1 : 0);
  if (edge_target > max_edges) {
    throw Error(ErrorCode::InfeasibleTarget, "edge target " + std::to_string(edge_target) + " exceeds " +
                                                 std::to_string(max_edges) + " for an acyclic graph on " +
                                                 std::to_string(p) + " nodes");
  }
  if (hub_count > p / 2) throw Error(ErrorCode::InfeasibleTarget, "too many hubs for p");
  WeightedNetwork net = empty_network(p, false);
  if (edge_target == 0) return net;

  std::mt19937_64 rng(derive_seed(seed, kStageDag, 0));
  std::vector<Node> order = identity_priority(p);
  std::shuffle(order.begin(), order.end(), rng);

  // Position pairs (a, b), a < b, stand for edges order[a] -> order[b].
  auto allowed = [&](std::size_t, std::size_t b) { return !(reserve_second_root && b == 1); };
  std::vector<char> used(p * p, 0);
  std::size_t placed = 0;
  auto place = [&](std::size_t a, std::size_t b) {
    used[a * p + b] = 1;
    net.weights(order[a], order[b]) = 1.0;
    ++placed;
  };

  if (hub_count > 0) {
    std::vector<std::size_t> hub_positions(p / 2);
    std::iota(hub_positions.begin(), hub_positions.end(), std::size_t{0});
    std::shuffle(hub_positions.begin(), hub_positions.end(), rng);
    hub_positions.resize(hub_count);
    std::sort(hub_positions.begin(), hub_positions.end());
    const std::size_t share = edge_target / 2 / hub_count;
    for (std::size_t a : hub_positions) {
      std::vector<std::size_t> later;
      for (std::size_t b = a + 1; b < p; ++b) {
        if (allowed(a, b)) later.push_back(b);
      }
      std::shuffle(later.begin(), later.end(), rng);
      for (std::size_t t = 0; t < std::min(share, later.size()); ++t) place(a, later[t]);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (allowed(a, b) && !used[a * p + b]) pool.emplace_back(a, b);
    }
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t t = 0; placed < edge_target; ++t) place(pool[t].first, pool[t].second);
  return net;
}

WeightedNetwork random_cyclic(std::size_t p, std::size_t edge_target, std::uint64_t seed, std::size_t seed_cycle) {
  const std::size_t max_edges = p * (p > 0 ? p - 1 : 0);
  if (edge_target > max_edges) throw Error(ErrorCode::InfeasibleTarget, "edge target exceeds p(p-1)");
  if (edge_target < 2 || p < 2) throw Error(ErrorCode::InfeasibleTarget, "a cyclic graph needs at least 2 edges");
  if (seed_cycle > p || seed_cycle > edge_target) {
    throw Error(ErrorCode::InfeasibleTarget, "seed cycle longer than node count or edge target");
  }
  WeightedNetwork net = empty_network(p, true);
  std::mt19937_64 rng(derive_seed(seed, kStageCyclic, 0));
  std::unordered_set<std::uint64_t> chosen;
  std::vector<Edge> edges;
  auto add = [&](Node u, Node v) {
    if (chosen.insert(static_cast<std::uint64_t>(u) * p + v).second) edges.emplace_back(u, v);
  };
  if (seed_cycle >= 2) {
    std::vector<Node> nodes = identity_priority(p);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    for (std::size_t i = 0; i < seed_cycle; ++i) add(nodes[i], nodes[(i + 1) % seed_cycle]);
  }
  std::uniform_int_distribution<std::uint64_t> cell(0, max_edges - 1);
  while (edges.size() < edge_target) {
    const auto idx = cell(rng);
    const auto u = static_cast<Node>(idx / (p - 1));
    auto v = static_cast<Node>(idx % (p - 1));
    if (v >= u) ++v;
    add(u, v);
  }
  for (const auto& [u, v] : edges) net.weights(u, v) = 1.0;
  if (component_size_summary(net.skeleton()).largest_scc < 2) {
    // Replace one edge by the reverse of another to close a 2-cycle.
    const std::size_t keep = std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng);
    std::size_t drop = std::uniform_int_distribution<std::size_t>(0, edges.size() - 2)(rng);
    if (drop >= keep) ++drop;
    net.weights(edges[drop].first, edges[drop].second) = 0.0;
    net.weights(edges[keep].second, edges[keep].first) = 1.0;
  }
  return net;
}

WeightedNetwork random_feedback(std::size_t p, std::size_t edge_target, std::size_t loops, std::size_t max_loop,
                                std::uint64_t seed) {
  if (loops == 0 || loops > edge_target || max_loop < 2) {
    throw Error(ErrorCode::InfeasibleTarget, "feedback graph needs 1..edge_target loops of length >= 2");
  }
  WeightedNetwork net = random_dag(p, edge_target - loops, 0, seed);
  net.cyclic = true;
  const DirectedGraph forward = net.skeleton();
  std::mt19937_64 rng(derive_seed(seed, kStageCyclic, 1));
  std::uniform_int_distribution<Node> node(0, static_cast<Node>(p - 1));
  std::uniform_int_distribution<std::size_t> steps(1, max_loop - 1);
  std::size_t added = 0;
  for (std::size_t attempt = 0; added < loops; ++attempt) {
    if (attempt > 1000 * loops + 10000) throw Error(ErrorCode::InfeasibleTarget, "could not place feedback loops");
    const Node start = node(rng);
    Node at = start;
    const std::size_t len = steps(rng);
    for (std::size_t s = 0; s < len; ++s) {
      const auto out = forward.out(at);
      if (out.empty()) break;
      at = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
    }
    if (at == start || net.weights(at, start) != 0.0) continue;
    net.weights(at, start) = 1.0;
    ++added;
  }
  return net;
}

WeightedNetwork assign_weights(const WeightedNetwork& skeleton, const WeightSpec& spec, std::uint64_t seed) {
  if (!spec.fixed && !(spec.lo > 0.0 && spec.lo < spec.hi)) {
    throw Error(ErrorCode::ValueOutOfRange, "weight range must satisfy 0 < lo < hi");
  }
  WeightedNetwork net = skeleton;
  std::mt19937_64 rng(derive_seed(seed, kStageWeights, 0));
  std::uniform_real_distribution<double> magnitude(spec.lo, spec.hi);
  std::bernoulli_distribution negative(0.5);
  // Row-major traversal keeps draws independent of Eigen's storage order.
  for (Index j = 0; j < net.weights.rows(); ++j) {
    for (Index i = 0; i < net.weights.cols(); ++i) {
      if (net.weights(j, i) == 0.0) continue;
      if (spec.fixed) {
        net.weights(j, i) = *spec.fixed;
      } else {
        const double m = magnitude(rng);
        net.weights(j, i) = negative(rng) ? -m : m;
      }
    }
  }
  stabilize(net);
  return net;
}

double abs_spectral_radius(const Eigen::MatrixXd& weights) {
  const std::size_t p = static_cast<std::size_t>(weights.rows());
  std::vector<Edge> edges;
  for (Index j = 0; j < weights.rows(); ++j) {
    for (Index i = 0; i < weights.cols(); ++i) {
      if (i != j && weights(j, i) != 0.0) edges.emplace_back(static_cast<Node>(j), static_cast<Node>(i));
    }
  }
  const auto cond = scc_decompose(graph_from_unique_edges(std::vector<std::string>(p), edges));
  double rho = 0.0;
  for (Index d = 0; d < weights.rows(); ++d) rho = std::max(rho, std::fabs(weights(d, d)));
  for (const auto& comp : cond.components) {
    if (comp.size() < 2) continue;
    const auto m = static_cast<Index>(comp.size());
    Eigen::MatrixXd block(m, m);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) block(a, b) = std::fabs(weights(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(b)]));
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(block, false);
    rho = std::max(rho, solver.eigenvalues().cwiseAbs().maxCoeff());
  }
  return rho;
}

double stabilize(WeightedNetwork& network) {
  const double rho = abs_spectral_radius(network.weights);
  if (rho < 1.0 - 1e-12) return 1.0;
  const double factor = 0.95 / rho;
  network.weights *= factor;
  return factor;
}

namespace {

Eigen::MatrixXd draw_noise(std::size_t n, std::size_t p, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::MatrixXd z(static_cast<Index>(n), static_cast<Index>(p));
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  }
  return z;
}

void require_stable(const WeightedNetwork& network) {
  const double rho = abs_spectral_radius(network.weights);
  if (network.cyclic && rho >= 1.0 - 1e-12) {
    throw Error(ErrorCode::SingularSystem, "spectral radius of |W| is " + std::to_string(rho) + " >= 1");
  }
}

// Rows of `rhs` times (I - W)^{-1}.
Eigen::MatrixXd solve_rows(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& rhs) {
  const Index p = weights.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(p, p) - weights;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.transpose());
  return lu.solve(rhs.transpose()).transpose();
}

}  // namespace

ExpressionDataset sample_sem(const WeightedNetwork& network, std::size_t n, double noise_sd, std::uint64_t seed,
                             double baseline) {
  if (!(noise_sd > 0.0)) throw Error(ErrorCode::ValueOutOfRange, "noise_sd must be positive");
  require_stable(network);
  const std::size_t p = network.p();
  std::mt19937_64 rng(derive_seed(seed, kStageSample, 0));
  Eigen::MatrixXd rhs = draw_noise(n, p, noise_sd, rng);
  rhs.array() += baseline;
  ExpressionDataset data;
  data.values = solve_rows(network.weights, rhs);
  data.gene_labels = network.labels;
  for (std::size_t i = 0; i < n; ++i) {
    data.sample_ids.push_back("S" + std::to_string(i + 1));
    data.conditions.push_back(Condition::wild_type());
  }
  return data;
}

InfluenceMatrix true_influence(const WeightedNetwork& network) {
  const DirectedGraph g = network.skeleton();
  InfluenceMatrix m = InfluenceMatrix::full(network.labels);
  const std::size_t p = g.node_count();
  std::vector<char> seen(p);
  std::vector<Node> queue;
  for (Node s = 0; s < p; ++s) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(g.out(s).begin(), g.out(s).end());
    for (Node v : queue) seen[v] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (Node w : g.out(queue[head])) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    for (Node v : queue) m.set(s, v, true);
  }
  return m;
}

ExpressionDataset simulate_perturbation_screen(const WeightedNetwork& network, std::size_t n_i, std::size_t n_0,
                                               double noise_sd, std::uint64_t seed, const ScreenOptions& options) {
  if (!(noise_sd > 0.0)) throw Error(ErrorCode::ValueOutOfRange, "noise_sd must be positive");
  require_stable(network);
  const std::size_t p = network.p();
  const Index pp = static_cast<Index>(p);
  std::vector<Node> targets = options.targets.empty() ? identity_priority(p) : options.targets;

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(pp, pp) - network.weights;
  const Eigen::MatrixXd inverse = system.partialPivLu().inverse();

  ExpressionDataset data;
  data.gene_labels = network.labels;
  data.values.resize(static_cast<Index>(n_0 + n_i * targets.size()), pp);
  Index row = 0;

  {
    std::mt19937_64 rng(derive_seed(seed, kStageScreen, 0));
    Eigen::MatrixXd rhs = draw_noise(n_0, p, noise_sd, rng);
    rhs.array() += options.baseline;
    data.values.middleRows(row, static_cast<Index>(n_0)) = rhs * inverse;
    for (std::size_t s = 0; s < n_0; ++s) {
      data.sample_ids.push_back("WT_" + std::to_string(s + 1));
      data.conditions.push_back(Condition::wild_type());
    }
    row += static_cast<Index>(n_0);
  }

  // Cutting gene g's inputs is the rank-one update (I - W) + W e_g e_g^T;
  // Sherman-Morrison gives its inverse from the wild-type one.
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Node g = targets[t];
    if (g >= p) throw Error(ErrorCode::ValueOutOfRange, "knockout target out of range");
    std::mt19937_64 rng(derive_seed(seed, kStageScreen, t + 1));
    Eigen::MatrixXd rhs = draw_noise(n_i, p, noise_sd, rng);
    rhs.array() += options.baseline;
    rhs.col(g).setConstant(options.knockout_level);
    const Eigen::VectorXd minv_u = inverse * network.weights.col(g);
    const double denom = 1.0 + minv_u(g);
    if (std::fabs(denom) < 1e-12) throw Error(ErrorCode::SingularSystem, "knockout system is singular");
    const Eigen::MatrixXd base = rhs * inverse;
    const Eigen::VectorXd proj = base * network.weights.col(g);
    Eigen::MatrixXd ko = base - (proj / denom) * inverse.row(g);
    ko.col(g).setConstant(options.knockout_level);
    data.values.middleRows(row, static_cast<Index>(n_i)) = ko;
    for (std::size_t s = 0; s < n_i; ++s) {
      data.sample_ids.push_back("KO_" + network.labels[g] + "_" + std::to_string(s + 1));
      data.conditions.push_back(Condition::knockout_of(g));
    }
    row += static_cast<Index>(n_i);
  }
  return data;
}

InfluenceMatrix perturb_influence(const InfluenceMatrix& influence, const NoiseSpec& spec, NoiseReport* report) {
  for (double r : {spec.fp_rate, spec.fn_rate, spec.reverse_prop}) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::ValueOutOfRange, "noise rates must lie in [0,1]");
  }
  std::mt19937_64 rng(spec.seed);
  InfluenceMatrix out = influence;
  out.pvalues.reset();
  NoiseReport rep;

  std::vector<std::pair<std::size_t, Node>> flippable;
  std::size_t present = 0;
  for (std::size_t r = 0; r < out.k(); ++r) {
    for (Node j = 0; j < out.p(); ++j) {
      if (!out.at(r, j)) continue;
      ++present;
      if (out.row_of(j)) flippable.emplace_back(r, j);
    }
  }
  const auto to_flip = std::min<std::size_t>(
      flippable.size(), static_cast<std::size_t>(std::llround(spec.reverse_prop * static_cast<double>(present))));
  std::shuffle(flippable.begin(), flippable.end(), rng);
  for (std::size_t t = 0; t < to_flip; ++t) {
    const auto [r, j] = flippable[t];
    out.set(r, j, false);
    out.set(*out.row_of(j), out.perturbed[r], true);
  }
  rep.reversed = to_flip;

  rep.expected_false_negatives = spec.fn_rate * static_cast<double>(out.edge_count());
  rep.expected_false_positives = spec.fp_rate * static_cast<double>(absent_cells(out));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const InfluenceMatrix base = out;
  for (std::size_t r = 0; r < out.k(); ++r) {
    for (Node j = 0; j < out.p(); ++j) {
      if (j == out.perturbed[r]) continue;
      const double draw = u01(rng);
      if (base.at(r, j)) {
        if (draw < spec.fn_rate) {
          out.set(r, j, false);
          ++rep.false_negatives;
        }
      } else if (draw < spec.fp_rate) {
        out.set(r, j, true);
        ++rep.false_positives;
      }
    }
  }
  if (report) *report = rep;
  return out;
}

std::size_t absent_cells(const InfluenceMatrix& influence) {
  return influence.k() * (influence.p() - 1) - influence.edge_count();
}

double calibrate_fp_rate(const InfluenceMatrix& influence, double expected_false_edges) {
  const auto absent = absent_cells(influence);
  if (absent == 0) throw Error(ErrorCode::InfeasibleTarget, "no absent cells to perturb");
  const double rate = expected_false_edges / static_cast<double>(absent);
  if (rate > 1.0) throw Error(ErrorCode::InfeasibleTarget, "requested false-positive count exceeds absent cells");
  return rate;
}

double calibrate_fn_rate(const InfluenceMatrix& influence, double expected_false_edges) {
  const auto present = influence.edge_count();
  if (present == 0) throw Error(ErrorCode::InfeasibleTarget, "no edges to remove");
  const double rate = expected_false_edges / static_cast<double>(present);
  if (rate > 1.0) throw Error(ErrorCode::InfeasibleTarget, "requested false-negative count exceeds edge count");
  return rate;
}

void write_network(std::ostream& out, const WeightedNetwork& network) {
  out << "source\ttarget\tweight\n" << std::setprecision(17);
  for (Index j = 0; j < network.weights.rows(); ++j) {
    for (Index i = 0; i < network.weights.cols(); ++i) {
      if (network.weights(j, i) != 0.0) {
        out << network.labels[static_cast<std::size_t>(j)] << '\t' << network.labels[static_cast<std::size_t>(i)]
            << '\t' << network.weights(j, i) << '\n';
      }
    }
  }
}

WeightedNetwork read_network(std::istream& in, const std::vector<std::string>& labels) {
  const auto index = label_index(labels);
  WeightedNetwork net = empty_network(labels.size(), false);
  net.labels = labels;
  tsv::LineReader reader(in);
  std::string line;
  bool header = false;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto f = tsv::split(line);
    if (!header) {
      header = true;
      if (f.size() >= 3 && tsv::trim(f[0]) == "source") continue;
      tsv::fail("network", reader.number(), "expected header 'source<TAB>target<TAB>weight'");
    }
    if (f.size() < 3) tsv::fail("network", reader.number(), "expected three columns");
    const auto a = index.find(std::string(tsv::trim(f[0])));
    const auto b = index.find(std::string(tsv::trim(f[1])));
    const auto w = tsv::parse_double(f[2]);
    if (a == index.end() || b == index.end()) tsv::fail("network", reader.number(), "unknown gene label");
    if (!w) tsv::fail("network", reader.number(), "weight is not a number");
    if (a->second != b->second) net.weights(a->second, b->second) = *w;
  }
  net.cyclic = component_size_summary(net.skeleton()).largest_scc >= 2;
  return net;
}

}  // namespace ripe
