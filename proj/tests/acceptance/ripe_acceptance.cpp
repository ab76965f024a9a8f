// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "ripe/error.hpp"
#include "ripe/parallel.hpp"
#include "ripe/pipeline.hpp"

using namespace ripe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

DirectedGraph four_block_graph() {
  const std::vector<std::string> labels{"1", "2", "3", "4", "5", "6", "7"};
  DirectedGraph g(labels);
  const auto idx = label_index(labels);
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"1", "5"}, {"5", "6"}, {"6", "5"}, {"6", "2"}, {"2", "3"}, {"3", "4"}, {"4", "2"}, {"4", "7"}}) {
    g.add_edge(idx.at(a), idx.at(b));
  }
  return g;
}

Outcome ordering_universe() {
  const auto g = four_block_graph();
  OrderingConfig cfg;
  cfg.strategy = OrderingStrategy::Exhaustive;
  const auto u = generate_orderings(g, cfg);
  const std::set<std::string> want{"1562347", "1564237", "1563427", "1652347", "1654237", "1653427"};
  std::set<std::string> got;
  for (const auto& o : u.orderings) {
    std::string s;
    for (Node v : o.sequence) s += g.label(v);
    got.insert(s);
  }
  const bool ok = got == want && u.orderings.size() == 6 && u.exhaustive;
  return {ok, fmt("%zu orderings, %zu distinct, match=%d", u.orderings.size(), got.size(), got == want)};
}

PipelineResult run_with(const ExpressionDataset& steady, const InfluenceMatrix& influence, const DirectedGraph& gold,
                        const RunConfig& cfg, std::optional<std::vector<CausalOrdering>> orderings = std::nullopt) {
  PipelineInputs in;
  in.steady = steady;
  in.influence = influence;
  in.gold = gold;
  in.orderings = std::move(orderings);
  return run_pipeline(in, cfg);
}

Outcome small_dag() {
  const Preset& pr = preset("small20");
  const auto net = preset_network(pr, 1);
  const auto influence = true_influence(net);
  const auto gold = net.skeleton();
  RunConfig cfg;
  cfg.workers = default_workers();
  double sum = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto steady = sample_sem(net, pr.n, pr.noise_sd, derive_seed(1, 0xA2, r));
    sum += run_with(steady, influence, gold, cfg).evaluation->f1;
  }
  const double mean = sum / reps;
  return {mean >= 0.90, fmt("mean F1 %.4f over %d replicates (need >= 0.90)", mean, reps)};
}

// Noisy p=20 influence whose exhaustive universe is computable and non-trivial.
struct NoisyInstance {
  WeightedNetwork net;
  InfluenceMatrix influence;
  OrderingUniverse universe;
  std::uint64_t noise_seed = 0;
};

NoisyInstance noisy_small_instance() {
  const Preset& pr = preset("small20");
  NoisyInstance inst;
  inst.net = preset_network(pr, 1);
  const auto exact = true_influence(inst.net);
  OrderingConfig ocfg;
  ocfg.strategy = OrderingStrategy::Exhaustive;
  ocfg.cap = 20000;
  for (std::uint64_t s = 1; s < 10000; ++s) {
    NoiseSpec noise;
    noise.reverse_prop = 0.05;
    noise.fp_rate = calibrate_fp_rate(exact, 8);
    noise.seed = s;
    auto infl = perturb_influence(exact, noise);
    const auto g = infl.graph();
    const auto largest = scc_decompose(g).largest();
    if (largest < 3 || largest > 8) continue;
    auto u = generate_orderings(g, ocfg);
    if (!u.exhaustive || u.orderings.size() < 1000) continue;
    inst.influence = std::move(infl);
    inst.universe = std::move(u);
    inst.noise_seed = s;
    return inst;
  }
  throw Error(ErrorCode::InfeasibleTarget, "no noisy instance with a computable universe");
}

Outcome mc_dfs_sufficiency() {
  const Preset& pr = preset("small20");
  const auto inst = noisy_small_instance();
  const auto gold = inst.net.skeleton();
  RunConfig cfg;
  cfg.workers = default_workers();
  const int reps = 20;
  double mc_sum = 0.0, ex_sum = 0.0, abs_sum = 0.0;
  std::size_t mc_count = 0;
  for (int r = 0; r < reps; ++r) {
    const auto steady = sample_sem(inst.net, pr.n, pr.noise_sd, derive_seed(3, 0xA3, r));
    const auto mc = mc_dfs_sample(inst.influence.graph(), 200, derive_seed(3, 0xA30, r));
    mc_count += mc.size();
    const double f_mc = run_with(steady, inst.influence, gold, cfg, mc).evaluation->f1;
    const double f_ex = run_with(steady, inst.influence, gold, cfg, inst.universe.orderings).evaluation->f1;
    mc_sum += f_mc;
    ex_sum += f_ex;
    abs_sum += std::fabs(f_mc - f_ex);
  }
  const double diff = std::fabs(mc_sum - ex_sum) / reps;
  return {diff <= 0.05,
          fmt("universe %zu orderings (noise seed %llu), MC-DFS %.1f distinct of 200; mean F1 MC %.4f vs exhaustive "
              "%.4f, |diff| %.4f (need <= 0.05), mean per-replicate |diff| %.4f",
              inst.universe.orderings.size(), static_cast<unsigned long long>(inst.noise_seed),
              static_cast<double>(mc_count) / reps, mc_sum / reps, ex_sum / reps, diff, abs_sum / reps)};
}

Outcome noise_ladder() {
  const Preset& pr = preset("dag100");
  const auto net = preset_network(pr, 1);
  const auto exact = true_influence(net);
  const auto gold = net.skeleton();
  RunConfig cfg;
  cfg.workers = default_workers();
  const int reps = 10;
  double clean = 0.0, noisy = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto steady = sample_sem(net, pr.n, pr.noise_sd, derive_seed(4, 0xA4, r));
    clean += run_with(steady, exact, gold, cfg).evaluation->f1;
    NoiseSpec noise;
    noise.fp_rate = calibrate_fp_rate(exact, 75);
    noise.seed = derive_seed(4, 0xA40, r);
    noisy += run_with(steady, perturb_influence(exact, noise), gold, cfg).evaluation->f1;
  }
  clean /= reps;
  noisy /= reps;
  const bool ok = clean >= 0.90 && noisy >= 0.70 && noisy < clean;
  return {ok, fmt("no-error mean F1 %.4f (need >= 0.90); 75-false-positive mean F1 %.4f (need >= 0.70 and below "
                  "no-error)",
                  clean, noisy)};
}

Outcome cyclic_large() {
  const Preset& pr = preset("cyclic1000");
  RunConfig cfg;
  cfg.workers = default_workers();
  cfg.strategy = OrderingStrategy::McDfs;
  cfg.m = 1000;
  cfg.lasso.standardize = true;
  const int reps = 3;
  double f1 = 0.0, precision = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto sim = simulate_preset(pr, derive_seed(5, 0xA5, r), false);
    const auto res = run_with(sim.steady, sim.influence, sim.network.skeleton(), cfg);
    f1 += res.evaluation->f1;
    precision += res.evaluation->precision;
  }
  f1 /= reps;
  precision /= reps;
  return {f1 >= 0.50 && precision >= 0.70,
          fmt("mean F1 %.4f (need >= 0.50), mean precision %.4f (need >= 0.70), %zu workers", f1, precision,
              cfg.workers)};
}

Outcome solver_correctness() {
  std::mt19937_64 rng(6);
  LassoConfig raw;
  raw.center = false;
  double worst_oracle = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = 1 + t % 3, n = 5 + static_cast<Eigen::Index>(rng() % 16);
    Eigen::MatrixXd X = testing::randn(n, m, rng);
    if (t % 4 == 0 && m > 1) X.col(1) = 0.9 * X.col(0) + 0.1 * X.col(1);
    const Eigen::VectorXd y = X * testing::randn(m, 1, rng).col(0) + 0.5 * testing::randn(n, 1, rng).col(0);
    const double lambda = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const auto got = lasso_solve(y, X, lambda, raw);
    worst_oracle = std::max(worst_oracle, (got.coefficients - testing::sign_pattern_oracle(y, X, lambda)).cwiseAbs().maxCoeff());
  }
  double worst_kkt = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 50), n = 20 + static_cast<Eigen::Index>(rng() % 100);
    Eigen::MatrixXd X = testing::randn(n, m, rng);
    for (Eigen::Index j = 1; j < m; j += 3) X.col(j) += 0.7 * X.col(j - 1);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; j += 4) beta(j) = 1.0 - 0.1 * (j % 7);
    const Eigen::VectorXd y = X * beta + testing::randn(n, 1, rng).col(0);
    const double lambda = std::uniform_real_distribution<double>(0.02, 0.5)(rng);
    const auto r = lasso_solve(y, X, lambda, raw);
    const Eigen::VectorXd grad = 2.0 / static_cast<double>(n) * X.transpose() * (y - X * r.coefficients);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double th = r.coefficients(j);
      const double v = th != 0.0 ? std::fabs(grad(j) - lambda * (th > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::fabs(grad(j)) - lambda);
      worst_kkt = std::max(worst_kkt, v);
    }
  }
  return {worst_oracle <= 1e-6 && worst_kkt <= 1e-6,
          fmt("max oracle deviation %.2e, max KKT residual %.2e (need <= 1e-6)", worst_oracle, worst_kkt)};
}

Outcome influence_sufficiency() {
  std::mt19937_64 rng(7);
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 2 + rng() % 9;
    const auto net = random_dag(p, rng() % (p * (p - 1) / 2 + 1), 1, rng());
    OrderingConfig cfg;
    cfg.strategy = OrderingStrategy::Exhaustive;
    const auto u = generate_orderings(true_influence(net).graph(), cfg);
    bool ok = u.orderings.size() == 1;
    if (ok) {
      std::vector<std::size_t> pos(p);
      for (std::size_t k = 0; k < p; ++k) pos[u.orderings[0].sequence[k]] = k;
      for (const auto& [a, b] : net.skeleton().edges()) ok &= pos[a] < pos[b];
    }
    good += ok;
  }
  WeightedNetwork chain, extra;
  chain.labels = extra.labels = gene_labels(3);
  chain.weights = Eigen::MatrixXd::Zero(3, 3);
  chain.weights(0, 1) = chain.weights(1, 2) = 1.0;
  extra.weights = chain.weights;
  extra.weights(0, 2) = 1.0;
  const bool same_influence = true_influence(chain).entries == true_influence(extra).entries;
  const bool different = chain.skeleton().edges() != extra.skeleton().edges();
  return {good == 100 && same_influence && different,
          fmt("%d/100 single topological orderings; pair equal influence=%d, unequal structure=%d", good,
              same_influence, different)};
}

DagEstimate member(std::size_t p, std::vector<WeightedEdge> edges) {
  DagEstimate e;
  e.p = p;
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return std::pair(a.target, a.source) < std::pair(b.target, b.source); });
  e.edges = std::move(edges);
  return e;
}

Outcome consensus_arithmetic() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 2 + rng() % 8, m = 1 + rng() % 12;
    std::vector<DagEstimate> members;
    std::vector<Eigen::MatrixXd> dense;
    for (std::size_t k = 0; k < m; ++k) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
      std::vector<WeightedEdge> edges;
      for (Node a = 0; a < p; ++a)
        for (Node b = 0; b < p; ++b)
          if (a != b && rng() % 3 == 0) {
            w(a, b) = u(rng);
            edges.push_back({a, b, w(a, b)});
          }
      members.push_back(member(p, edges));
      dense.push_back(w);
    }
    const auto c = build_consensus(members);
    bool ok = true;
    for (Node a = 0; a < p; ++a) {
      for (Node b = 0; b < p; ++b) {
        double count = 0, signs = 0, mag = 0;
        for (const auto& w : dense) {
          count += w(a, b) != 0.0;
          signs += (w(a, b) > 0) - (w(a, b) < 0);
          mag += std::fabs(w(a, b));
        }
        ok &= c.confidence(a, b) == count / m;
        ok &= c.sign(a, b) == static_cast<double>((signs > 0) - (signs < 0));
        ok &= std::fabs(c.magnitude(a, b) - mag / m) <= 1e-14;
      }
    }
    exact += ok;
  }
  const std::vector<DagEstimate> tie{member(2, {{0, 1, 0.5}}), member(2, {{0, 1, -0.5}})};
  const bool sign_zero = build_consensus(tie).sign(0, 1) == 0.0;
  std::vector<DagEstimate> four{member(3, {{0, 1, 1}}), member(3, {}), member(3, {}), member(3, {})};
  const bool boundary = threshold_edges(build_consensus(four), 0.25) == std::vector<Edge>{{0, 1}};
  return {exact == 100 && sign_zero && boundary,
          fmt("%d/100 brute-force matches, sgn(0) tie=%d, boundary tau=%d", exact, sign_zero, boundary)};
}

struct Criterion {
  const char* id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"A1", "ordering universe exactness", 1.0, ordering_universe},
      {"A2", "small DAG benchmark", 120.0, small_dag},
      {"A3", "MC-DFS sufficiency", 300.0, mc_dfs_sufficiency},
      {"A4", "p=100 noise ladder", 900.0, noise_ladder},
      {"A5", "cyclic p=1000", 1800.0, cyclic_large},
      {"A6", "solver correctness", 60.0, solver_correctness},
      {"A7", "influence sufficiency properties", 10.0, influence_sufficiency},
      {"A8", "consensus arithmetic", 5.0, consensus_arithmetic},
  };
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) only.insert(argv[i]);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %s - %s: %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
