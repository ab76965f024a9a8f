// Command-line front end: simulate, scan, influence, orderings, run, evaluate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ripe/error.hpp"
#include "ripe/kernels.hpp"
#include "ripe/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ripe;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  std::string config;
  std::string simd;
};

// Writes to `path`, or stdout when empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  fn(f);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

PAdjust parse_adjust(const std::string& s) {
  if (s == "none") return PAdjust::None;
  if (s == "bh") return PAdjust::BenjaminiHochberg;
  throw Error(ErrorCode::Usage, "--adjust must be none or bh");
}

TTestKind parse_ttest(const std::string& s) {
  if (s == "welch") return TTestKind::Welch;
  if (s == "student") return TTestKind::Student;
  throw Error(ErrorCode::Usage, "--ttest must be welch or student");
}

OrderingStrategy parse_strategy(const std::string& s) {
  if (s == "auto") return OrderingStrategy::Auto;
  if (s == "exhaustive") return OrderingStrategy::Exhaustive;
  if (s == "mcdfs") return OrderingStrategy::McDfs;
  if (s == "per_scc_mc") return OrderingStrategy::PerSccMc;
  throw Error(ErrorCode::Usage, "--strategy must be auto, exhaustive, mcdfs or per_scc_mc");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regulatory network reconstruction from perturbation screens and steady-state expression"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads")->capture_default_str();
  app.add_option("--out", g.out, "Output directory (simulate, run) or file (other verbs; default stdout)");
  app.add_option("--config", g.config, "JSON run configuration; flags override its values");
  app.add_option("--simd", g.simd, "Force kernel variant: scalar, avx2 or neon");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic network and datasets from a preset");
  std::string preset_name;
  bool no_screen = false;
  sim->add_option("--preset", preset_name, "small20, dag100 or cyclic1000")->required();
  sim->add_flag("--no-screen", no_screen, "Skip the knockout screen");

  // scan
  auto* scan = app.add_subcommand("scan", "Influence-graph size versus p-value cutoff");
  std::string scan_data, scan_grid, scan_adjust = "none", scan_ttest = "welch";
  scan->add_option("--perturbation", scan_data, "Perturbation screen TSV")->required();
  scan->add_option("--grid", scan_grid, "Comma-separated cutoffs (default: 40 log-spaced in [1e-6, 0.1])");
  scan->add_option("--adjust", scan_adjust, "none or bh")->capture_default_str();
  scan->add_option("--ttest", scan_ttest, "welch or student")->capture_default_str();

  // influence
  auto* infl = app.add_subcommand("influence", "Threshold t-test p-values into an influence matrix");
  std::string infl_data, infl_adjust = "none", infl_ttest = "welch";
  double infl_cutoff = 0.05;
  infl->add_option("--perturbation", infl_data, "Perturbation screen TSV")->required();
  infl->add_option("--cutoff", infl_cutoff, "p-value cutoff")->capture_default_str();
  infl->add_option("--adjust", infl_adjust, "none or bh")->capture_default_str();
  infl->add_option("--ttest", infl_ttest, "welch or student")->capture_default_str();

  // orderings
  auto* ord = app.add_subcommand("orderings", "Generate causal orderings from an influence matrix");
  std::string ord_influence, ord_genes, ord_strategy = "auto";
  std::size_t ord_m = 1000, ord_max_scc = 10, ord_cap = 10000;
  ord->add_option("--influence", ord_influence, "Influence edge list")->required();
  ord->add_option("--genes", ord_genes, "Expression TSV whose header defines the genes")->required();
  ord->add_option("--strategy", ord_strategy, "auto, exhaustive, mcdfs or per_scc_mc")->capture_default_str();
  ord->add_option("--m", ord_m, "MC-DFS runs")->capture_default_str();
  ord->add_option("--exhaustive-max-scc", ord_max_scc, "Largest SCC enumerated exhaustively")->capture_default_str();
  ord->add_option("--cap", ord_cap, "Maximum number of composed orderings")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "Full pipeline: influence, orderings, estimates, consensus");
  std::string r_steady, r_pert, r_infl, r_orders, r_gold, r_strategy, r_adjust, r_ttest, r_score;
  double r_cutoff = 0, r_q = 0, r_tau = 0, r_alpha = 0, r_shrink = 0;
  std::size_t r_m = 0, r_trials = 0, r_max_scc = 0;
  bool r_standardize = false, r_dump = false;
  run->add_option("--steady", r_steady, "Steady-state expression TSV");
  run->add_option("--perturbation", r_pert, "Perturbation screen TSV");
  run->add_option("--influence", r_infl, "Precomputed influence edge list");
  run->add_option("--orderings-file", r_orders, "Supplied orderings; skips ordering generation");
  run->add_option("--gold", r_gold, "Gold-standard edge list for evaluation");
  run->add_option("--cutoff", r_cutoff, "p-value cutoff (default 0.05)");
  run->add_option("--adjust", r_adjust, "none or bh");
  run->add_option("--ttest", r_ttest, "welch or student");
  run->add_option("--strategy", r_strategy, "auto, exhaustive, mcdfs or per_scc_mc");
  run->add_option("--m", r_m, "Ordering budget (default 1000, or 10000 above 1000 genes)");
  run->add_option("--exhaustive-max-scc", r_max_scc, "Largest SCC enumerated exhaustively (default 10)");
  run->add_option("--q", r_q, "Fraction of best-scoring orderings kept (default 0.1)");
  run->add_option("--tau", r_tau, "Consensus confidence threshold (default 0.25)");
  run->add_option("--alpha", r_alpha, "Penalty error-rate parameter (default 0.1)");
  run->add_option("--shrink", r_shrink, "Penalty multiplier (default 0.6)");
  run->add_option("--score", r_score, "objective or profile");
  run->add_flag("--standardize", r_standardize, "Scale columns to unit variance");
  run->add_option("--trials", r_trials, "Random-graph significance trials (default 0: skip)");
  run->add_flag("--dump-estimates", r_dump, "Write every per-ordering estimate");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Precision, recall, F1 and random-graph significance");
  std::string ev_est, ev_gold, ev_genes, ev_tfs, ev_hist;
  std::size_t ev_trials = 10000;
  ev->add_option("--estimate", ev_est, "Estimated edge list")->required();
  ev->add_option("--gold", ev_gold, "Gold-standard edge list")->required();
  ev->add_option("--genes", ev_genes, "Expression TSV whose header defines the gene universe");
  ev->add_option("--tfs", ev_tfs, "Comma-separated perturbed genes; restricts null-model sources");
  ev->add_option("--trials", ev_trials, "Random graphs (0 skips)")->capture_default_str();
  ev->add_option("--histogram", ev_hist, "Write the null histogram TSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorCategory::Usage);
  }

  try {
    if (g.workers == 0) throw Error(ErrorCode::Usage, "--workers must be positive");
    if (!g.simd.empty()) {
      if (g.simd == "scalar") kernels::set_isa(kernels::Isa::Scalar);
      else if (g.simd == "avx2") kernels::set_isa(kernels::Isa::Avx2);
      else if (g.simd == "neon") kernels::set_isa(kernels::Isa::Neon);
      else throw Error(ErrorCode::Usage, "--simd must be scalar, avx2 or neon");
    }

    if (*sim) {
      const std::string out = g.out.empty() ? "ripe_sim" : g.out;
      std::cout << cmd_simulate(preset_name, g.seed, out, !no_screen) << '\n';
    } else if (*scan) {
      const auto data = read_expression(fs::path(scan_data));
      std::vector<double> grid;
      if (scan_grid.empty()) {
        grid = default_cutoff_grid();
      } else {
        for (const auto& s : split_list(scan_grid)) {
          try {
            grid.push_back(std::stod(s));
          } catch (const std::exception&) {
            throw Error(ErrorCode::Usage, "bad cutoff '" + s + "' in --grid");
          }
        }
      }
      const auto rows = cutoff_scan(data, grid, parse_adjust(scan_adjust), parse_ttest(scan_ttest), g.workers);
      with_output(g.out, [&](std::ostream& o) { write_scan(o, rows); });
    } else if (*infl) {
      const auto data = read_expression(fs::path(infl_data));
      const auto m = build_influence_matrix(data, infl_cutoff, parse_adjust(infl_adjust), parse_ttest(infl_ttest),
                                            g.workers);
      with_output(g.out, [&](std::ostream& o) { write_influence(o, m); });
    } else if (*ord) {
      const auto genes = read_gene_labels(ord_genes);
      const auto m = read_influence(fs::path(ord_influence), genes);
      OrderingConfig oc;
      oc.strategy = parse_strategy(ord_strategy);
      oc.m = ord_m;
      oc.exhaustive_max_scc = ord_max_scc;
      oc.cap = ord_cap;
      oc.seed = g.seed;
      oc.workers = g.workers;
      auto tfs = m.perturbed;
      std::sort(tfs.begin(), tfs.end());
      const auto graph = m.graph();
      OrderingUniverse u;
      if (tfs.size() < genes.size()) {
        u = generate_orderings(graph.induced(tfs), oc);
        for (auto& o : u.orderings) {
          for (auto& v : o.sequence) v = tfs[v];
        }
      } else {
        u = generate_orderings(graph, oc);
      }
      OrderingsHeader h{graph_hash(graph), g.seed, ord_m, u.exhaustive};
      with_output(g.out, [&](std::ostream& o) { write_orderings(o, u.orderings, genes, h); });
    } else if (*run) {
      RunConfig cfg;
      if (!g.config.empty()) cfg = run_config_from_json(slurp(g.config), cfg);
      auto given = [&](const char* name) { return run->count(name) > 0; };
      if (app.count("--seed")) cfg.seed = g.seed;
      if (app.count("--workers")) cfg.workers = g.workers;
      if (app.count("--out")) cfg.out = g.out;
      if (given("--steady")) cfg.steady = r_steady;
      if (given("--perturbation")) cfg.perturbation = r_pert;
      if (given("--influence")) cfg.influence = r_infl;
      if (given("--orderings-file")) cfg.orderings_file = r_orders;
      if (given("--gold")) cfg.gold = r_gold;
      if (given("--cutoff")) cfg.cutoff = r_cutoff;
      if (given("--adjust")) cfg.adjust = parse_adjust(r_adjust);
      if (given("--ttest")) cfg.ttest = parse_ttest(r_ttest);
      if (given("--strategy")) cfg.strategy = parse_strategy(r_strategy);
      if (given("--m")) cfg.m = r_m;
      if (given("--exhaustive-max-scc")) cfg.exhaustive_max_scc = r_max_scc;
      if (given("--q")) cfg.q = r_q;
      if (given("--tau")) cfg.tau = r_tau;
      if (given("--alpha")) cfg.lasso.alpha = r_alpha;
      if (given("--shrink")) cfg.lasso.shrink = r_shrink;
      if (given("--score")) {
        if (r_score == "objective") cfg.lasso.score = ScoreKind::Objective;
        else if (r_score == "profile") cfg.lasso.score = ScoreKind::Profile;
        else throw Error(ErrorCode::Usage, "--score must be objective or profile");
      }
      if (r_standardize) cfg.lasso.standardize = true;
      if (given("--trials")) cfg.trials = r_trials;
      if (r_dump) cfg.dump_estimates = true;
      std::cout << cmd_run(cfg) << '\n';
    } else if (*ev) {
      EvaluateRequest req;
      req.estimate = ev_est;
      req.gold = ev_gold;
      if (!ev_genes.empty()) req.genes = ev_genes;
      req.tfs = split_list(ev_tfs);
      req.trials = ev_trials;
      req.seed = g.seed;
      req.workers = g.workers;
      if (!ev_hist.empty()) req.histogram = ev_hist;
      const auto report = cmd_evaluate(req);
      with_output(g.out, [&](std::ostream& o) { o << report << '\n'; });
    }
  } catch (const Error& e) {
    std::cerr << "ripe: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ripe: IoError: " << e.what() << '\n';
    return exit_code(ErrorCategory::Data);
  } catch (const std::bad_alloc&) {
    std::cerr << "ripe: out of memory\n";
    return exit_code(ErrorCategory::Numerical);
  } catch (const std::exception& e) {
    std::cerr << "ripe: " << e.what() << '\n';
    return exit_code(ErrorCategory::Data);
  }
  return 0;
}
