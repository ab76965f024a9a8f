#include "ripe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ripe/error.hpp"
#include "ripe/hash.hpp"
#include "ripe/parallel.hpp"
#include "tsv.hpp"

namespace ripe {

using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kStageNetwork = 0x4e4554ULL;
constexpr std::uint64_t kStageWeights = 0x574754ULL;
constexpr std::uint64_t kStageSteady = 0x535459ULL;
constexpr std::uint64_t kStageScreen = 0x53434eULL;
constexpr std::uint64_t kStageEval = 0x45564cULL;

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    Preset small;
    small.name = "small20";
    small.p = 20;
    small.edges = 24;
    small.hubs = 3;
    small.weights = WeightSpec::constant(0.8);
    small.n = 50;
    v.push_back(small);

    Preset dag;
    dag.name = "dag100";
    dag.p = 100;
    dag.edges = 198;
    dag.hubs = 5;
    dag.weights = WeightSpec::constant(0.8);
    dag.n = 100;
    v.push_back(dag);

    Preset cyc;
    cyc.name = "cyclic1000";
    cyc.p = 1000;
    cyc.edges = 1984;
    cyc.cyclic = true;
    cyc.loops = 50;
    cyc.max_loop = 4;
    cyc.weights = WeightSpec::uniform(0.2, 0.8);
    cyc.n = 500;
    cyc.screen_replicates = 3;
    cyc.screen_wild_type = 10;
    v.push_back(cyc);
    return v;
  }();
  return all;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Fnv1a h;
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    h.bytes(buf, static_cast<std::size_t>(in.gcount()));
  }
  return hex64(h.value());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::string_view adjust_name(PAdjust a) { return a == PAdjust::None ? "none" : "bh"; }
std::string_view ttest_name(TTestKind k) { return k == TTestKind::Welch ? "welch" : "student"; }
std::string_view score_name(ScoreKind k) { return k == ScoreKind::Objective ? "objective" : "profile"; }

std::string_view strategy_name(OrderingStrategy s) {
  switch (s) {
    case OrderingStrategy::Auto: return "auto";
    case OrderingStrategy::Exhaustive: return "exhaustive";
    case OrderingStrategy::McDfs: return "mcdfs";
    case OrderingStrategy::PerSccMc: return "per_scc_mc";
  }
  return "auto";
}

template <typename Enum>
Enum parse_enum(const json& v, std::initializer_list<std::pair<std::string_view, Enum>> options, const char* key) {
  const auto s = v.get<std::string>();
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  throw Error(ErrorCode::Usage, std::string("invalid value '") + s + "' for " + key);
}

ExpressionDataset wild_type_only(const ExpressionDataset& data) {
  const auto rows = data.rows_where(Condition::wild_type());
  if (rows.size() == data.samples()) return data;
  ExpressionDataset out;
  out.gene_labels = data.gene_labels;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), data.values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = data.values.row(static_cast<Eigen::Index>(rows[r]));
    out.sample_ids.push_back(data.sample_ids[rows[r]]);
    out.conditions.push_back(Condition::wild_type());
  }
  if (rows.empty()) throw Error(ErrorCode::MissingWildType, "steady-state data has no wild-type samples");
  return out;
}

}  // namespace

const Preset& preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw Error(ErrorCode::Usage, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

WeightedNetwork preset_network(const Preset& preset, std::uint64_t seed) {
  const auto s = derive_seed(seed, kStageNetwork, 0);
  const auto skeleton = preset.cyclic ? random_feedback(preset.p, preset.edges, preset.loops, preset.max_loop, s)
                                      : random_dag(preset.p, preset.edges, preset.hubs, s);
  return assign_weights(skeleton, preset.weights, derive_seed(seed, kStageWeights, 0));
}

SimulatedData simulate_preset(const Preset& preset, std::uint64_t seed, bool with_screen) {
  SimulatedData sim;
  sim.network = preset_network(preset, seed);
  sim.influence = true_influence(sim.network);
  sim.steady = sample_sem(sim.network, preset.n, preset.noise_sd, derive_seed(seed, kStageSteady, 0));
  if (with_screen) {
    ScreenOptions opts;
    opts.baseline = preset.screen_baseline;
    sim.screen = simulate_perturbation_screen(sim.network, preset.screen_replicates, preset.screen_wild_type,
                                              preset.noise_sd, derive_seed(seed, kStageScreen, 0), opts);
  }
  return sim;
}

void validate(const RunConfig& cfg) {
  validate(cfg.lasso);
  if (!(cfg.q > 0.0 && cfg.q <= 1.0)) throw Error(ErrorCode::Usage, "q must lie in (0,1]");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) throw Error(ErrorCode::Usage, "tau must lie in (0,1]");
  if (!(cfg.cutoff > 0.0 && cfg.cutoff <= 1.0)) throw Error(ErrorCode::Usage, "cutoff must lie in (0,1]");
  if (cfg.m && *cfg.m == 0) throw Error(ErrorCode::Usage, "m must be positive");
  if (cfg.workers == 0) throw Error(ErrorCode::Usage, "workers must be positive");
}

std::size_t effective_m(const RunConfig& cfg, std::size_t p) {
  if (cfg.m) return *cfg.m;
  return p <= 1000 ? 1000 : 10000;
}

RunConfig run_config_from_json(std::string_view text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Usage, "config must be a JSON object");
  RunConfig c = std::move(base);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "perturbation") c.perturbation = v.get<std::string>();
      else if (key == "steady") c.steady = v.get<std::string>();
      else if (key == "gold") c.gold = v.get<std::string>();
      else if (key == "influence") c.influence = v.get<std::string>();
      else if (key == "orderings_file") c.orderings_file = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "cutoff") c.cutoff = v.get<double>();
      else if (key == "adjust") c.adjust = parse_enum<PAdjust>(v, {{"none", PAdjust::None}, {"bh", PAdjust::BenjaminiHochberg}}, "adjust");
      else if (key == "ttest") c.ttest = parse_enum<TTestKind>(v, {{"welch", TTestKind::Welch}, {"student", TTestKind::Student}}, "ttest");
      else if (key == "m") c.m = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
      else if (key == "exhaustive_max_scc") c.exhaustive_max_scc = v.get<std::size_t>();
      else if (key == "ordering_cap") c.ordering_cap = v.get<std::size_t>();
      else if (key == "strategy") {
        c.strategy = parse_enum<OrderingStrategy>(v,
                                                  {{"auto", OrderingStrategy::Auto},
                                                   {"exhaustive", OrderingStrategy::Exhaustive},
                                                   {"mcdfs", OrderingStrategy::McDfs},
                                                   {"per_scc_mc", OrderingStrategy::PerSccMc}},
                                                  "strategy");
      } else if (key == "q") c.q = v.get<double>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "workers") c.workers = v.get<std::size_t>();
      else if (key == "trials") c.trials = v.get<std::size_t>();
      else if (key == "dump_estimates") c.dump_estimates = v.get<bool>();
      else if (key == "lasso") {
        if (!v.is_object()) throw Error(ErrorCode::Usage, "lasso must be an object");
        for (const auto& [lk, lv] : v.items()) {
          if (lk == "alpha") c.lasso.alpha = lv.get<double>();
          else if (lk == "shrink") c.lasso.shrink = lv.get<double>();
          else if (lk == "tol") c.lasso.tol = lv.get<double>();
          else if (lk == "max_iter") c.lasso.max_iter = lv.get<std::size_t>();
          else if (lk == "center") c.lasso.center = lv.get<bool>();
          else if (lk == "standardize") c.lasso.standardize = lv.get<bool>();
          else if (lk == "score") c.lasso.score = parse_enum<ScoreKind>(lv, {{"objective", ScoreKind::Objective}, {"profile", ScoreKind::Profile}}, "score");
          else throw Error(ErrorCode::Usage, "unknown config key lasso." + lk);
        }
      } else {
        throw Error(ErrorCode::Usage, "unknown config key " + key);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("bad config value: ") + e.what());
  }
  return c;
}

namespace {

json config_json(const RunConfig& c, bool with_paths) {
  json j;
  if (with_paths) {
    j["perturbation"] = c.perturbation;
    j["steady"] = c.steady;
    j["gold"] = c.gold;
    j["influence"] = c.influence;
    j["orderings_file"] = c.orderings_file;
    j["out"] = c.out;
  }
  j["cutoff"] = c.cutoff;
  j["adjust"] = adjust_name(c.adjust);
  j["ttest"] = ttest_name(c.ttest);
  j["m"] = c.m ? json(*c.m) : json(nullptr);
  j["exhaustive_max_scc"] = c.exhaustive_max_scc;
  j["ordering_cap"] = c.ordering_cap;
  j["strategy"] = strategy_name(c.strategy);
  j["lasso"] = {{"alpha", c.lasso.alpha},           {"shrink", c.lasso.shrink},
                {"tol", c.lasso.tol},               {"max_iter", c.lasso.max_iter},
                {"center", c.lasso.center},         {"standardize", c.lasso.standardize},
                {"score", score_name(c.lasso.score)}};
  j["q"] = c.q;
  j["tau"] = c.tau;
  j["seed"] = c.seed;
  if (with_paths) j["workers"] = c.workers;
  j["trials"] = c.trials;
  j["dump_estimates"] = c.dump_estimates;
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg, true).dump(2); }

std::uint64_t run_config_hash(const RunConfig& cfg) {
  Fnv1a h;
  h.text(config_json(cfg, false).dump());
  return h.value();
}

ScoreSummary summarize_scores(const std::vector<DagEstimate>& estimates, double q) {
  ScoreSummary s;
  if (estimates.empty()) return s;
  std::vector<double> v;
  for (const auto& e : estimates) v.push_back(e.score);
  std::sort(v.begin(), v.end());
  const std::size_t M = v.size();
  s.min = v.front();
  s.median = M % 2 ? v[M / 2] : 0.5 * (v[M / 2 - 1] + v[M / 2]);
  const auto rank = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(q * static_cast<double>(M) - 1e-9)), 1, M);
  s.l_q = v[rank - 1];
  return s;
}

PipelineResult run_pipeline(const PipelineInputs& inputs, const RunConfig& cfg) {
  validate(cfg);
  PipelineResult res;
  auto stage = [&](const char* name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const Error& e) {
      throw Error(e.code(), std::string(name) + ": " + e.message());
    }
    res.timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  };

  const auto& labels = inputs.steady.gene_labels;
  const std::size_t p = labels.size();

  stage("influence", [&] {
    if (inputs.influence) {
      res.influence = *inputs.influence;
    } else if (inputs.perturbation) {
      res.influence = build_influence_matrix(*inputs.perturbation, cfg.cutoff, cfg.adjust, cfg.ttest, cfg.workers);
    } else {
      throw Error(ErrorCode::Usage, "either perturbation data or an influence matrix is required");
    }
    if (res.influence.gene_labels != labels) {
      throw Error(ErrorCode::GeneSetMismatch, "influence genes differ from steady-state genes");
    }
  });
  res.two_layer = res.influence.k() < p;

  stage("orderings", [&] {
    if (inputs.orderings) {
      res.universe.orderings = *inputs.orderings;
      return;
    }
    OrderingConfig oc;
    oc.strategy = cfg.strategy;
    oc.m = effective_m(cfg, p);
    oc.exhaustive_max_scc = cfg.exhaustive_max_scc;
    oc.cap = cfg.ordering_cap;
    oc.seed = cfg.seed;
    oc.workers = cfg.workers;
    const DirectedGraph graph = res.influence.graph();
    if (!res.two_layer) {
      res.universe = generate_orderings(graph, oc);
      return;
    }
    std::vector<Node> tfs = res.influence.perturbed;
    std::sort(tfs.begin(), tfs.end());
    res.universe = generate_orderings(graph.induced(tfs), oc);
    for (auto& o : res.universe.orderings) {
      for (auto& v : o.sequence) v = tfs[v];
    }
  });
  if (res.universe.orderings.empty()) throw Error(ErrorCode::EmptyInput, "orderings: no orderings to evaluate");

  stage("estimation", [&] {
    const DagEstimator estimator(wild_type_only(inputs.steady), res.influence, cfg.lasso);
    res.estimates = res.two_layer ? estimator.estimate_two_layer(res.universe.orderings, cfg.workers)
                                  : estimator.estimate_all(res.universe.orderings, cfg.workers);
  });

  stage("consensus", [&] {
    res.selected = select_top_orderings(res.estimates, cfg.q);
    res.consensus = build_consensus(res.estimates, res.selected);
    res.consensus.q = cfg.q;
    res.edges = threshold_edges(res.consensus, cfg.tau);
    res.scores = summarize_scores(res.estimates, cfg.q);
  });

  if (inputs.gold) {
    stage("evaluation", [&] {
      if (inputs.gold->labels() != labels) {
        throw Error(ErrorCode::LabelMismatch, "gold standard genes differ from steady-state genes");
      }
      const auto gold_edges = inputs.gold->edges();
      res.evaluation = precision_recall_f1(res.edges, gold_edges);
      if (cfg.trials > 0) {
        NullModel model{p, {}};
        if (res.two_layer) model.sources = res.influence.perturbed;
        res.significance = er_significance(res.edges, gold_edges, model, cfg.trials,
                                           derive_seed(cfg.seed, kStageEval, 0), cfg.workers);
      }
    });
  }
  return res;
}

std::vector<std::string> read_gene_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  tsv::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) tsv::fail(path.string(), 1, "empty file");
  const auto f = tsv::split(line);
  if (f.size() < 2 || tsv::trim(f[0]) != "sample_id" || tsv::trim(f[1]) != "condition") {
    tsv::fail(path.string(), reader.number(), "expected header 'sample_id<TAB>condition<TAB>genes...'");
  }
  std::vector<std::string> out;
  for (std::size_t i = 2; i < f.size(); ++i) out.emplace_back(tsv::trim(f[i]));
  return out;
}

std::string evaluation_json(const EvalReport& r, const std::optional<Significance>& sig) {
  json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  if (sig) {
    j["significance"] = {{"trials", sig->trials},
                         {"observed_tp", sig->observed_tp},
                         {"p_value", sig->p_value},
                         {"null_mean", sig->null_mean()}};
  }
  return j.dump(2);
}

std::string cmd_simulate(const std::string& preset_name, std::uint64_t seed, const std::filesystem::path& out,
                         bool with_screen) {
  const Preset& pr = preset(preset_name);
  const SimulatedData sim = simulate_preset(pr, seed, with_screen);
  std::filesystem::create_directories(out);
  json files = json::object();
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = out / name;
    {
      auto f = open_out(path);
      writer(f);
    }
    files[name] = file_digest(path);
  };
  emit("network.tsv", [&](std::ostream& f) { write_network(f, sim.network); });
  emit("gold.tsv", [&](std::ostream& f) { write_edge_list(f, sim.network.skeleton()); });
  emit("influence_true.tsv", [&](std::ostream& f) { write_influence(f, sim.influence); });
  emit("steady.tsv", [&](std::ostream& f) { write_expression(f, sim.steady); });
  if (sim.screen) emit("screen.tsv", [&](std::ostream& f) { write_expression(f, *sim.screen); });

  const auto sizes = component_size_summary(sim.network.skeleton());
  json m;
  m["command"] = "simulate";
  m["preset"] = pr.name;
  m["seed"] = seed;
  m["seeds"] = {{"network", derive_seed(seed, kStageNetwork, 0)},
                {"weights", derive_seed(seed, kStageWeights, 0)},
                {"steady", derive_seed(seed, kStageSteady, 0)},
                {"screen", derive_seed(seed, kStageScreen, 0)}};
  m["p"] = pr.p;
  m["edges"] = sim.network.edge_count();
  m["cyclic"] = sim.network.cyclic;
  m["largest_scc"] = sizes.largest_scc;
  m["spectral_radius"] = abs_spectral_radius(sim.network.weights);
  m["steady_samples"] = pr.n;
  m["influence_edges"] = sim.influence.edge_count();
  m["files"] = files;
  const std::string text = m.dump(2);
  auto f = open_out(out / "manifest.json");
  f << text << '\n';
  return text;
}

std::string cmd_run(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.steady.empty()) throw Error(ErrorCode::Usage, "a steady-state dataset is required");
  PipelineInputs in;
  const auto t0 = std::chrono::steady_clock::now();
  auto load = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw Error(e.code(), std::string("load ") + what + ": " + e.message());
    }
  };
  load("steady", [&] { in.steady = read_expression(std::filesystem::path(cfg.steady)); });
  const auto& labels = in.steady.gene_labels;
  if (!cfg.perturbation.empty()) {
    load("perturbation", [&] { in.perturbation = read_expression(std::filesystem::path(cfg.perturbation)); });
  }
  if (!cfg.influence.empty()) {
    load("influence", [&] { in.influence = read_influence(std::filesystem::path(cfg.influence), labels); });
  }
  if (!cfg.gold.empty()) {
    load("gold", [&] { in.gold = read_edge_list(std::filesystem::path(cfg.gold), &labels).graph; });
  }
  if (!cfg.orderings_file.empty()) {
    if (!in.influence) {
      if (!in.perturbation) throw Error(ErrorCode::Usage, "either perturbation data or an influence matrix is required");
      try {
        in.influence = build_influence_matrix(*in.perturbation, cfg.cutoff, cfg.adjust, cfg.ttest, cfg.workers);
      } catch (const Error& e) {
        throw Error(e.code(), std::string("influence: ") + e.message());
      }
    }
    load("orderings", [&] {
      std::vector<Node> tfs = in.influence->perturbed;
      std::sort(tfs.begin(), tfs.end());
      const bool subset = tfs.size() < labels.size();
      in.orderings = read_orderings(std::filesystem::path(cfg.orderings_file), labels, subset ? &tfs : nullptr);
    });
  }
  const double load_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const PipelineResult res = run_pipeline(in, cfg);

  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);
  json files = json::object();
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = out / name;
    {
      auto f = open_out(path);
      writer(f);
    }
    files[name] = file_digest(path);
  };
  emit("influence.tsv", [&](std::ostream& f) { write_influence(f, res.influence); });
  emit("orderings.txt", [&](std::ostream& f) {
    OrderingsHeader h;
    h.graph_hash = graph_hash(res.influence.graph());
    h.seed = cfg.seed;
    h.m = effective_m(cfg, labels.size());
    h.exhaustive = res.universe.exhaustive;
    write_orderings(f, res.universe.orderings, labels, h);
  });
  emit("scores.tsv", [&](std::ostream& f) {
    std::vector<char> chosen(res.estimates.size(), 0);
    for (auto s : res.selected) chosen[s] = 1;
    f << "ordering\tscore\tselected\n" << std::setprecision(17);
    for (std::size_t t = 0; t < res.estimates.size(); ++t) f << t << '\t' << res.estimates[t].score << '\t' << int(chosen[t]) << '\n';
  });
  emit("consensus.tsv", [&](std::ostream& f) { write_consensus(f, res.consensus, labels); });
  emit("edges.tsv", [&](std::ostream& f) { write_edge_list(f, graph_from_unique_edges(labels, res.edges)); });
  if (res.evaluation) {
    emit("evaluation.json", [&](std::ostream& f) { f << evaluation_json(*res.evaluation, res.significance) << '\n'; });
  }
  if (res.significance) emit("null_histogram.tsv", [&](std::ostream& f) { write_null_histogram(f, *res.significance); });
  if (cfg.dump_estimates) {
    std::filesystem::create_directories(out / "estimates");
    for (std::size_t t = 0; t < res.estimates.size(); ++t) {
      const auto& est = res.estimates[t];
      const std::string stem = "estimates/ordering_" + std::to_string(t);
      emit(stem + ".tsv", [&](std::ostream& f) { write_estimate(f, est, labels); });
      emit(stem + ".json", [&](std::ostream& f) {
        json side;
        side["ordering_id"] = t;
        side["score"] = est.score;
        side["config_hash"] = hex64(config_hash(cfg.lasso));
        side["converged"] = est.converged;
        side["edges"] = est.edges.size();
        f << side.dump(2) << '\n';
      });
    }
  }

  json m;
  m["command"] = "run";
  m["config"] = config_json(cfg, true);
  m["config_hash"] = hex64(run_config_hash(cfg));
  m["seeds"] = {{"run", cfg.seed}, {"orderings", cfg.seed}, {"evaluation", derive_seed(cfg.seed, kStageEval, 0)}};
  json timings = json::object();
  timings["load"] = load_seconds;
  for (const auto& t : res.timings) timings[t.stage] = t.seconds;
  m["timings_seconds"] = timings;
  std::size_t converged = 0;
  for (const auto& e : res.estimates) converged += e.converged;
  m["counts"] = {{"genes", labels.size()},
                 {"perturbed", res.influence.k()},
                 {"influence_edges", res.influence.edge_count()},
                 {"orderings", res.universe.orderings.size()},
                 {"exhaustive", res.universe.exhaustive},
                 {"two_layer", res.two_layer},
                 {"converged_estimates", converged},
                 {"selected", res.selected.size()},
                 {"consensus_edges", res.edges.size()}};
  m["scores"] = {{"min", res.scores.min}, {"median", res.scores.median}, {"l_q", res.scores.l_q}};
  if (res.evaluation) m["evaluation"] = json::parse(evaluation_json(*res.evaluation, res.significance));
  m["files"] = files;
  const std::string text = m.dump(2);
  auto f = open_out(out / "manifest.json");
  f << text << '\n';
  return text;
}

std::string cmd_evaluate(const EvaluateRequest& req) {
  std::vector<std::string> universe;
  if (req.genes) {
    universe = read_gene_labels(*req.genes);
  } else {
    // Gold labels first, then any new labels from the estimate.
    const auto gold = read_edge_list(req.gold).graph;
    const auto est = read_edge_list(req.estimate).graph;
    universe = gold.labels();
    auto index = label_index(universe);
    for (const auto& l : est.labels()) {
      if (index.emplace(l, static_cast<Node>(universe.size())).second) universe.push_back(l);
    }
  }
  const auto gold = read_edge_list(req.gold, &universe).graph;
  const auto est = read_edge_list(req.estimate, &universe).graph;
  const auto report = precision_recall_f1(est, gold);
  std::optional<Significance> sig;
  if (req.trials > 0) {
    NullModel model{universe.size(), {}};
    const auto index = label_index(universe);
    for (const auto& tf : req.tfs) {
      const auto it = index.find(tf);
      if (it == index.end()) throw Error(ErrorCode::LabelMismatch, "unknown TF label '" + tf + "'");
      model.sources.push_back(it->second);
    }
    std::sort(model.sources.begin(), model.sources.end());
    model.sources.erase(std::unique(model.sources.begin(), model.sources.end()), model.sources.end());
    sig = er_significance(est.edges(), gold.edges(), model, req.trials, req.seed, req.workers);
    if (req.histogram) {
      auto f = open_out(*req.histogram);
      write_null_histogram(f, *sig);
    }
  }
  return evaluation_json(report, sig);
}

}  // namespace ripe
