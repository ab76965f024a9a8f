#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ripe/consensus.hpp"
#include "ripe/estimator.hpp"
#include "ripe/expression.hpp"
#include "ripe/influence.hpp"
#include "ripe/metrics.hpp"
#include "ripe/orderings.hpp"
#include "ripe/sem.hpp"

namespace ripe {

// Synthetic benchmark settings.
struct Preset {
  std::string name;
  std::size_t p = 0;
  std::size_t edges = 0;
  std::size_t hubs = 0;
  bool cyclic = false;
  std::size_t loops = 0;     // feedback loops in a cyclic preset
  std::size_t max_loop = 4;  // longest feedback cycle
  WeightSpec weights;
  std::size_t n = 0;  // steady-state samples
  double noise_sd = 1.0;
  std::size_t screen_replicates = 5;  // per knockout
  std::size_t screen_wild_type = 5;
  double screen_baseline = 5.0;
};

// Throws Error(Usage) for unknown names.
const Preset& preset(std::string_view name);
std::vector<std::string> preset_names();

struct SimulatedData {
  WeightedNetwork network;
  InfluenceMatrix influence;  // exact
  ExpressionDataset steady;
  std::optional<ExpressionDataset> screen;
};

WeightedNetwork preset_network(const Preset& preset, std::uint64_t seed);
SimulatedData simulate_preset(const Preset& preset, std::uint64_t seed, bool with_screen = true);

struct RunConfig {
  std::string perturbation;
  std::string steady;
  std::string gold;
  std::string influence;       // precomputed influence edge list
  std::string orderings_file;  // supplied orderings; skips ordering generation
  std::string out = "ripe_out";

  double cutoff = 0.05;
  PAdjust adjust = PAdjust::None;
  TTestKind ttest = TTestKind::Welch;

  std::optional<std::size_t> m;  // 1000 for p <= 1000, else 10000
  std::size_t exhaustive_max_scc = 10;
  std::size_t ordering_cap = 10000;
  OrderingStrategy strategy = OrderingStrategy::Auto;

  LassoConfig lasso;
  double q = 0.1;
  double tau = 0.25;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t trials = 0;  // significance trials; 0 skips
  bool dump_estimates = false;
};

void validate(const RunConfig& cfg);
std::size_t effective_m(const RunConfig& cfg, std::size_t p);

// Keys mirror the field names; "lasso" is a nested object. Unknown keys and
// wrong types raise Error(Usage). Values not present keep those of `base`.
RunConfig run_config_from_json(std::string_view text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& cfg);
// Hash of the settings that determine outputs (paths, out dir and worker count excluded).
std::uint64_t run_config_hash(const RunConfig& cfg);

struct PipelineInputs {
  std::optional<ExpressionDataset> perturbation;
  ExpressionDataset steady;
  std::optional<InfluenceMatrix> influence;
  std::optional<std::vector<CausalOrdering>> orderings;  // over perturbed genes when k < p
  std::optional<DirectedGraph> gold;                     // labels must match the steady data
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ScoreSummary {
  double min = 0.0;
  double median = 0.0;
  double l_q = 0.0;
};

struct PipelineResult {
  InfluenceMatrix influence;
  OrderingUniverse universe;
  bool two_layer = false;
  std::vector<DagEstimate> estimates;
  std::vector<std::size_t> selected;
  ConsensusNetwork consensus;
  std::vector<Edge> edges;
  ScoreSummary scores;
  std::optional<EvalReport> evaluation;
  std::optional<Significance> significance;
  std::vector<StageTiming> timings;
};

// Influence -> orderings -> per-ordering estimates -> consensus -> optional
// evaluation. Errors are rethrown with the failing stage's name prefixed.
PipelineResult run_pipeline(const PipelineInputs& inputs, const RunConfig& cfg);

ScoreSummary summarize_scores(const std::vector<DagEstimate>& estimates, double q);

// Gene labels from the header of an expression TSV.
std::vector<std::string> read_gene_labels(const std::filesystem::path& path);

std::string evaluation_json(const EvalReport& report, const std::optional<Significance>& significance);

// File-level commands. Each returns the JSON text it also writes (manifest or report).
std::string cmd_simulate(const std::string& preset_name, std::uint64_t seed, const std::filesystem::path& out,
                         bool with_screen);
std::string cmd_run(const RunConfig& cfg);

struct EvaluateRequest {
  std::filesystem::path estimate;
  std::filesystem::path gold;
  std::optional<std::filesystem::path> genes;  // expression TSV supplying the gene universe
  std::vector<std::string> tfs;                // null-model sources; empty = every gene
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> histogram;
};
std::string cmd_evaluate(const EvaluateRequest& request);

}  // namespace ripe
