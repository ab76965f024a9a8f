#include "ripe/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "ripe/error.hpp"
#include "ripe/parallel.hpp"

namespace ripe {

namespace {

constexpr std::uint64_t kStageNull = 0x4e554c4cULL;

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

std::uint64_t key(const Edge& e) { return (static_cast<std::uint64_t>(e.first) << 32) | e.second; }

// Floyd's sampling of `count` distinct cells from [0, universe).
template <typename Fn>
void floyd_sample(std::uint64_t universe, std::size_t count, std::mt19937_64& rng, Fn&& emit) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  for (std::uint64_t j = universe - count; j < universe; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    const std::uint64_t pick = seen.insert(t).second ? t : (seen.insert(j), j);
    emit(pick);
  }
}

}  // namespace

EvalReport precision_recall_f1(std::span<const Edge> estimate, std::span<const Edge> truth) {
  const std::set<Edge> est(estimate.begin(), estimate.end());
  const std::set<Edge> gold(truth.begin(), truth.end());
  EvalReport r;
  for (const auto& e : est) {
    if (gold.count(e)) ++r.tp;
  }
  r.fp = est.size() - r.tp;
  r.fn = gold.size() - r.tp;
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EvalReport precision_recall_f1(const DirectedGraph& estimate, const DirectedGraph& truth) {
  if (estimate.labels() != truth.labels()) {
    throw Error(ErrorCode::LabelMismatch, "estimate and gold standard use different gene labels");
  }
  const auto a = estimate.edges();
  const auto b = truth.edges();
  return precision_recall_f1(a, b);
}

double Significance::null_mean() const {
  double s = 0.0;
  for (std::size_t t = 0; t < histogram.size(); ++t) s += static_cast<double>(t * histogram[t]);
  return trials == 0 ? 0.0 : s / static_cast<double>(trials);
}

std::vector<Edge> sample_null_graph(std::size_t edges, const NullModel& model, std::uint64_t seed) {
  const std::size_t p = model.p;
  std::vector<Node> sources = model.sources;
  if (sources.empty()) sources = identity_priority(p);
  for (Node s : sources) {
    if (s >= p) throw Error(ErrorCode::ValueOutOfRange, "null-model source out of range");
  }
  const std::uint64_t universe = p < 2 ? 0 : static_cast<std::uint64_t>(sources.size()) * (p - 1);
  if (edges > universe) {
    throw Error(ErrorCode::EdgeBudgetTooLarge, std::to_string(edges) + " edges requested but only " +
                                                   std::to_string(universe) + " cells are available");
  }
  std::mt19937_64 rng(seed);
  std::vector<Edge> out;
  out.reserve(edges);
  if (edges == 0) return out;
  floyd_sample(universe, edges, rng, [&](std::uint64_t c) {
    const Node s = sources[c / (p - 1)];
    auto t = static_cast<Node>(c % (p - 1));
    if (t >= s) ++t;
    out.emplace_back(s, t);
  });
  return out;
}

Significance er_significance(std::span<const Edge> estimate, std::span<const Edge> gold, const NullModel& model,
                             std::size_t trials, std::uint64_t seed, std::size_t workers) {
  if (trials == 0) throw Error(ErrorCode::ValueOutOfRange, "trials must be at least 1");
  const std::set<Edge> est(estimate.begin(), estimate.end());
  std::unordered_set<std::uint64_t> gold_keys;
  for (const auto& e : gold) gold_keys.insert(key(e));

  Significance sig;
  sig.trials = trials;
  for (const auto& e : est) sig.observed_tp += gold_keys.count(key(e));

  std::vector<std::size_t> tp(trials);
  // Validates the budget before spawning work.
  (void)sample_null_graph(0, model, seed);
  const std::size_t p = model.p;
  const std::size_t k = model.sources.empty() ? p : model.sources.size();
  if (p < 2 || est.size() > k * (p - 1)) {
    throw Error(ErrorCode::EdgeBudgetTooLarge, "estimate has more edges than the null model allows");
  }
  parallel_for(trials, workers, [&](std::size_t t) {
    const auto g = sample_null_graph(est.size(), model, derive_seed(seed, kStageNull, t));
    std::size_t hits = 0;
    for (const auto& e : g) hits += gold_keys.count(key(e));
    tp[t] = hits;
  });
  const std::size_t top = tp.empty() ? 0 : *std::max_element(tp.begin(), tp.end());
  sig.histogram.assign(std::max(top, sig.observed_tp) + 1, 0);
  std::size_t extreme = 0;
  for (std::size_t v : tp) {
    ++sig.histogram[v];
    if (v >= sig.observed_tp) ++extreme;
  }
  sig.p_value = static_cast<double>(extreme + 1) / static_cast<double>(trials + 1);
  return sig;
}

void write_null_histogram(std::ostream& out, const Significance& sig) {
  out << "true_positives\ttrials\n";
  for (std::size_t t = 0; t < sig.histogram.size(); ++t) out << t << '\t' << sig.histogram[t] << '\n';
}

}  // namespace ripe
