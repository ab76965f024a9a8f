#include "ripe/orderings.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "ripe/error.hpp"
#include "ripe/hash.hpp"
#include "ripe/parallel.hpp"
#include "tsv.hpp"

namespace ripe {

namespace {

constexpr std::uint64_t kStageMcDfs = 0x4d43444653ULL;
constexpr std::uint64_t kStageCompose = 0x434f4d50ULL;

struct SequenceHash {
  std::size_t operator()(const std::vector<Node>& s) const {
    Fnv1a h;
    h.bytes(s.data(), s.size() * sizeof(Node));
    return static_cast<std::size_t>(h.value());
  }
};

class SccEnumerator {
 public:
  SccEnumerator(const DirectedGraph& g, std::size_t cap) : g_(g), cap_(cap), visited_(g.node_count(), 0) {}

  SccOrderings run() {
    for (Node start = 0; start < g_.node_count() && !stop_; ++start) {
      visited_[start] = 1;
      stack_.push_back(start);
      step();
      stack_.pop_back();
      visited_[start] = 0;
    }
    SccOrderings out;
    out.sequences.assign(found_.begin(), found_.end());
    out.cap_reached = stop_;
    return out;
  }

 private:
  void step() {
    if (stop_) return;
    if (stack_.empty()) {
      std::vector<Node> ordering(finish_.rbegin(), finish_.rend());
      if (found_.count(ordering)) return;
      if (found_.size() >= cap_) {
        stop_ = true;
        return;
      }
      found_.insert(std::move(ordering));
      return;
    }
    const Node top = stack_.back();
    bool advanced = false;
    for (Node u : g_.out(top)) {
      if (visited_[u]) continue;
      advanced = true;
      visited_[u] = 1;
      stack_.push_back(u);
      step();
      stack_.pop_back();
      visited_[u] = 0;
      if (stop_) return;
    }
    if (!advanced) {
      stack_.pop_back();
      finish_.push_back(top);
      step();
      finish_.pop_back();
      stack_.push_back(top);
    }
  }

  const DirectedGraph& g_;
  std::size_t cap_;
  std::vector<char> visited_;
  std::vector<Node> stack_;
  std::vector<Node> finish_;
  std::set<std::vector<Node>> found_;
  bool stop_ = false;
};

}  // namespace

SccOrderings enumerate_scc_orderings(const DirectedGraph& component, std::size_t cap) {
  if (component.node_count() == 0) throw Error(ErrorCode::NotStronglyConnected, "empty component");
  if (scc_decompose(component).components.size() != 1) {
    throw Error(ErrorCode::NotStronglyConnected, "component is not strongly connected");
  }
  if (cap == 0) return {{}, true};
  return SccEnumerator(component, cap).run();
}

std::vector<CausalOrdering> mc_dfs_sample(const DirectedGraph& graph, std::size_t m, std::uint64_t seed,
                                          std::size_t workers) {
  if (m == 0) throw Error(ErrorCode::ValueOutOfRange, "MC-DFS needs m >= 1");
  const DfsRunner runner(graph);
  const Condensation cond = scc_decompose(graph);
  const auto comp_order = topological_sort(cond.super_dag);
  std::vector<std::size_t> comp_start(cond.components.size() + 1, 0);
  for (std::size_t pos = 0; pos < comp_order.size(); ++pos) {
    comp_start[pos + 1] = comp_start[pos] + cond.components[comp_order[pos]].size();
  }
  std::vector<std::size_t> slot_of(cond.components.size());
  for (std::size_t pos = 0; pos < comp_order.size(); ++pos) slot_of[comp_order[pos]] = pos;

  std::vector<std::vector<Node>> runs(m);
  parallel_for(m, workers, [&](std::size_t run) {
    std::mt19937_64 rng(derive_seed(seed, kStageMcDfs, run));
    auto priority = identity_priority(graph.node_count());
    std::shuffle(priority.begin(), priority.end(), rng);
    // regroup by component, canonical component order, DFS order inside
    std::vector<std::size_t> fill(comp_start.begin(), comp_start.end() - 1);
    std::vector<Node> seq(graph.node_count());
    for (Node v : runner.ordering(priority)) seq[fill[slot_of[cond.component_of[v]]]++] = v;
    runs[run] = std::move(seq);
  });
  std::vector<CausalOrdering> out;
  std::unordered_set<std::vector<Node>, SequenceHash> seen;
  for (std::size_t run = 0; run < m; ++run) {
    if (!seen.insert(runs[run]).second) continue;
    out.push_back({std::move(runs[run]), OrderingSource::McDfs, run});
  }
  return out;
}

OrderingUniverse compose_universe(const Condensation& condensation,
                                  const std::vector<std::vector<std::vector<Node>>>& per_scc, std::size_t cap,
                                  std::uint64_t seed) {
  const std::size_t c = condensation.components.size();
  if (per_scc.size() != c) throw Error(ErrorCode::EmptyComponentSet, "need one ordering set per component");
  for (const auto& set : per_scc) {
    if (set.empty()) throw Error(ErrorCode::EmptyComponentSet, "a component has no orderings");
  }
  const auto order = topological_sort(condensation.super_dag);

  OrderingUniverse u;
  for (const auto& set : per_scc) u.per_component_counts.push_back(set.size());

  constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();
  std::size_t product = 1;
  for (const auto& set : per_scc) {
    product = (product > kSaturated / set.size()) ? kSaturated : product * set.size();
  }

  auto assemble = [&](const std::vector<std::size_t>& choice, std::uint64_t label) {
    CausalOrdering o;
    o.source = OrderingSource::Exhaustive;
    o.labeling = label;
    for (std::size_t pos = 0; pos < c; ++pos) {
      const auto& seq = per_scc[order[pos]][choice[pos]];
      o.sequence.insert(o.sequence.end(), seq.begin(), seq.end());
    }
    return o;
  };

  std::vector<std::size_t> radix(c);
  for (std::size_t pos = 0; pos < c; ++pos) radix[pos] = per_scc[order[pos]].size();

  if (product <= cap) {
    u.exhaustive = true;
    u.orderings.reserve(product);
    std::vector<std::size_t> choice(c, 0);
    for (std::size_t idx = 0; idx < product; ++idx) {
      u.orderings.push_back(assemble(choice, idx));
      for (std::size_t pos = c; pos-- > 0;) {
        if (++choice[pos] < radix[pos]) break;
        choice[pos] = 0;
      }
    }
    return u;
  }

  u.exhaustive = false;
  std::mt19937_64 rng(derive_seed(seed, kStageCompose, 0));
  struct ChoiceHash {
    std::size_t operator()(const std::vector<std::size_t>& v) const {
      Fnv1a h;
      h.bytes(v.data(), v.size() * sizeof(std::size_t));
      return static_cast<std::size_t>(h.value());
    }
  };
  std::unordered_set<std::vector<std::size_t>, ChoiceHash> seen;
  std::vector<std::size_t> choice(c);
  while (u.orderings.size() < cap) {
    for (std::size_t pos = 0; pos < c; ++pos) {
      choice[pos] = std::uniform_int_distribution<std::size_t>(0, radix[pos] - 1)(rng);
    }
    if (!seen.insert(choice).second) continue;
    u.orderings.push_back(assemble(choice, ChoiceHash{}(choice)));
  }
  return u;
}

bool is_consistent(std::span<const Node> ordering, const DirectedGraph& graph, const Condensation& condensation) {
  const std::size_t n = graph.node_count();
  if (ordering.size() != n) throw Error(ErrorCode::LengthMismatch, "ordering length differs from node count");
  std::vector<std::size_t> position(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ordering[i] >= n || position[ordering[i]] != n) {
      throw Error(ErrorCode::LengthMismatch, "ordering is not a permutation of the nodes");
    }
    position[ordering[i]] = i;
  }
  for (Node u = 0; u < n; ++u) {
    for (Node v : graph.out(u)) {
      if (condensation.component_of[u] != condensation.component_of[v] && position[u] > position[v]) return false;
    }
  }
  return true;
}

bool is_consistent(std::span<const Node> ordering, const DirectedGraph& graph) {
  return is_consistent(ordering, graph, scc_decompose(graph));
}

namespace {

std::vector<std::vector<Node>> component_orderings(const DirectedGraph& graph, const std::vector<Node>& members,
                                                   bool sample, const OrderingConfig& cfg, std::size_t index,
                                                   bool& truncated) {
  if (members.size() == 1) return {members};
  const DirectedGraph sub = graph.induced(members);
  std::vector<std::vector<Node>> local;
  if (sample) {
    for (auto& o : mc_dfs_sample(sub, cfg.m, derive_seed(cfg.seed, kStageMcDfs, 1000003 + index)))
      local.push_back(std::move(o.sequence));
    truncated = true;
  } else {
    auto e = enumerate_scc_orderings(sub, cfg.cap);
    truncated = e.cap_reached;
    local = std::move(e.sequences);
  }
  for (auto& seq : local) {
    for (auto& v : seq) v = members[v];
  }
  return local;
}

}  // namespace

OrderingUniverse generate_orderings(const DirectedGraph& graph, const OrderingConfig& config) {
  const Condensation cond = scc_decompose(graph);
  OrderingStrategy strategy = config.strategy;
  if (strategy == OrderingStrategy::Auto) {
    strategy = cond.largest() <= config.exhaustive_max_scc ? OrderingStrategy::Exhaustive : OrderingStrategy::McDfs;
  }
  if (strategy == OrderingStrategy::McDfs) {
    OrderingUniverse u;
    u.orderings = mc_dfs_sample(graph, config.m, config.seed, config.workers);
    u.exhaustive = false;
    return u;
  }
  const std::size_t c = cond.components.size();
  std::vector<std::vector<std::vector<Node>>> per_scc(c);
  std::vector<char> truncated(c, 0);
  parallel_for(c, config.workers, [&](std::size_t k) {
    const bool sample = strategy == OrderingStrategy::PerSccMc && cond.components[k].size() > config.exhaustive_max_scc;
    bool t = false;
    per_scc[k] = component_orderings(graph, cond.components[k], sample, config, k, t);
    truncated[k] = t ? 1 : 0;
  });
  OrderingUniverse u = compose_universe(cond, per_scc, config.cap, config.seed);
  if (std::any_of(truncated.begin(), truncated.end(), [](char t) { return t != 0; })) u.exhaustive = false;
  return u;
}

void write_orderings(std::ostream& out, const std::vector<CausalOrdering>& orderings,
                     const std::vector<std::string>& labels, const OrderingsHeader& header) {
  out << "# graph_hash=" << std::hex << header.graph_hash << std::dec << " seed=" << header.seed
      << " m=" << header.m << " exhaustive=" << (header.exhaustive ? "true" : "false")
      << " count=" << orderings.size() << '\n';
  for (const auto& o : orderings) {
    for (std::size_t i = 0; i < o.sequence.size(); ++i) out << (i ? "," : "") << labels[o.sequence[i]];
    out << '\n';
  }
}

std::vector<CausalOrdering> read_orderings(std::istream& in, const std::vector<std::string>& labels,
                                           const std::vector<Node>* subset) {
  const auto index = label_index(labels);
  std::vector<char> allowed(labels.size(), subset ? 0 : 1);
  if (subset) {
    for (Node v : *subset) allowed[v] = 1;
  }
  const std::size_t expected = subset ? subset->size() : labels.size();
  tsv::LineReader reader(in);
  std::string line;
  std::vector<CausalOrdering> out;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    CausalOrdering o;
    o.source = OrderingSource::Supplied;
    o.labeling = out.size();
    std::vector<char> used(labels.size(), 0);
    for (auto field : tsv::split(line, ',')) {
      const auto it = index.find(std::string(tsv::trim(field)));
      if (it == index.end() || !allowed[it->second]) {
        tsv::fail("orderings", reader.number(), "unknown or disallowed gene '" + std::string(tsv::trim(field)) + "'");
      }
      if (used[it->second]) tsv::fail("orderings", reader.number(), "gene listed twice");
      used[it->second] = 1;
      o.sequence.push_back(it->second);
    }
    if (o.sequence.size() != expected) {
      tsv::fail("orderings", reader.number(), "ordering must list " + std::to_string(expected) + " genes");
    }
    out.push_back(std::move(o));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "orderings file has no orderings");
  return out;
}

std::vector<CausalOrdering> read_orderings(const std::filesystem::path& path, const std::vector<std::string>& labels,
                                           const std::vector<Node>* subset) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return read_orderings(in, labels, subset);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace ripe
