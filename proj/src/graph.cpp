#include "ripe/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "ripe/error.hpp"
#include "ripe/hash.hpp"
#include "tsv.hpp"

namespace ripe {

namespace {

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i + 1);
  return labels;
}

}  // namespace

DirectedGraph::DirectedGraph(std::size_t node_count) : DirectedGraph(numbered_labels(node_count)) {}

DirectedGraph::DirectedGraph(std::vector<std::string> labels)
    : labels_(std::move(labels)), adjacency_(labels_.size()) {}

bool DirectedGraph::add_edge(Node from, Node to) {
  if (from >= node_count() || to >= node_count()) {
    throw Error(ErrorCode::ValueOutOfRange, "edge endpoint outside node range");
  }
  if (from == to) {
    ++dropped_self_loops_;
    return false;
  }
  auto& list = adjacency_[from];
  if (std::find(list.begin(), list.end(), to) != list.end()) return false;
  list.push_back(to);
  ++edge_count_;
  return true;
}

bool DirectedGraph::has_edge(Node from, Node to) const {
  const auto& list = adjacency_[from];
  return std::find(list.begin(), list.end(), to) != list.end();
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Node u = 0; u < node_count(); ++u) {
    for (Node v : adjacency_[u]) out.emplace_back(u, v);
  }
  return out;
}

DirectedGraph DirectedGraph::induced(std::span<const Node> members) const {
  std::vector<std::string> sub_labels;
  sub_labels.reserve(members.size());
  std::vector<std::int64_t> local(node_count(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    local[members[i]] = static_cast<std::int64_t>(i);
    sub_labels.push_back(labels_[members[i]]);
  }
  std::vector<Edge> sub_edges;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (Node v : adjacency_[members[i]]) {
      if (local[v] >= 0) sub_edges.emplace_back(static_cast<Node>(i), static_cast<Node>(local[v]));
    }
  }
  return graph_from_unique_edges(std::move(sub_labels), sub_edges);
}

DirectedGraph graph_from_unique_edges(std::vector<std::string> labels, std::span<const Edge> edges) {
  DirectedGraph g(std::move(labels));
  const std::size_t n = g.node_count();
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw Error(ErrorCode::ValueOutOfRange, "edge endpoint outside node range");
    if (u == v) {
      ++g.dropped_self_loops_;
      continue;
    }
    g.adjacency_[u].push_back(v);
    ++g.edge_count_;
  }
  return g;
}

std::vector<Node> identity_priority(std::size_t n) {
  std::vector<Node> p(n);
  std::iota(p.begin(), p.end(), Node{0});
  return p;
}

DfsRunner::DfsRunner(const DirectedGraph& graph) : graph_(&graph) {
  const std::size_t n = graph.node_count();
  in_offsets_.assign(n + 1, 0);
  for (Node u = 0; u < n; ++u) {
    for (Node v : graph.out(u)) ++in_offsets_[v + 1];
  }
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  in_sources_.resize(in_offsets_[n]);
  std::vector<std::size_t> fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (Node u = 0; u < n; ++u) {
    for (Node v : graph.out(u)) in_sources_[fill[v]++] = u;
  }
}

void DfsRunner::traverse(std::span<const Node> priority, std::uint32_t* pre, std::uint32_t* post,
                         std::vector<Node>& finish) const {
  const std::size_t n = graph_->node_count();
  if (priority.size() != n) throw Error(ErrorCode::LengthMismatch, "priority must list every node once");

  // Out-lists re-sorted by priority rank, in CSR form: walking targets in
  // priority order and appending each to its sources' lists does this in O(V+E).
  std::vector<std::size_t> offsets(n + 1, 0);
  for (Node u = 0; u < n; ++u) offsets[u + 1] = offsets[u] + graph_->out(u).size();
  std::vector<Node> targets(offsets[n]);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  std::vector<char> seen(n, 0);
  for (Node v : priority) {
    if (v >= n || seen[v]) throw Error(ErrorCode::ValueOutOfRange, "priority is not a permutation");
    seen[v] = 1;
    for (std::size_t k = in_offsets_[v]; k < in_offsets_[v + 1]; ++k) targets[fill[in_sources_[k]]++] = v;
  }

  std::vector<char> visited(n, 0);
  std::vector<std::pair<Node, std::size_t>> stack;
  stack.reserve(n);
  finish.clear();
  finish.reserve(n);
  std::uint32_t clock = 1;
  for (Node root : priority) {
    if (visited[root]) continue;
    visited[root] = 1;
    if (pre) pre[root] = clock;
    ++clock;
    stack.emplace_back(root, offsets[root]);
    while (!stack.empty()) {
      auto& [v, cursor] = stack.back();
      const std::size_t end = offsets[v + 1];
      while (cursor < end && visited[targets[cursor]]) ++cursor;
      if (cursor < end) {
        const Node u = targets[cursor++];
        visited[u] = 1;
        if (pre) pre[u] = clock;
        ++clock;
        stack.emplace_back(u, offsets[u]);
      } else {
        if (post) post[v] = clock;
        ++clock;
        finish.push_back(v);
        stack.pop_back();
      }
    }
  }
}

DfsResult DfsRunner::run(std::span<const Node> priority) const {
  DfsResult result;
  const std::size_t n = graph_->node_count();
  result.pre.assign(n, 0);
  result.post.assign(n, 0);
  traverse(priority, result.pre.data(), result.post.data(), result.ordering);
  std::reverse(result.ordering.begin(), result.ordering.end());
  return result;
}

std::vector<Node> DfsRunner::ordering(std::span<const Node> priority) const {
  std::vector<Node> finish;
  traverse(priority, nullptr, nullptr, finish);
  std::reverse(finish.begin(), finish.end());
  return finish;
}

DfsResult dfs_traverse(const DirectedGraph& graph, std::span<const Node> node_priority) {
  return DfsRunner(graph).run(node_priority);
}

std::size_t Condensation::largest() const {
  std::size_t best = 0;
  for (const auto& c : components) best = std::max(best, c.size());
  return best;
}

Condensation scc_decompose(const DirectedGraph& graph) {
  // Iterative Tarjan. Components come out in reverse topological order.
  const std::size_t n = graph.node_count();
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<Node> scc_stack;
  std::vector<std::pair<Node, std::size_t>> call;
  std::vector<std::vector<Node>> emitted;
  std::uint32_t counter = 0;

  for (Node root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, cursor] = call.back();
      const auto out = graph.out(v);
      if (cursor < out.size()) {
        const Node w = out[cursor++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<Node> comp;
        Node w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        emitted.push_back(std::move(comp));
      }
      const Node finished = v;
      call.pop_back();
      if (!call.empty()) {
        const Node parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }

  Condensation c;
  c.components.assign(std::make_move_iterator(emitted.rbegin()), std::make_move_iterator(emitted.rend()));
  c.component_of.assign(n, 0);
  std::vector<std::string> super_labels;
  super_labels.reserve(c.components.size());
  for (std::size_t k = 0; k < c.components.size(); ++k) {
    std::string label = "{";
    for (std::size_t i = 0; i < c.components[k].size(); ++i) {
      c.component_of[c.components[k][i]] = k;
      if (i) label += ',';
      label += graph.label(c.components[k][i]);
    }
    super_labels.push_back(label + "}");
  }
  std::vector<Edge> super_edges;
  std::unordered_set<std::uint64_t> seen;
  for (Node u = 0; u < n; ++u) {
    for (Node v : graph.out(u)) {
      const auto cu = c.component_of[u], cv = c.component_of[v];
      if (cu == cv) continue;
      if (seen.insert((static_cast<std::uint64_t>(cu) << 32) | cv).second) {
        super_edges.emplace_back(static_cast<Node>(cu), static_cast<Node>(cv));
      }
    }
  }
  c.super_dag = graph_from_unique_edges(std::move(super_labels), super_edges);
  return c;
}

std::vector<Node> topological_sort(const DirectedGraph& dag) {
  const auto priority = identity_priority(dag.node_count());
  std::vector<Node> order = DfsRunner(dag).ordering(priority);
  std::vector<std::size_t> position(dag.node_count());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  for (Node u = 0; u < dag.node_count(); ++u) {
    for (Node v : dag.out(u)) {
      if (position[u] >= position[v]) {
        throw Error(ErrorCode::CycleDetected,
                    "graph has a cycle through " + dag.label(u) + " -> " + dag.label(v));
      }
    }
  }
  return order;
}

ComponentSizes component_size_summary(const DirectedGraph& graph) {
  ComponentSizes s;
  s.edge_count = graph.edge_count();
  const std::size_t n = graph.node_count();
  if (n == 0) return s;
  s.largest_scc = scc_decompose(graph).largest();

  std::vector<std::size_t> parent(n), size(n, 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Node u = 0; u < n; ++u) {
    for (Node v : graph.out(u)) {
      auto a = find(u), b = find(v);
      if (a == b) continue;
      if (size[a] < size[b]) std::swap(a, b);
      parent[b] = a;
      size[a] += size[b];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) == i) s.largest_wcc = std::max(s.largest_wcc, size[i]);
  }
  return s;
}

std::unordered_map<std::string, Node> label_index(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, Node> index;
  index.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<Node>(i));
  return index;
}

EdgeListFile read_edge_list(std::istream& in, const std::vector<std::string>* universe) {
  const std::string source = "edge list";
  tsv::LineReader reader(in);
  std::string line;
  std::vector<std::string> comments;
  bool header_seen = false;
  std::vector<std::string> labels;
  std::unordered_map<std::string, Node> index;
  if (universe) {
    labels = *universe;
    index = label_index(labels);
  }
  std::vector<Edge> raw;
  while (reader.next(line)) {
    if (line.front() == '#') {
      comments.push_back(line);
      continue;
    }
    const auto fields = tsv::split(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() >= 2 && tsv::trim(fields[0]) == "source" && tsv::trim(fields[1]) == "target") continue;
      tsv::fail(source, reader.number(), "expected header 'source<TAB>target'");
    }
    if (fields.size() < 2) tsv::fail(source, reader.number(), "expected at least two columns");
    Node ends[2];
    for (int k = 0; k < 2; ++k) {
      const std::string label(tsv::trim(fields[k]));
      if (label.empty()) tsv::fail(source, reader.number(), "empty node label");
      auto it = index.find(label);
      if (it == index.end()) {
        if (universe) {
          throw Error(ErrorCode::LabelMismatch,
                      source + ":" + std::to_string(reader.number()) + ": unknown label '" + label + "'");
        }
        it = index.emplace(label, static_cast<Node>(labels.size())).first;
        labels.push_back(label);
      }
      ends[k] = it->second;
    }
    raw.emplace_back(ends[0], ends[1]);
  }
  if (!header_seen && !universe) tsv::fail(source, reader.number(), "missing header");
  DirectedGraph g(std::move(labels));
  for (const auto& [u, v] : raw) g.add_edge(u, v);
  return {std::move(g), std::move(comments)};
}

EdgeListFile read_edge_list(const std::filesystem::path& path, const std::vector<std::string>* universe) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return read_edge_list(in, universe);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_edge_list(std::ostream& out, const DirectedGraph& graph) {
  out << "source\ttarget\n";
  for (const auto& [u, v] : graph.edges()) out << graph.label(u) << '\t' << graph.label(v) << '\n';
}

std::uint64_t graph_hash(const DirectedGraph& graph) {
  Fnv1a h;
  h.u64(graph.node_count());
  for (const auto& [u, v] : graph.edges()) {
    h.u64(u);
    h.u64(v);
  }
  return h.value();
}

}  // namespace ripe
