#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ripe {

using Node = std::uint32_t;
using Edge = std::pair<Node, Node>;

// Directed graph with insertion-ordered adjacency lists. Self-loops are
// dropped (and counted); duplicate edges are ignored.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  // Nodes labelled "1".."n".
  explicit DirectedGraph(std::size_t node_count);
  explicit DirectedGraph(std::vector<std::string> labels);

  // Returns true when the edge was inserted.
  bool add_edge(Node from, Node to);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }

  std::span<const Node> out(Node v) const { return adjacency_[v]; }
  bool has_edge(Node from, Node to) const;

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(Node v) const { return labels_[v]; }

  std::vector<Edge> edges() const;

  // Subgraph on `members` (local index i = members[i]), edges in original order.
  DirectedGraph induced(std::span<const Node> members) const;

 private:
  friend DirectedGraph graph_from_unique_edges(std::vector<std::string>, std::span<const Edge>);

  std::vector<std::string> labels_;
  std::vector<std::vector<Node>> adjacency_;
  std::size_t edge_count_ = 0;
  std::size_t dropped_self_loops_ = 0;
};

// Bulk construction when the caller guarantees no duplicate edges.
DirectedGraph graph_from_unique_edges(std::vector<std::string> labels, std::span<const Edge> edges);

struct DfsResult {
  std::vector<std::uint32_t> pre;   // 1-based clock values
  std::vector<std::uint32_t> post;
  std::vector<Node> ordering;       // descending post
};

// Reusable DFS over a fixed graph. `priority` is a permutation of the nodes:
// the outer loop visits roots in priority order and each node explores its
// out-neighbours in priority order. Iterative, with the clock semantics of the
// textbook recursive explore().
class DfsRunner {
 public:
  explicit DfsRunner(const DirectedGraph& graph);
  DfsResult run(std::span<const Node> priority) const;
  // Only the descending-post ordering; skips the pre/post copies.
  std::vector<Node> ordering(std::span<const Node> priority) const;

 private:
  void traverse(std::span<const Node> priority, std::uint32_t* pre, std::uint32_t* post,
                std::vector<Node>& finish) const;

  const DirectedGraph* graph_;
  std::vector<std::size_t> in_offsets_;
  std::vector<Node> in_sources_;
};

DfsResult dfs_traverse(const DirectedGraph& graph, std::span<const Node> node_priority);

std::vector<Node> identity_priority(std::size_t n);

struct Condensation {
  // Components are indexed in a topological order of the super DAG; members
  // are sorted ascending.
  std::vector<std::vector<Node>> components;
  DirectedGraph super_dag;
  std::vector<std::size_t> component_of;

  std::size_t largest() const;
};

Condensation scc_decompose(const DirectedGraph& graph);

// Canonical order: reverse postorder of an identity-priority DFS.
// Throws Error(CycleDetected).
std::vector<Node> topological_sort(const DirectedGraph& dag);

struct ComponentSizes {
  std::size_t largest_scc = 0;
  std::size_t largest_wcc = 0;
  std::size_t edge_count = 0;
};

ComponentSizes component_size_summary(const DirectedGraph& graph);

// Edge-list TSV with header "source<TAB>target". Lines starting with '#' are
// skipped. Without a label universe, labels map to indices in order of first
// appearance; with one, unknown labels raise Error(LabelMismatch).
struct EdgeListFile {
  DirectedGraph graph;
  std::vector<std::string> comments;
};

EdgeListFile read_edge_list(std::istream& in, const std::vector<std::string>* universe = nullptr);
EdgeListFile read_edge_list(const std::filesystem::path& path,
                            const std::vector<std::string>* universe = nullptr);
void write_edge_list(std::ostream& out, const DirectedGraph& graph);

std::unordered_map<std::string, Node> label_index(const std::vector<std::string>& labels);

// FNV-1a over node count and edge list.
std::uint64_t graph_hash(const DirectedGraph& graph);

}  // namespace ripe
