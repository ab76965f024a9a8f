#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "ripe/graph.hpp"

namespace testing {

using ripe::DirectedGraph;
using ripe::Node;

// Each ordered pair (u, v), u != v, present with probability `density`.
inline DirectedGraph random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  DirectedGraph g(n);
  for (Node u = 0; u < n; ++u) {
    for (Node v = 0; v < n; ++v) {
      if (u != v && coin(rng)) g.add_edge(u, v);
    }
  }
  return g;
}

// Random DAG: edges only from lower to higher position of a random permutation.
inline DirectedGraph random_acyclic(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Node> perm(n);
  for (Node i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(density);
  DirectedGraph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (coin(rng)) g.add_edge(perm[a], perm[b]);
    }
  }
  return g;
}

// reach[u][v]: path of length >= 0 from u to v (Floyd-Warshall closure).
inline std::vector<std::vector<char>> reachability(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (Node u = 0; u < n; ++u) {
    r[u][u] = 1;
    for (Node v : g.out(u)) r[u][v] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

inline std::vector<std::size_t> positions(const std::vector<Node>& seq) {
  std::vector<std::size_t> pos(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) pos[seq[i]] = i;
  return pos;
}

}  // namespace testing
