#pragma once

#include <utility>
#include <vector>

namespace countgraph {

// Simple undirected graph on vertices {0..p-1}; symmetric, no self-loops.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int p);

  static UndirectedGraph complete(int p);

  int p() const { return p_; }
  int edge_count() const { return edge_count_; }

  bool has_edge(int s, int t) const;
  void add_edge(int s, int t);
  void remove_edge(int s, int t);

  int degree(int s) const;

  // Neighbors of s in ascending order.
  std::vector<int> neighbors(int s) const;

  // Canonical edge list: pairs (u, v) with u < v, lexicographically sorted.
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const UndirectedGraph& other) const;

 private:
  void check_pair(int s, int t) const;

  int p_;
  int edge_count_ = 0;
  std::vector<char> adj_;  // p_ * p_ symmetric incidence
};

// Number of edges in the symmetric difference of the two edge sets.
long hamming_distance(const UndirectedGraph& a, const UndirectedGraph& b);

}  // namespace countgraph
