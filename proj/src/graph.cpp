#include "countgraph/graph.hpp"

#include "countgraph/errors.hpp"

namespace countgraph {

UndirectedGraph::UndirectedGraph(int p) : p_(p) {
  if (p < 1) throw UsageError("UndirectedGraph: vertex count must be >= 1");
  adj_.assign(static_cast<std::size_t>(p_) * p_, 0);
}

UndirectedGraph UndirectedGraph::complete(int p) {
  UndirectedGraph g(p);
  for (int s = 0; s < p; ++s)
    for (int t = s + 1; t < p; ++t) g.add_edge(s, t);
  return g;
}

void UndirectedGraph::check_pair(int s, int t) const {
  if (s < 0 || t < 0 || s >= p_ || t >= p_ || s == t)
    throw UsageError("UndirectedGraph: invalid vertex pair");
}

bool UndirectedGraph::has_edge(int s, int t) const {
  check_pair(s, t);
  return adj_[static_cast<std::size_t>(s) * p_ + t] != 0;
}

void UndirectedGraph::add_edge(int s, int t) {
  check_pair(s, t);
  auto& a = adj_[static_cast<std::size_t>(s) * p_ + t];
  auto& b = adj_[static_cast<std::size_t>(t) * p_ + s];
  if (!a) ++edge_count_;
  a = b = 1;
}

void UndirectedGraph::remove_edge(int s, int t) {
  check_pair(s, t);
  auto& a = adj_[static_cast<std::size_t>(s) * p_ + t];
  auto& b = adj_[static_cast<std::size_t>(t) * p_ + s];
  if (a) --edge_count_;
  a = b = 0;
}

int UndirectedGraph::degree(int s) const {
  int d = 0;
  for (int t = 0; t < p_; ++t)
    if (t != s && adj_[static_cast<std::size_t>(s) * p_ + t]) ++d;
  return d;
}

std::vector<int> UndirectedGraph::neighbors(int s) const {
  std::vector<int> out;
  for (int t = 0; t < p_; ++t)
    if (t != s && adj_[static_cast<std::size_t>(s) * p_ + t]) out.push_back(t);
  return out;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int s = 0; s < p_; ++s)
    for (int t = s + 1; t < p_; ++t)
      if (adj_[static_cast<std::size_t>(s) * p_ + t]) out.emplace_back(s, t);
  return out;
}

bool UndirectedGraph::operator==(const UndirectedGraph& other) const {
  return p_ == other.p_ && adj_ == other.adj_;
}

long hamming_distance(const UndirectedGraph& a, const UndirectedGraph& b) {
  if (a.p() != b.p()) throw UsageError("hamming_distance: vertex counts differ");
  long d = 0;
  for (int s = 0; s < a.p(); ++s)
    for (int t = s + 1; t < a.p(); ++t)
      if (a.has_edge(s, t) != b.has_edge(s, t)) ++d;
  return d;
}

}  // namespace countgraph
