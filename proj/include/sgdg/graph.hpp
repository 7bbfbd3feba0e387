#pragma once

// Undirected graphs, chordality and perfect vertex elimination orderings.
//
// Vertices are 0-based in memory; file formats use 1-based labels.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sgdg/error.hpp"

namespace sgdg {

using Edge = std::pair<int, int>;

class Graph {
 public:
  Graph() = default;

  explicit Graph(int k) : k_(k), adj_(static_cast<std::size_t>(k) * k, 0) {
    if (k < 1) throw InvalidParams("graph needs at least one vertex");
  }

  Graph(int k, const std::vector<Edge>& edges) : Graph(k) {
    for (auto [i, j] : edges) add_edge(i, j);
  }

  static Graph complete(int k) {
    Graph g(k);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) g.add_edge(i, j);
    return g;
  }

  static Graph chain(int k) {
    Graph g(k);
    for (int i = 0; i + 1 < k; ++i) g.add_edge(i, i + 1);
    return g;
  }

  void add_edge(int i, int j) {
    if (i < 0 || j < 0 || i >= k_ || j >= k_)
      throw InvalidParams("edge endpoint out of range");
    if (i == j) throw InvalidParams("self-loops are not allowed");
    adj_[idx(i, j)] = 1;
    adj_[idx(j, i)] = 1;
  }

  int size() const noexcept { return k_; }

  bool adjacent(int i, int j) const noexcept {
    return i != j && adj_[idx(i, j)] != 0;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < k_; ++u)
      if (adjacent(v, u)) out.push_back(u);
    return out;
  }

  // Sorted (i<j) edge list.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < k_; ++i)
      for (int j = i + 1; j < k_; ++j)
        if (adjacent(i, j)) out.emplace_back(i, j);
    return out;
  }

  std::size_t edge_count() const { return edges().size(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.k_ == b.k_ && a.adj_ == b.adj_;
  }

 private:
  std::size_t idx(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * k_ + j;
  }

  int k_ = 0;
  std::vector<unsigned char> adj_;
};

/// perm[position] = vertex. Position 0 is eliminated first.
struct EliminationOrdering {
  std::vector<int> perm;

  static EliminationOrdering identity(int k) {
    EliminationOrdering o;
    o.perm.resize(k);
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
  }

  bool is_identity() const {
    for (std::size_t p = 0; p < perm.size(); ++p)
      if (perm[p] != static_cast<int>(p)) return false;
    return true;
  }

  friend bool operator==(const EliminationOrdering&,
                         const EliminationOrdering&) = default;
};

namespace detail {

// Maximum cardinality search. Vertices are numbered from the back: the first
// vertex visited receives the last position. Ties go to the highest label,
// which makes the search a fixed point on graphs relabeled by its own output.
inline EliminationOrdering maximum_cardinality_search(const Graph& g) {
  const int k = g.size();
  std::vector<int> weight(k, 0);
  std::vector<char> visited(k, 0);
  EliminationOrdering ord;
  ord.perm.assign(k, -1);
  for (int pos = k - 1; pos >= 0; --pos) {
    int best = -1;
    for (int v = k - 1; v >= 0; --v) {
      if (visited[v]) continue;
      if (best < 0 || weight[v] > weight[best]) best = v;
    }
    visited[best] = 1;
    ord.perm[pos] = best;
    for (int u = 0; u < k; ++u)
      if (!visited[u] && g.adjacent(best, u)) ++weight[u];
  }
  return ord;
}

inline bool is_permutation_of_range(const std::vector<int>& perm, int k) {
  if (static_cast<int>(perm.size()) != k) return false;
  std::vector<char> seen(k, 0);
  for (int v : perm) {
    if (v < 0 || v >= k || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

// Zero fill-in test (Tarjan & Yannakakis): for every vertex, the later
// neighbors minus the earliest one must be adjacent to that earliest one.
inline bool has_zero_fill(const Graph& g, const EliminationOrdering& ord) {
  const int k = g.size();
  std::vector<int> pos(k);
  for (int p = 0; p < k; ++p) pos[ord.perm[p]] = p;
  for (int v = 0; v < k; ++v) {
    int parent = -1;
    for (int u : g.neighbors(v))
      if (pos[u] > pos[v] && (parent < 0 || pos[u] < pos[parent])) parent = u;
    if (parent < 0) continue;
    for (int u : g.neighbors(v))
      if (pos[u] > pos[v] && u != parent && !g.adjacent(u, parent))
        return false;
  }
  return true;
}

}  // namespace detail

inline bool is_decomposable(const Graph& g) {
  return detail::has_zero_fill(g, detail::maximum_cardinality_search(g));
}

inline EliminationOrdering perfect_elimination_ordering(const Graph& g) {
  auto ord = detail::maximum_cardinality_search(g);
  if (!detail::has_zero_fill(g, ord))
    throw NotDecomposable("graph has a chordless cycle of length >= 4");
  return ord;
}

/// Triple condition by direct enumeration: for positions a<b<c, edges
/// (perm[b],perm[a]) and (perm[c],perm[a]) imply edge (perm[c],perm[b]).
inline bool verify_ordering(const Graph& g, const EliminationOrdering& ord) {
  const int k = g.size();
  if (!detail::is_permutation_of_range(ord.perm, k)) return false;
  const auto& p = ord.perm;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      if (!g.adjacent(p[b], p[a])) continue;
      for (int c = b + 1; c < k; ++c)
        if (g.adjacent(p[c], p[a]) && !g.adjacent(p[c], p[b])) return false;
    }
  return true;
}

/// Graph whose vertex `p` is the old vertex ord.perm[p].
inline Graph relabel(const Graph& g, const EliminationOrdering& ord) {
  const int k = g.size();
  if (!detail::is_permutation_of_range(ord.perm, k))
    throw InvalidParams("ordering is not a permutation of the vertices");
  Graph h(k);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (g.adjacent(ord.perm[a], ord.perm[b])) h.add_edge(a, b);
  return h;
}

/// Does F(i,j) = {i+1,...,k-1} \ {j} separate i<j? Reachability from i in the
/// subgraph induced on {0,...,i} u {j}.
inline bool separates(const Graph& g, int i, int j) {
  if (!(0 <= i && i < j && j < g.size()))
    throw InvalidParams("separates requires 0 <= i < j < k");
  auto allowed = [&](int v) { return v <= i || v == j; };
  std::vector<char> seen(g.size(), 0);
  std::queue<int> frontier;
  frontier.push(i);
  seen[i] = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    if (v == j) return false;
    for (int u : g.neighbors(v))
      if (allowed(u) && !seen[u]) {
        seen[u] = 1;
        frontier.push(u);
      }
  }
  return true;
}

/// N<(i) = { j > i : (i,j) in E } under the identity labeling, sorted.
struct ForwardNeighborSets {
  std::vector<std::vector<int>> sets;

  explicit ForwardNeighborSets(const Graph& g) : sets(g.size()) {
    for (int i = 0; i < g.size(); ++i)
      for (int j = i + 1; j < g.size(); ++j)
        if (g.adjacent(i, j)) sets[i].push_back(j);
  }

  const std::vector<int>& operator[](int i) const { return sets[i]; }
  int size_of(int i) const { return static_cast<int>(sets[i].size()); }

  int max_size() const {
    int m = 0;
    for (const auto& s : sets) m = std::max(m, static_cast<int>(s.size()));
    return m;
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& s : sets) t += s.size();
    return t;
  }
};

/// Downstream modules consume graphs whose labels already form a perfect
/// elimination scheme.
inline void require_ordered(const Graph& g) {
  if (!verify_ordering(g, EliminationOrdering::identity(g.size())))
    throw NotDecomposable(
        "vertex labels are not a perfect elimination ordering; relabel the "
        "graph first");
}

}  // namespace sgdg
