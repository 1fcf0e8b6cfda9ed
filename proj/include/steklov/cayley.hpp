#pragma once

// Cayley graph Γ_p = Γ(G_p, {delta1, delta2}), its delta2-cycle partition and
// the left-multiplication action by graph automorphisms.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "steklov/group.hpp"

namespace steklov {

enum class EdgeColor : int { D1 = 0, D2 = 1 };

struct CayleyGraph {
  GroupContext ctx;
  std::vector<GroupElement> vertices;  // lexicographic (a, b) order
  struct Edge {
    int src;
    int dst;
    EdgeColor color;
  };
  std::vector<Edge> edges;  // one D1 and one D2 out-edge per vertex

  int index(const GroupElement& g) const { return ctx.index_of(g); }
};

inline CayleyGraph build_cayley(const GroupContext& ctx) {
  CayleyGraph g;
  g.ctx = ctx;
  g.vertices = ctx.elements();
  g.edges.reserve(2 * g.vertices.size());
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    g.edges.push_back({v, ctx.index_of(mul(g.vertices[v], ctx.delta1)), EdgeColor::D1});
    g.edges.push_back({v, ctx.index_of(mul(g.vertices[v], ctx.delta2)), EdgeColor::D2});
  }
  return g;
}

struct CyclePartition {
  std::vector<std::vector<int>> cycles;  // C_j, j = 0..p-1, each of size p-1
  std::vector<int> cycle_of;             // vertex -> cycle index
};

// C_j = { delta1^j delta2^m } = all elements with translation part j.  The D2
// edges traverse each C_j as a single (p-1)-cycle.
inline CyclePartition delta2_cycles(const CayleyGraph& g) {
  const int p = g.ctx.p;
  CyclePartition part;
  part.cycles.assign(p, {});
  part.cycle_of.assign(g.vertices.size(), -1);
  for (int j = 0; j < p; ++j) {
    GroupElement cur(p, j, 1);  // delta1^j
    for (int m = 0; m <= p - 2; ++m) {
      int v = g.index(cur);
      part.cycles[j].push_back(v);
      part.cycle_of[v] = j;
      cur = mul(cur, g.ctx.delta2);
    }
    if (cur != GroupElement(p, j, 1))
      throw std::logic_error("delta2_cycles: cycle did not close");
  }
  return part;
}

// Entry (i, j) = number of D1 edges from C_i to C_j.
inline std::vector<std::vector<int>> cycle_transition_profile(const CayleyGraph& g,
                                                              const CyclePartition& part) {
  const int p = g.ctx.p;
  std::vector<std::vector<int>> profile(p, std::vector<int>(p, 0));
  for (const auto& e : g.edges)
    if (e.color == EdgeColor::D1) ++profile[part.cycle_of[e.src]][part.cycle_of[e.dst]];
  return profile;
}

// Whether every D1 transition stays in the adjacent bands C_(i±1).  True for
// p = 3, empirically false for p >= 5; reported, never asserted.
inline bool transitions_within_adjacent_bands(const std::vector<std::vector<int>>& profile) {
  const int p = static_cast<int>(profile.size());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (profile[i][j] != 0 && j != (i + 1) % p && j != (i + p - 1) % p) return false;
  return true;
}

// Vertex permutation v -> index(g * element(v)); a color-preserving graph
// automorphism.
inline std::vector<int> left_action(const CayleyGraph& graph, const GroupElement& g) {
  std::vector<int> perm(graph.vertices.size());
  for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v)
    perm[v] = graph.index(mul(g, graph.vertices[v]));
  return perm;
}

inline bool is_color_automorphism(const CayleyGraph& graph, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> d1, d2;
  for (const auto& e : graph.edges)
    (e.color == EdgeColor::D1 ? d1 : d2).push_back({e.src, e.dst});
  auto has = [](std::vector<std::pair<int, int>>& set, std::pair<int, int> key) {
    return std::find(set.begin(), set.end(), key) != set.end();
  };
  for (const auto& e : graph.edges) {
    std::pair<int, int> im{perm[e.src], perm[e.dst]};
    if (!has(e.color == EdgeColor::D1 ? d1 : d2, im)) return false;
  }
  return true;
}

inline bool is_connected(const CayleyGraph& g) {
  const int n = static_cast<int>(g.vertices.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

}  // namespace steklov
