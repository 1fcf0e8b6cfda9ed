#pragma once

// Discrete metric models of the building block B(ell), its quotient block
// B'(ell), and the glued surfaces S_p(ell), S'_p(ell) as weighted 2-complexes
// with exact G_p symmetry.
//
// A block is (i) a square annulus on [-2,2]^2 minus the unit disk with
// Euclidean finite-volume conductances, (ii) a fixed ell-independent junction
// complex (cylinder + discrete 3-holed sphere, unit conductances) joining the
// inner circle to two collar mouths, and (iii) two half-collar grids on
// [0, w(ell)] x S^1 carrying the Fermi-metric weights.  All ell dependence
// lives in the collars.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "steklov/cayley.hpp"
#include "steklov/group.hpp"

namespace steklov {

// ---------------------------------------------------------------------------
// Collar geometry

// w(ell) = arcsinh(coth(ell/2)), evaluated in log form so small ell stays
// finite.  ell is clamped to >= 1e-6.
inline double collar_half_width(double ell) {
  if (!(ell > 0)) throw std::invalid_argument("collar_half_width: ell must be positive");
  if (ell < 1e-6) {
    std::fprintf(stderr, "steklov: warning: ell=%g clamped to 1e-6\n", ell);
    ell = 1e-6;
  }
  double x = 1.0 / std::tanh(ell / 2.0);
  return std::log(x + std::sqrt(x * x + 1.0));
}

// The analytic value ell^2 w(ell) stated by the source derivation.
inline double collar_area(double ell) {
  if (!(ell > 0)) throw std::invalid_argument("collar_area: ell must be positive");
  return ell * ell * collar_half_width(ell);
}

struct CollarProfile {
  double ell = 0;
  double half_width = 0;  // w(ell)
  int n_rho = 0;          // grid steps in rho per half-collar
  int n_t = 0;            // grid steps around the circle
};

inline CollarProfile make_collar_profile(double ell, int n_rho, int n_t) {
  if (n_rho < 1 || n_t < 3) throw std::invalid_argument("make_collar_profile: resolution too low");
  CollarProfile pr;
  pr.ell = ell < 1e-6 ? 1e-6 : ell;
  pr.half_width = collar_half_width(ell);
  pr.n_rho = n_rho;
  pr.n_t = n_t;
  return pr;
}

// Midpoint cell-area sum of the full collar under the metric area element
// ell cosh(rho): 2 * sum_cells ell cosh(rho_mid) drho dt.
inline double discrete_collar_area(const CollarProfile& pr) {
  double drho = pr.half_width / pr.n_rho;
  double dt = 1.0 / pr.n_t;
  double sum = 0.0;
  for (int i = 0; i < pr.n_rho; ++i) {
    double rho_mid = (i + 0.5) * drho;
    sum += pr.ell * std::cosh(rho_mid) * drho * dt * pr.n_t;
  }
  return 2.0 * sum;
}

// ---------------------------------------------------------------------------
// Blocks

struct Resolution {
  int square_n = 8;     // segments per square side; N = 4*square_n angular
  int n_rho = 32;       // collar rows per half-collar
  int n_t = 16;         // collar circumference steps; must divide 4*square_n
  int pants_level = 2;  // cylinder rings in the junction
};

struct WeightedEdge {
  int u = 0, v = 0;
  double c = 0;
};

struct DiscreteBlock {
  int n_vertices = 0;
  std::vector<WeightedEdge> edges;
  std::vector<std::vector<int>> faces;
  std::vector<int> gamma1_plus, gamma1_minus;  // collar rims, n_t circles
  std::vector<int> gamma2_plus, gamma2_minus;  // square sides, open chains
  std::vector<int> b1, b2;                     // boundary sides, open chains
  std::vector<int> boundary_vertices;
  std::vector<double> boundary_mass;
  std::vector<double> collar_dist;  // distance-from-mid-circle fraction; core = 1
  std::vector<char> in_square;      // annulus membership
  Resolution res;
  double ell = 0;
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
};

inline std::pair<long, long> edge_key(int u, int v) {
  return {std::min(u, v), std::max(u, v)};
}

// Triangulate the annulus between two closed cycles of arbitrary sizes by
// monotone zipping; appends triangles and records the spoke edges.
inline void zip_triangulate(const std::vector<int>& A, const std::vector<int>& B,
                            std::vector<std::vector<int>>& faces,
                            std::set<std::pair<int, int>>& spokes) {
  const int n = static_cast<int>(A.size());
  const int m = static_cast<int>(B.size());
  int i = 0, j = 0;
  auto add_spoke = [&](int a, int b) { spokes.insert({std::min(a, b), std::max(a, b)}); };
  add_spoke(A[0], B[0]);
  while (i < n || j < m) {
    bool advance_a;
    if (i == n)
      advance_a = false;
    else if (j == m)
      advance_a = true;
    else
      advance_a = static_cast<double>(i + 1) * m <= static_cast<double>(j + 1) * n;
    if (advance_a) {
      faces.push_back({A[i % n], A[(i + 1) % n], B[j % m]});
      ++i;
      add_spoke(A[i % n], B[j % m]);
    } else {
      faces.push_back({A[i % n], B[j % m], B[(j + 1) % m]});
      ++j;
      add_spoke(A[i % n], B[j % m]);
    }
  }
}

}  // namespace detail

inline DiscreteBlock build_block(const CollarProfile& pr, int square_n, int pants_level) {
  if (square_n < 4 || square_n % 2 != 0)
    throw std::invalid_argument("build_block: square_n must be even and >= 4");
  const int N = 4 * square_n;
  if (N % pr.n_t != 0)
    throw std::invalid_argument("build_block: n_t must divide the inner-circle discretization");
  const int RL = square_n / 2;  // annulus layers
  const int CL = pants_level;
  const int n_t = pr.n_t;
  const int n_rho = pr.n_rho;

  DiscreteBlock blk;
  blk.res = {square_n, n_rho, n_t, pants_level};
  blk.ell = pr.ell;

  const int n_annulus = (RL + 1) * N;
  const int base_cyl = n_annulus;
  const int base_cuff = base_cyl + CL * N;
  const int base_collar = base_cuff + 2 * n_t;
  blk.n_vertices = base_collar + 2 * n_rho * n_t;

  auto A = [N](int r, int j) { return r * N + ((j % N) + N) % N; };
  auto Cyl = [&](int c, int j) {
    int jj = ((j % N) + N) % N;
    return c == 0 ? A(0, jj) : base_cyl + (c - 1) * N + jj;
  };
  auto cuff = [&](int s, int j) { return base_cuff + s * n_t + ((j % n_t) + n_t) % n_t; };
  auto col = [&](int s, int r, int j) {
    int jj = ((j % n_t) + n_t) % n_t;
    return r == 0 ? cuff(s, jj) : base_collar + s * (n_rho * n_t) + (r - 1) * n_t + jj;
  };

  // --- annulus geometry: ring 0 = unit circle (uniform angle), ring RL =
  // square perimeter (uniform arclength), rings in between interpolated.
  std::vector<std::array<double, 2>> pos(n_annulus);
  auto outer = [&](int j) -> std::array<double, 2> {
    int side = j / square_n;
    double t = 4.0 * (j % square_n) / square_n;
    switch (side) {
      case 0: return {2.0, -2.0 + t};
      case 1: return {2.0 - t, 2.0};
      case 2: return {-2.0, 2.0 - t};
      default: return {-2.0 + t, -2.0};
    }
  };
  for (int j = 0; j < N; ++j) {
    double th = -M_PI / 4.0 + 2.0 * M_PI * j / N;
    std::array<double, 2> in{std::cos(th), std::sin(th)};
    std::array<double, 2> out = outer(j);
    for (int r = 0; r <= RL; ++r) {
      double s = static_cast<double>(r) / RL;
      pos[A(r, j)] = {(1 - s) * in[0] + s * out[0], (1 - s) * in[1] + s * out[1]};
    }
  }

  std::map<std::pair<long, long>, double> emap;
  auto add_edge = [&](int u, int v, double c) { emap[detail::edge_key(u, v)] += c; };
  auto set_edge = [&](int u, int v, double c) { emap[detail::edge_key(u, v)] = c; };

  // --- annulus faces
  for (int r = 0; r < RL; ++r)
    for (int j = 0; j < N; ++j)
      blk.faces.push_back({A(r, j), A(r, j + 1), A(r + 1, j + 1), A(r + 1, j)});

  // Finite-volume conductances: dual segment between face centroids (or face
  // centroid and edge midpoint on the rims) over primal edge length.
  auto centroid = [&](int r, int j) -> std::array<double, 2> {
    auto p1 = pos[A(r, j)], p2 = pos[A(r, j + 1)], p3 = pos[A(r + 1, j + 1)], p4 = pos[A(r + 1, j)];
    return {(p1[0] + p2[0] + p3[0] + p4[0]) / 4.0, (p1[1] + p2[1] + p3[1] + p4[1]) / 4.0};
  };
  auto dist = [](std::array<double, 2> a, std::array<double, 2> b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
  };
  for (int r = 0; r <= RL; ++r)
    for (int j = 0; j < N; ++j) {  // ring edges
      double len = dist(pos[A(r, j)], pos[A(r, j + 1)]);
      std::array<double, 2> mid{(pos[A(r, j)][0] + pos[A(r, j + 1)][0]) / 2.0,
                                (pos[A(r, j)][1] + pos[A(r, j + 1)][1]) / 2.0};
      double dual;
      if (r == 0)
        dual = dist(centroid(0, j), mid);
      else if (r == RL)
        dual = dist(centroid(RL - 1, j), mid);
      else
        dual = dist(centroid(r - 1, j), centroid(r, j));
      add_edge(A(r, j), A(r, j + 1), dual / len);
    }
  for (int r = 0; r < RL; ++r)
    for (int j = 0; j < N; ++j) {  // radial edges
      double len = dist(pos[A(r, j)], pos[A(r + 1, j)]);
      add_edge(A(r, j), A(r + 1, j), dist(centroid(r, j - 1), centroid(r, j)) / len);
    }

  // --- junction cylinder (unit conductances)
  for (int c = 0; c < CL; ++c)
    for (int j = 0; j < N; ++j) {
      blk.faces.push_back({Cyl(c, j), Cyl(c, j + 1), Cyl(c + 1, j + 1), Cyl(c + 1, j)});
      add_edge(Cyl(c, j), Cyl(c + 1, j), 1.0);
    }
  for (int c = 1; c <= CL; ++c)
    for (int j = 0; j < N; ++j) add_edge(Cyl(c, j), Cyl(c, j + 1), 1.0);

  // --- junction pants: the waist circle splits into two legs along a chord;
  // each leg zips down to one collar cuff.
  const int H = N / 2;
  std::vector<int> legA, legB, cuffA, cuffB;
  for (int j = 0; j <= H; ++j) legA.push_back(Cyl(CL, j));
  for (int j = H; j <= N; ++j) legB.push_back(Cyl(CL, j % N));
  for (int j = 0; j < n_t; ++j) cuffA.push_back(cuff(0, j));
  for (int j = 0; j < n_t; ++j) cuffB.push_back(cuff(1, j));
  set_edge(Cyl(CL, 0), Cyl(CL, H), 1.0);  // chord
  std::set<std::pair<int, int>> spokes;
  detail::zip_triangulate(legA, cuffA, blk.faces, spokes);
  detail::zip_triangulate(legB, cuffB, blk.faces, spokes);
  for (const auto& s : spokes) set_edge(s.first, s.second, 1.0);

  // --- half-collars with Fermi-metric weights; row 0 = cuff, row n_rho = rim.
  const double w = pr.half_width;
  const double drho = w / n_rho;
  const double dt = 1.0 / n_t;
  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r <= n_rho; ++r) {
      double rho = r * drho;
      double ct = drho / (pr.ell * std::cosh(rho) * dt);
      for (int j = 0; j < n_t; ++j) add_edge(col(s, r, j), col(s, r, j + 1), ct);
    }
    for (int r = 0; r < n_rho; ++r) {
      double rho_mid = (r + 0.5) * drho;
      double cr = pr.ell * std::cosh(rho_mid) * dt / drho;
      for (int j = 0; j < n_t; ++j) {
        add_edge(col(s, r, j), col(s, r + 1, j), cr);
        blk.faces.push_back({col(s, r, j), col(s, r, j + 1), col(s, r + 1, j + 1), col(s, r + 1, j)});
      }
    }
  }

  // --- ports
  for (int j = 0; j <= square_n; ++j) blk.gamma2_plus.push_back(A(RL, j));
  for (int j = 3 * square_n; j >= 2 * square_n; --j) blk.gamma2_minus.push_back(A(RL, j));
  for (int j = square_n; j <= 2 * square_n; ++j) blk.b2.push_back(A(RL, j));
  for (int j = 3 * square_n; j <= 4 * square_n; ++j) blk.b1.push_back(A(RL, j % N));
  for (int j = 0; j < n_t; ++j) blk.gamma1_plus.push_back(col(0, n_rho, j));
  for (int j = 0; j < n_t; ++j) blk.gamma1_minus.push_back(col(1, n_rho, j));

  // --- boundary masses on b1, b2: uniform side segments of length 4/square_n
  const double seg = 4.0 / square_n;
  for (const auto* side : {&blk.b1, &blk.b2})
    for (size_t i = 0; i < side->size(); ++i) {
      bool corner = (i == 0 || i + 1 == side->size());
      blk.boundary_vertices.push_back((*side)[i]);
      blk.boundary_mass.push_back(corner ? seg / 2.0 : seg);
    }

  // --- annotations
  blk.collar_dist.assign(blk.n_vertices, 1.0);
  for (int s = 0; s < 2; ++s)
    for (int r = 1; r <= n_rho; ++r)
      for (int j = 0; j < n_t; ++j)
        blk.collar_dist[col(s, r, j)] = 1.0 - static_cast<double>(r) / n_rho;
  blk.in_square.assign(blk.n_vertices, 0);
  for (int v = 0; v < n_annulus; ++v) blk.in_square[v] = 1;

  blk.edges.reserve(emap.size());
  for (const auto& [key, c] : emap)
    blk.edges.push_back({static_cast<int>(key.first), static_cast<int>(key.second), c});
  return blk;
}

namespace detail {

// Compress a union-find identification of block/copy vertices into a new
// complex.  Returns old-vertex -> new-vertex map; new ids in first-occurrence
// order for determinism.
inline std::vector<int> compress(UnionFind& uf, int n, int& n_out) {
  std::vector<int> newid(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    int r = uf.find(v);
    if (newid[r] < 0) newid[r] = next++;
    newid[v] = newid[r];
  }
  n_out = next;
  return newid;
}

}  // namespace detail

// B'(ell): B(ell) with gamma1+ identified with gamma1- index-aligned.
inline DiscreteBlock build_block_prime(const CollarProfile& pr, int square_n, int pants_level) {
  DiscreteBlock b = build_block(pr, square_n, pants_level);
  detail::UnionFind uf(b.n_vertices);
  for (size_t l = 0; l < b.gamma1_plus.size(); ++l) uf.unite(b.gamma1_plus[l], b.gamma1_minus[l]);
  int n_out = 0;
  std::vector<int> map = detail::compress(uf, b.n_vertices, n_out);

  DiscreteBlock out;
  out.res = b.res;
  out.ell = b.ell;
  out.n_vertices = n_out;
  std::map<std::pair<long, long>, double> emap;
  for (const auto& e : b.edges) emap[detail::edge_key(map[e.u], map[e.v])] += e.c;
  for (const auto& [key, c] : emap)
    out.edges.push_back({static_cast<int>(key.first), static_cast<int>(key.second), c});
  for (const auto& f : b.faces) {
    std::vector<int> nf;
    for (int v : f) nf.push_back(map[v]);
    out.faces.push_back(nf);
  }
  auto remap = [&](const std::vector<int>& port) {
    std::vector<int> r;
    for (int v : port) r.push_back(map[v]);
    return r;
  };
  out.gamma1_plus = remap(b.gamma1_plus);
  out.gamma1_minus = remap(b.gamma1_minus);  // same circle after the self-gluing
  out.gamma2_plus = remap(b.gamma2_plus);
  out.gamma2_minus = remap(b.gamma2_minus);
  out.b1 = remap(b.b1);
  out.b2 = remap(b.b2);
  for (size_t i = 0; i < b.boundary_vertices.size(); ++i) {
    out.boundary_vertices.push_back(map[b.boundary_vertices[i]]);
    out.boundary_mass.push_back(b.boundary_mass[i]);
  }
  out.collar_dist.assign(n_out, 1.0);
  out.in_square.assign(n_out, 0);
  for (int v = 0; v < b.n_vertices; ++v) {
    out.collar_dist[map[v]] = b.collar_dist[v];
    if (b.in_square[v]) out.in_square[map[v]] = 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surfaces

struct DiscreteSurface {
  int p = 0;
  int n_vertices = 0;
  std::vector<WeightedEdge> edges;
  std::vector<std::vector<int>> faces;
  std::vector<int> boundary_vertices;  // ascending
  std::vector<double> boundary_mass;
  std::vector<int> region_of;    // delta2-cycle region; -1 on collar mid-circles
  std::vector<double> ramp;      // distance-from-mid-circle fraction; core = 1
  std::vector<char> in_square;
  int n_regions = 0;
  int n_collars = 0;
  std::vector<std::vector<int>> action;  // element index -> vertex permutation
  std::vector<int> global_of;            // copy * block_nv + local -> global
  int block_nv = 0;
  double ell = 0;
};

namespace detail {

struct Gluing {
  int src_copy;
  const std::vector<int>* src_port;
  int dst_copy;
  const std::vector<int>* dst_port;
};

inline DiscreteSurface glue_copies(const DiscreteBlock& blk, int n_copies,
                                   const std::vector<Gluing>& gluings,
                                   const std::vector<int>& region_of_copy) {
  const int nv = blk.n_vertices;
  UnionFind uf(n_copies * nv);
  for (const auto& g : gluings) {
    if (g.src_port->size() != g.dst_port->size())
      throw std::invalid_argument("glue_copies: port size mismatch");
    for (size_t l = 0; l < g.src_port->size(); ++l)
      uf.unite(g.src_copy * nv + (*g.src_port)[l], g.dst_copy * nv + (*g.dst_port)[l]);
  }
  DiscreteSurface s;
  s.block_nv = nv;
  s.ell = blk.ell;
  s.global_of = compress(uf, n_copies * nv, s.n_vertices);

  std::map<std::pair<long, long>, double> emap;
  for (int c = 0; c < n_copies; ++c)
    for (const auto& e : blk.edges)
      emap[edge_key(s.global_of[c * nv + e.u], s.global_of[c * nv + e.v])] += e.c;
  for (const auto& [key, cc] : emap)
    s.edges.push_back({static_cast<int>(key.first), static_cast<int>(key.second), cc});

  s.faces.reserve(n_copies * blk.faces.size());
  for (int c = 0; c < n_copies; ++c)
    for (const auto& f : blk.faces) {
      std::vector<int> nf;
      nf.reserve(f.size());
      for (int v : f) nf.push_back(s.global_of[c * nv + v]);
      s.faces.push_back(std::move(nf));
    }

  std::map<int, double> bmass;
  for (int c = 0; c < n_copies; ++c)
    for (size_t i = 0; i < blk.boundary_vertices.size(); ++i)
      bmass[s.global_of[c * nv + blk.boundary_vertices[i]]] += blk.boundary_mass[i];
  for (const auto& [v, m] : bmass) {
    s.boundary_vertices.push_back(v);
    s.boundary_mass.push_back(m);
  }

  s.ramp.assign(s.n_vertices, 1.0);
  s.region_of.assign(s.n_vertices, -2);
  s.in_square.assign(s.n_vertices, 0);
  for (int c = 0; c < n_copies; ++c)
    for (int l = 0; l < nv; ++l) {
      int g = s.global_of[c * nv + l];
      s.ramp[g] = blk.collar_dist[l];
      if (blk.in_square[l]) s.in_square[g] = 1;
      int reg = blk.collar_dist[l] == 0.0 ? -1 : region_of_copy[c];
      if (s.region_of[g] == -2)
        s.region_of[g] = reg;
      else if (s.region_of[g] != reg)
        throw std::logic_error("glue_copies: inconsistent region annotation across a gluing");
    }
  s.n_regions = 0;
  for (int r : region_of_copy) s.n_regions = std::max(s.n_regions, r + 1);
  return s;
}

// Lift a permutation of the copies (identity on local indices) to a vertex
// permutation; throws if the identification is not equivariant.
inline std::vector<int> lift_copy_permutation(const DiscreteSurface& s, int n_copies,
                                              const std::vector<int>& copy_perm) {
  std::vector<int> perm(s.n_vertices, -1);
  for (int c = 0; c < n_copies; ++c)
    for (int l = 0; l < s.block_nv; ++l) {
      int from = s.global_of[c * s.block_nv + l];
      int to = s.global_of[copy_perm[c] * s.block_nv + l];
      if (perm[from] >= 0 && perm[from] != to)
        throw std::logic_error("lift_copy_permutation: identification not equivariant");
      perm[from] = to;
    }
  return perm;
}

}  // namespace detail

inline DiscreteSurface assemble_surface(const GroupContext& ctx, const CayleyGraph& graph,
                                        const CollarProfile& pr, const Resolution& res) {
  DiscreteBlock blk = build_block(pr, res.square_n, res.pants_level);
  const int n = ctx.order;
  auto part = delta2_cycles(graph);

  std::vector<detail::Gluing> gluings;
  for (const auto& e : graph.edges) {
    if (e.color == EdgeColor::D1)
      gluings.push_back({e.src, &blk.gamma1_plus, e.dst, &blk.gamma1_minus});
    else
      gluings.push_back({e.src, &blk.gamma2_plus, e.dst, &blk.gamma2_minus});
  }
  DiscreteSurface s = detail::glue_copies(blk, n, gluings, part.cycle_of);
  s.p = ctx.p;
  s.n_collars = n;  // one glued collar per D1 edge
  s.action.resize(n);
  for (int gi = 0; gi < n; ++gi)
    s.action[gi] = detail::lift_copy_permutation(s, n, left_action(graph, ctx.element_at(gi)));
  return s;
}

// S'_p built directly: p-1 copies of B'(ell) glued in a cycle along gamma2,
// carrying the full G_p action (delta1 acts trivially).
inline DiscreteSurface assemble_quotient_direct(const GroupContext& ctx, const CollarProfile& pr,
                                                const Resolution& res) {
  DiscreteBlock blk = build_block_prime(pr, res.square_n, res.pants_level);
  const int n = ctx.p - 1;
  std::vector<detail::Gluing> gluings;
  for (int i = 0; i < n; ++i)
    gluings.push_back({i, &blk.gamma2_plus, (i + 1) % n, &blk.gamma2_minus});
  DiscreteSurface s = detail::glue_copies(blk, n, gluings, std::vector<int>(n, 0));
  s.p = ctx.p;
  s.n_collars = n;
  s.action.resize(ctx.order);
  for (int gi = 0; gi < ctx.order; ++gi) {
    int m = unit_log(ctx, ctx.element_at(gi).b);
    std::vector<int> copy_perm(n);
    for (int c = 0; c < n; ++c) copy_perm[c] = (c + m) % n;
    s.action[gi] = detail::lift_copy_permutation(s, n, copy_perm);
  }
  return s;
}

// Orbit quotient of S_p by <delta1>.  Conductances and boundary masses are the
// per-orbit totals divided by the orbit length p; the result is
// weighted-isomorphic to assemble_quotient_direct.
inline DiscreteSurface quotient_by_delta1(const GroupContext& ctx, const DiscreteSurface& sp,
                                          std::vector<int>* orbit_of_out = nullptr) {
  if (sp.action.empty()) throw std::invalid_argument("quotient_by_delta1: action not populated");
  const int p = ctx.p;
  const auto& perm = sp.action[ctx.index_of(ctx.delta1)];

  std::vector<int> orbit(sp.n_vertices, -1);
  int n_orbits = 0;
  for (int v = 0; v < sp.n_vertices; ++v) {
    if (orbit[v] >= 0) continue;
    int id = n_orbits++;
    int x = v, len = 0;
    do {
      orbit[x] = id;
      x = perm[x];
      ++len;
    } while (x != v);
    if (len != p) throw std::runtime_error("quotient_by_delta1: non-free action (orbit length != p)");
  }
  if (orbit_of_out) *orbit_of_out = orbit;

  DiscreteSurface q;
  q.p = p;
  q.n_vertices = n_orbits;
  q.ell = sp.ell;
  std::map<std::pair<long, long>, double> emap;
  for (const auto& e : sp.edges) emap[detail::edge_key(orbit[e.u], orbit[e.v])] += e.c;
  for (const auto& [key, c] : emap)
    q.edges.push_back({static_cast<int>(key.first), static_cast<int>(key.second), c / p});

  std::set<std::vector<int>> seen;
  for (const auto& f : sp.faces) {
    std::vector<int> nf;
    for (int v : f) nf.push_back(orbit[v]);
    std::vector<int> key = nf;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second) q.faces.push_back(nf);
  }

  std::map<int, double> bmass;
  for (size_t i = 0; i < sp.boundary_vertices.size(); ++i)
    bmass[orbit[sp.boundary_vertices[i]]] += sp.boundary_mass[i];
  for (const auto& [v, m] : bmass) {
    q.boundary_vertices.push_back(v);
    q.boundary_mass.push_back(m / p);
  }

  q.ramp.assign(n_orbits, 1.0);
  q.region_of.assign(n_orbits, 0);
  q.in_square.assign(n_orbits, 0);
  for (int v = 0; v < sp.n_vertices; ++v) {
    q.ramp[orbit[v]] = sp.ramp[v];
    if (sp.ramp[v] == 0.0) q.region_of[orbit[v]] = -1;
    if (sp.in_square[v]) q.in_square[orbit[v]] = 1;
  }
  q.n_regions = 1;
  q.n_collars = sp.n_collars / p;

  q.action.resize(ctx.order);
  for (int gi = 0; gi < ctx.order; ++gi) {
    const auto& up = sp.action[gi];
    std::vector<int> down(n_orbits, -1);
    for (int v = 0; v < sp.n_vertices; ++v) {
      int from = orbit[v], to = orbit[up[v]];
      if (down[from] >= 0 && down[from] != to)
        throw std::logic_error("quotient_by_delta1: action does not descend");
      down[from] = to;
    }
    q.action[gi] = std::move(down);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Combinatorial audits

inline std::vector<std::vector<int>> boundary_components(const std::vector<std::vector<int>>& faces) {
  std::map<std::pair<long, long>, int> count;
  for (const auto& f : faces)
    for (size_t i = 0; i < f.size(); ++i)
      ++count[detail::edge_key(f[i], f[(i + 1) % f.size()])];
  std::map<int, std::vector<int>> adj;
  for (const auto& [key, c] : count) {
    if (c > 2) throw std::runtime_error("boundary_components: edge incident to >2 faces");
    if (c == 1) {
      adj[static_cast<int>(key.first)].push_back(static_cast<int>(key.second));
      adj[static_cast<int>(key.second)].push_back(static_cast<int>(key.first));
    }
  }
  for (const auto& [v, nb] : adj)
    if (nb.size() != 2) throw std::runtime_error("boundary_components: dangling boundary chain");

  std::vector<std::vector<int>> cycles;
  std::set<int> visited;
  for (const auto& [start, nb] : adj) {
    if (visited.count(start)) continue;
    std::vector<int> cyc{start};
    visited.insert(start);
    int prev = start, cur = nb[0];
    while (cur != start) {
      cyc.push_back(cur);
      visited.insert(cur);
      const auto& nn = adj.at(cur);
      int next = (nn[0] == prev) ? nn[1] : nn[0];
      prev = cur;
      cur = next;
    }
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

inline std::vector<std::vector<int>> boundary_components(const DiscreteSurface& s) {
  return boundary_components(s.faces);
}
inline std::vector<std::vector<int>> boundary_components(const DiscreteBlock& b) {
  return boundary_components(b.faces);
}

struct GenusReport {
  long chi = 0;
  int boundary_count = 0;
  long genus = 0;             // (2 - chi - b) / 2
  bool genus_integral = true;
  bool tube_applicable = false;
  long genus_tube = 0;        // E_t - V_t + 1 of the region/collar multigraph
  bool oracles_agree = false;
  long paper_genus = -1;      // 1 + p(p-1) when p is known
};

inline GenusReport euler_genus_from(long n_vertices, long n_edges,
                                    const std::vector<std::vector<int>>& faces, int n_regions,
                                    int n_collars, int p) {
  GenusReport rep;
  rep.chi = n_vertices - n_edges + static_cast<long>(faces.size());
  rep.boundary_count = static_cast<int>(boundary_components(faces).size());
  long twice = 2 - rep.chi - rep.boundary_count;
  rep.genus_integral = (twice % 2) == 0;
  rep.genus = twice / 2;
  if (n_regions > 0 && n_collars > 0) {
    rep.tube_applicable = true;
    rep.genus_tube = static_cast<long>(n_collars) - n_regions + 1;
    rep.oracles_agree = rep.genus_tube == rep.genus;
  }
  if (p > 0) rep.paper_genus = 1 + static_cast<long>(p) * (p - 1);
  return rep;
}

inline GenusReport euler_genus(const DiscreteSurface& s) {
  return euler_genus_from(s.n_vertices, static_cast<long>(s.edges.size()), s.faces, s.n_regions,
                          s.n_collars, s.p);
}
inline GenusReport euler_genus(const DiscreteBlock& b) {
  return euler_genus_from(b.n_vertices, static_cast<long>(b.edges.size()), b.faces, 0, 0, 0);
}

// Connected components of the vertex set selected by `keep`.
inline int count_components(int n_vertices, const std::vector<WeightedEdge>& edges,
                            const std::vector<char>& keep) {
  std::vector<std::vector<int>> adj(n_vertices);
  for (const auto& e : edges)
    if (keep[e.u] && keep[e.v]) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
  std::vector<char> seen(n_vertices, 0);
  int comps = 0;
  for (int v = 0; v < n_vertices; ++v) {
    if (!keep[v] || seen[v]) continue;
    ++comps;
    std::vector<int> stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
  }
  return comps;
}

inline int components_without_mid_circles(const DiscreteSurface& s) {
  std::vector<char> keep(s.n_vertices, 1);
  for (int v = 0; v < s.n_vertices; ++v)
    if (s.ramp[v] == 0.0) keep[v] = 0;
  return count_components(s.n_vertices, s.edges, keep);
}

inline int count_components(const DiscreteSurface& s) {
  return count_components(s.n_vertices, s.edges, std::vector<char>(s.n_vertices, 1));
}

// Solves j kappa = -1 mod p (the quotient's rim-matching congruence).
inline int solve_kappa(int p, int j) {
  if (j % p == 0) throw std::invalid_argument("solve_kappa: j must be a unit mod p");
  return static_cast<int>((p - mod_inv(j, p)) % p);
}

// Whether a vertex permutation preserves conductances, boundary masses and
// boundary membership exactly.
inline bool is_weighted_automorphism(const DiscreteSurface& s, const std::vector<int>& perm) {
  std::map<std::pair<long, long>, double> emap;
  for (const auto& e : s.edges) emap[detail::edge_key(e.u, e.v)] = e.c;
  for (const auto& e : s.edges) {
    auto it = emap.find(detail::edge_key(perm[e.u], perm[e.v]));
    if (it == emap.end() || it->second != e.c) return false;
  }
  std::map<int, double> bmass;
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    bmass[s.boundary_vertices[i]] = s.boundary_mass[i];
  for (const auto& [v, m] : bmass) {
    auto it = bmass.find(perm[v]);
    if (it == bmass.end() || it->second != m) return false;
  }
  return true;
}

}  // namespace steklov
