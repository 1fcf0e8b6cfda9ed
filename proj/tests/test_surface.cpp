#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steklov/surface.hpp"

using namespace steklov;

namespace {
const Resolution kTiny{4, 6, 8, 1};  // square_n, n_rho, n_t, pants_level

CollarProfile tiny_profile(double ell) { return make_collar_profile(ell, kTiny.n_rho, kTiny.n_t); }
}  // namespace

TEST_CASE("collar half-width") {
  CHECK(collar_half_width(2.0) == doctest::Approx(1.0863739).epsilon(1e-5));
  CHECK(collar_half_width(1.0) == doctest::Approx(1.5146422).epsilon(1e-5));
  CHECK(collar_half_width(0.5) > collar_half_width(1.0));
  CHECK(collar_half_width(1.0) > collar_half_width(2.0));
  CHECK_THROWS_AS(collar_half_width(0.0), std::invalid_argument);
  CHECK_THROWS_AS(collar_half_width(-1.0), std::invalid_argument);
}

TEST_CASE("collar area") {
  CHECK(collar_area(1.0) == doctest::Approx(1.5146422).epsilon(1e-5));
  CHECK(collar_area(1e-4) < 1e-6);  // ell^2 dominates the log divergence of w
  CHECK_THROWS_AS(collar_area(0.0), std::invalid_argument);
}

TEST_CASE("discrete collar cell-area sum converges to the metric area") {
  // independent oracle: fine midpoint quadrature of the area element
  // ell*cosh(rho) over [-w, w] x [0, 1]
  auto quadrature = [](double ell, int n) {
    double w = collar_half_width(ell);
    double h = 2.0 * w / n, sum = 0.0;
    for (int i = 0; i < n; ++i) sum += ell * std::cosh(-w + (i + 0.5) * h) * h;
    return sum;
  };
  for (double ell : {0.5, 1.0}) {
    auto pr = make_collar_profile(ell, 64, 32);
    double oracle = quadrature(ell, 1 << 16);
    CHECK(std::abs(discrete_collar_area(pr) - oracle) / oracle < 0.02);
    // closed form of the same integral
    CHECK(oracle == doctest::Approx(2.0 * ell / std::tanh(ell / 2.0)).epsilon(1e-6));
  }
}

TEST_CASE("building block combinatorics") {
  auto blk = build_block(tiny_profile(0.5), kTiny.square_n, kTiny.pants_level);

  for (const auto& e : blk.edges) CHECK(e.c > 0.0);

  auto rep = euler_genus(blk);
  CHECK(rep.chi == -1);  // 3-holed sphere
  CHECK(rep.boundary_count == 3);
  CHECK(rep.genus == 0);

  CHECK(blk.gamma1_plus.size() == kTiny.n_t);
  CHECK(blk.gamma1_minus.size() == kTiny.n_t);
  CHECK(blk.gamma2_plus.size() == kTiny.square_n + 1);
  CHECK(blk.gamma2_minus.size() == kTiny.square_n + 1);

  double bmass = 0;
  for (double m : blk.boundary_mass) bmass += m;
  CHECK(bmass == doctest::Approx(8.0).epsilon(1e-12));  // two sides of length 4

  CHECK_THROWS_AS(build_block(tiny_profile(0.5), 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_block(make_collar_profile(0.5, 6, 7), 4, 1), std::invalid_argument);
}

TEST_CASE("quotient building block B'") {
  auto blk = build_block_prime(tiny_profile(0.5), kTiny.square_n, kTiny.pants_level);
  auto rep = euler_genus(blk);
  CHECK(rep.chi == -1);  // circle self-gluing leaves chi unchanged
  CHECK(rep.boundary_count == 1);
  CHECK(rep.genus == 1);
  for (size_t l = 0; l < blk.gamma1_plus.size(); ++l)
    CHECK(blk.gamma1_plus[l] == blk.gamma1_minus[l]);
}

TEST_CASE("assembled surface S_p") {
  for (int p : {3, 5}) {
    auto ctx = make_context(p);
    auto graph = build_cayley(ctx);
    auto s = assemble_surface(ctx, graph, tiny_profile(0.5), kTiny);

    CHECK(count_components(s) == 1);
    CHECK(static_cast<int>(boundary_components(s).size()) == 2 * p);
    CHECK(components_without_mid_circles(s) == p);

    // chi additivity: |G| blocks of chi -1, one chain gluing (-1 each) per D2
    // edge, circle gluings chi-neutral
    auto rep = euler_genus(s);
    CHECK(rep.chi == -static_cast<long>(ctx.order) - ctx.order);
    CHECK(rep.genus_integral);
    CHECK(rep.tube_applicable);
    CHECK(rep.oracles_agree);  // chi-based genus == tube-graph Betti number
    CHECK(rep.genus_tube == static_cast<long>(p - 1) * (p - 1));
    CHECK(rep.paper_genus == 1 + p * (p - 1));
  }
}

TEST_CASE("group action on S_3 preserves weights exactly") {
  auto ctx = make_context(3);
  auto graph = build_cayley(ctx);
  auto s = assemble_surface(ctx, graph, tiny_profile(0.5), kTiny);
  REQUIRE(static_cast<int>(s.action.size()) == ctx.order);
  for (int gi = 0; gi < ctx.order; ++gi) CHECK(is_weighted_automorphism(s, s.action[gi]));

  // composition law of the lifted action
  for (const auto& a : ctx.elements())
    for (const auto& b : ctx.elements()) {
      const auto& pa = s.action[ctx.index_of(a)];
      const auto& pb = s.action[ctx.index_of(b)];
      const auto& pab = s.action[ctx.index_of(mul(a, b))];
      for (int v = 0; v < s.n_vertices; ++v) CHECK(pab[v] == pa[pb[v]]);
    }
}

TEST_CASE("direct quotient surface S'_p") {
  auto ctx = make_context(5);
  auto s = assemble_quotient_direct(ctx, tiny_profile(0.5), kTiny);
  CHECK(count_components(s) == 1);
  CHECK(static_cast<int>(boundary_components(s).size()) == 2);
  CHECK(components_without_mid_circles(s) == 1);
  CHECK(s.n_collars == 4);

  CHECK(solve_kappa(5, 2) == 2);  // 2*2 = 4 = -1 mod 5
  for (int j = 1; j < 5; ++j) CHECK((j * solve_kappa(5, j)) % 5 == 4);
}

TEST_CASE("orbit quotient matches the direct construction at p=3") {
  auto ctx = make_context(3);
  auto graph = build_cayley(ctx);
  auto sp = assemble_surface(ctx, graph, tiny_profile(0.5), kTiny);

  std::vector<int> orbit_of;
  auto q = quotient_by_delta1(ctx, sp, &orbit_of);
  CHECK(q.n_vertices == sp.n_vertices / 3);
  CHECK(sp.n_vertices % 3 == 0);

  auto d = assemble_quotient_direct(ctx, tiny_profile(0.5), kTiny);
  CHECK(d.n_vertices == q.n_vertices);

  // canonical port-anchored matching: orbit of (block (a,b), local l) in the
  // quotient corresponds to (copy m, compressed local) in the direct build,
  // where b is the m-th power of delta2's unit part
  auto blk = build_block(tiny_profile(0.5), kTiny.square_n, kTiny.pants_level);
  // rebuild the block-prime compression map
  detail::UnionFind uf(blk.n_vertices);
  for (size_t l = 0; l < blk.gamma1_plus.size(); ++l)
    uf.unite(blk.gamma1_plus[l], blk.gamma1_minus[l]);
  int nprime = 0;
  auto lmap = detail::compress(uf, blk.n_vertices, nprime);

  std::vector<int> iso(q.n_vertices, -1);
  for (int gi = 0; gi < ctx.order; ++gi) {
    auto g = ctx.element_at(gi);
    int m = unit_log(ctx, g.b);
    for (int l = 0; l < blk.n_vertices; ++l) {
      int qv = orbit_of[sp.global_of[gi * blk.n_vertices + l]];
      int dv = d.global_of[m * nprime + lmap[l]];
      if (iso[qv] < 0)
        iso[qv] = dv;
      else
        CHECK(iso[qv] == dv);
    }
  }
  // bijection
  std::vector<char> hit(d.n_vertices, 0);
  for (int v : iso) {
    REQUIRE(v >= 0);
    CHECK(!hit[v]);
    hit[v] = 1;
  }
  // conductances and boundary masses carried exactly (up to roundoff)
  std::map<std::pair<long, long>, double> dmap;
  for (const auto& e : d.edges) dmap[detail::edge_key(e.u, e.v)] = e.c;
  REQUIRE(q.edges.size() == d.edges.size());
  for (const auto& e : q.edges) {
    auto it = dmap.find(detail::edge_key(iso[e.u], iso[e.v]));
    REQUIRE(it != dmap.end());
    CHECK(e.c == doctest::Approx(it->second).epsilon(1e-13));
  }
  std::map<int, double> dbm;
  for (size_t i = 0; i < d.boundary_vertices.size(); ++i) dbm[d.boundary_vertices[i]] = d.boundary_mass[i];
  REQUIRE(q.boundary_vertices.size() == d.boundary_vertices.size());
  for (size_t i = 0; i < q.boundary_vertices.size(); ++i) {
    auto it = dbm.find(iso[q.boundary_vertices[i]]);
    REQUIRE(it != dbm.end());
    CHECK(q.boundary_mass[i] == doctest::Approx(it->second).epsilon(1e-13));
  }
}

TEST_CASE("quotient rejects a surface without action") {
  auto ctx = make_context(3);
  DiscreteSurface empty;
  CHECK_THROWS_AS(quotient_by_delta1(ctx, empty), std::invalid_argument);
}
