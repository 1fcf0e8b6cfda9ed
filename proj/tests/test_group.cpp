#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steklov/group.hpp"

using namespace steklov;

TEST_CASE("primitive_root matches exhaustive order check") {
  // oracle: smallest k whose successive powers first return to 1 at exponent p-1
  auto oracle = [](int p) {
    for (int k = 2; k < p; ++k) {
      int ord = 1;
      long y = k;
      while (y != 1) {
        y = (y * k) % p;
        ++ord;
      }
      if (ord == p - 1) return k;
    }
    return -1;
  };
  CHECK(primitive_root(3) == 2);
  CHECK(primitive_root(5) == 2);
  CHECK(primitive_root(7) == 3);
  for (int p : {3, 5, 7, 11, 13}) CHECK(primitive_root(p) == oracle(p));
  CHECK_THROWS_AS(primitive_root(4), std::invalid_argument);
  CHECK_THROWS_AS(primitive_root(9), std::invalid_argument);
  CHECK_THROWS_AS(primitive_root(2), std::invalid_argument);
}

TEST_CASE("make_context fixes the presentation verbatim") {
  auto c3 = make_context(3);
  CHECK(c3.k == 2);
  CHECK(c3.delta1 == GroupElement(3, 1, 1));
  CHECK(c3.delta2 == GroupElement(3, 0, 2));  // 2^-1 = 2 mod 3
  CHECK(group_pow(c3.delta1, 3) == group_identity(3));

  auto c5 = make_context(5);
  CHECK(c5.delta2 == GroupElement(5, 0, 3));  // 2^-1 = 3 mod 5
  GroupElement conj = mul(mul(inv(c5.delta2), c5.delta1), c5.delta2);
  CHECK(conj == GroupElement(5, 2, 1));
  CHECK(conj == group_pow(c5.delta1, c5.k));
}

TEST_CASE("semidirect product law and inverses") {
  CHECK(mul(GroupElement(3, 1, 1), GroupElement(3, 1, 1)) == GroupElement(3, 2, 1));
  CHECK(mul(GroupElement(3, 0, 2), GroupElement(3, 1, 1)) == GroupElement(3, 2, 2));
  CHECK_THROWS_AS(mul(GroupElement(3, 0, 1), GroupElement(5, 0, 1)), std::invalid_argument);

  // inverse of (1,2) at p=5 by brute-force search over all 20 elements
  auto c5 = make_context(5);
  GroupElement g(5, 1, 2);
  GroupElement found(5, 0, 1);
  bool hit = false;
  for (const auto& h : c5.elements())
    if (mul(h, g) == group_identity(5)) {
      found = h;
      hit = true;
    }
  CHECK(hit);
  CHECK(inv(g) == found);
}

TEST_CASE("group axioms exhaustively at p in {3,5,7}") {
  for (int p : {3, 5, 7}) {
    auto ctx = make_context(p);
    auto elems = ctx.elements();
    CHECK(static_cast<int>(elems.size()) == p * (p - 1));
    CHECK(ctx.order == p * (p - 1));
    const GroupElement e = group_identity(p);
    for (const auto& a : elems) {
      CHECK(mul(a, e) == a);
      CHECK(mul(e, a) == a);
      CHECK(mul(inv(a), a) == e);
      CHECK(mul(a, inv(a)) == e);
    }
    for (const auto& a : elems)
      for (const auto& b : elems)
        for (const auto& c : elems) CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
  }
}

TEST_CASE("presentation relations hold exactly") {
  for (int p : {3, 5, 7, 11}) {
    auto ctx = make_context(p);
    CHECK(group_pow(ctx.delta1, p) == group_identity(p));
    CHECK(group_pow(ctx.delta2, p - 1) == group_identity(p));
    CHECK(mul(mul(inv(ctx.delta2), ctx.delta1), ctx.delta2) == group_pow(ctx.delta1, ctx.k));
  }
}

TEST_CASE("word_decompose recomposes on all of G_p") {
  auto c3 = make_context(3);
  CHECK(word_decompose(c3, GroupElement(3, 2, 1)) == std::pair<int, int>{2, 0});
  CHECK(word_decompose(c3, GroupElement(3, 0, 2)) == std::pair<int, int>{0, 1});

  for (int p : {3, 5, 7}) {
    auto ctx = make_context(p);
    for (const auto& g : ctx.elements()) {
      auto [a, m] = word_decompose(ctx, g);
      CHECK(a >= 0);
      CHECK(a <= p - 1);
      CHECK(m >= 0);
      CHECK(m <= p - 2);
      CHECK(mul(group_pow(ctx.delta1, a), group_pow(ctx.delta2, m)) == g);
    }
  }
}

TEST_CASE("quotient_to_units is a surjective homomorphism with kernel Z_p") {
  CHECK(quotient_to_units(GroupElement(3, 2, 2)) == 2);
  for (int a = 0; a < 7; ++a) CHECK(quotient_to_units(GroupElement(7, a, 1)) == 1);

  auto ctx = make_context(5);
  auto elems = ctx.elements();
  for (const auto& g : elems)
    for (const auto& h : elems)
      CHECK(quotient_to_units(mul(g, h)) == (quotient_to_units(g) * quotient_to_units(h)) % 5);

  int kernel = 0;
  std::set<int> image;
  for (const auto& g : elems) {
    if (quotient_to_units(g) == 1) ++kernel;
    image.insert(quotient_to_units(g));
  }
  CHECK(kernel == 5);
  CHECK(image.size() == 4);
}
