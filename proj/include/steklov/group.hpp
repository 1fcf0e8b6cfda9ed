#pragma once

// Exact arithmetic in G_p = Z_p ⋊ Z_p* with generators delta1, delta2.
// Elements are stored as normalized pairs (a, b): translation part a mod p,
// unit part b mod p, with the product law
//   (a1, b1) (a2, b2) = (a1 + b1 a2 mod p, b1 b2 mod p).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace steklov {

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline long mod_pow(long base, long exp, long mod) {
  base %= mod;
  if (base < 0) base += mod;
  long r = 1;
  while (exp > 0) {
    if (exp & 1) r = (r * base) % mod;
    base = (base * base) % mod;
    exp >>= 1;
  }
  return r;
}

inline long mod_inv(long x, long p) { return mod_pow(x, p - 2, p); }

// Multiplicative order of x modulo p (x nonzero).
inline int mod_order(long x, long p) {
  long y = x % p;
  int ord = 1;
  while (y != 1) {
    y = (y * (x % p)) % p;
    ++ord;
    if (ord > p) throw std::logic_error("mod_order: no order found (non-unit?)");
  }
  return ord;
}

struct GroupElement {
  int p = 0;
  int a = 0;  // translation part, 0 <= a <= p-1
  int b = 1;  // unit part, 1 <= b <= p-1

  GroupElement() = default;
  GroupElement(int p_, long a_, long b_) : p(p_) {
    a = static_cast<int>(((a_ % p_) + p_) % p_);
    b = static_cast<int>(((b_ % p_) + p_) % p_);
    if (b == 0) throw std::invalid_argument("GroupElement: unit part must be nonzero mod p");
  }

  friend bool operator==(const GroupElement& x, const GroupElement& y) {
    return x.p == y.p && x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const GroupElement& x, const GroupElement& y) { return !(x == y); }
  friend bool operator<(const GroupElement& x, const GroupElement& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  }
};

inline GroupElement group_identity(int p) { return GroupElement(p, 0, 1); }

inline GroupElement mul(const GroupElement& g, const GroupElement& h) {
  if (g.p != h.p) throw std::invalid_argument("mul: elements of different G_p");
  long p = g.p;
  return GroupElement(g.p, (g.a + static_cast<long>(g.b) * h.a) % p,
                      (static_cast<long>(g.b) * h.b) % p);
}

inline GroupElement inv(const GroupElement& g) {
  long bi = mod_inv(g.b, g.p);
  return GroupElement(g.p, (-bi * g.a) % g.p, bi);
}

inline GroupElement group_pow(const GroupElement& g, long n) {
  GroupElement base = n >= 0 ? g : inv(g);
  if (n < 0) n = -n;
  GroupElement r = group_identity(g.p);
  while (n > 0) {
    if (n & 1) r = mul(r, base);
    base = mul(base, base);
    n >>= 1;
  }
  return r;
}

// Smallest k in [2, p-1] of multiplicative order exactly p-1.
inline int primitive_root(int p) {
  if (!is_prime(p) || p < 3) throw std::invalid_argument("primitive_root: p must be an odd prime >= 3");
  for (int k = 2; k <= p - 1; ++k)
    if (mod_order(k, p) == p - 1) return k;
  throw std::logic_error("primitive_root: none found");
}

struct GroupContext {
  int p = 0;
  int k = 0;  // smallest primitive root mod p
  GroupElement delta1, delta2;
  int order = 0;  // p (p-1)

  // Lexicographic (a, b) enumeration; index_of is its inverse.
  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(order);
    for (int a = 0; a < p; ++a)
      for (int b = 1; b < p; ++b) out.emplace_back(p, a, b);
    return out;
  }
  int index_of(const GroupElement& g) const { return g.a * (p - 1) + (g.b - 1); }
  GroupElement element_at(int idx) const { return GroupElement(p, idx / (p - 1), idx % (p - 1) + 1); }
};

// With the product law above, delta2 = (0, k) would conjugate delta1 to
// delta1^(k^-1).  The presentation delta2^-1 delta1 delta2 = delta1^k is made
// to hold verbatim by taking delta2 = (0, k^-1); k^-1 is again a primitive
// root, so the abstract group is unchanged.
inline GroupContext make_context(int p) {
  GroupContext ctx;
  ctx.p = p;
  ctx.k = primitive_root(p);
  ctx.order = p * (p - 1);
  ctx.delta1 = GroupElement(p, 1, 1);
  ctx.delta2 = GroupElement(p, 0, mod_inv(ctx.k, p));

  const GroupElement e = group_identity(p);
  if (group_pow(ctx.delta1, p) != e)
    throw std::logic_error("make_context: delta1^p != e");
  if (group_pow(ctx.delta2, p - 1) != e)
    throw std::logic_error("make_context: delta2^(p-1) != e");
  GroupElement conj = mul(mul(inv(ctx.delta2), ctx.delta1), ctx.delta2);
  if (conj != group_pow(ctx.delta1, ctx.k))
    throw std::logic_error("make_context: delta2^-1 delta1 delta2 != delta1^k");
  return ctx;
}

// Discrete log of a unit b in base delta2's unit part.
inline int unit_log(const GroupContext& ctx, int b) {
  long q = ctx.delta2.b;
  long y = 1;
  for (int m = 0; m <= ctx.p - 2; ++m) {
    if (y == b) return m;
    y = (y * q) % ctx.p;
  }
  throw std::logic_error("unit_log: not a power of the generator");
}

// Unique (a, m) with 0 <= a <= p-1, 0 <= m <= p-2 and delta1^a delta2^m = g.
inline std::pair<int, int> word_decompose(const GroupContext& ctx, const GroupElement& g) {
  // delta1^a delta2^m = (a, 1)(0, q^m) = (a, q^m) with q = delta2's unit part.
  return {g.a, unit_log(ctx, g.b)};
}

// Projection G_p -> Z_p*, a homomorphism with kernel <delta1>.
inline int quotient_to_units(const GroupElement& g) { return g.b; }

}  // namespace steklov
