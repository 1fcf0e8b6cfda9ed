#pragma once

// Irreducible representations of G_p: the p-1 one-dimensional characters, the
// degree-(p-1) representation, character tables, irreducibility certificates
// and isotypic multiplicities of group actions on inner-product spaces.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "steklov/group.hpp"

namespace steklov {

using Complex = std::complex<double>;

struct Irrep {
  std::string label;  // "rho_1".."rho_{p-1}" or "big"
  int degree = 0;
  std::function<Eigen::MatrixXcd(const GroupElement&)> ev;

  Complex character(const GroupElement& g) const { return ev(g).trace(); }
};

// rho_r(delta1^a delta2^m) = alpha^(r m), alpha = exp(2*pi*i/(p-1)).
inline Irrep one_dim_rep(const GroupContext& ctx, int r) {
  if (r < 1 || r > ctx.p - 1) throw std::invalid_argument("one_dim_rep: r out of range");
  const int p = ctx.p;
  Irrep rep;
  rep.label = "rho_" + std::to_string(r);
  rep.degree = 1;
  rep.ev = [ctx, r, p](const GroupElement& g) {
    int m = word_decompose(ctx, g).second;
    double theta = 2.0 * M_PI * static_cast<double>(r) * m / (p - 1);
    Eigen::MatrixXcd v(1, 1);
    v(0, 0) = Complex(std::cos(theta), std::sin(theta));
    return v;
  };
  return rep;
}

// rho(delta1) = diag(xi^(k^0), ..., xi^(k^(p-2))), xi = exp(2*pi*i/p);
// rho(delta2) = cyclic shift e_i -> e_(i+1 mod p-1).  General elements via the
// normal form delta1^a delta2^m.
inline Irrep big_rep(const GroupContext& ctx) {
  const int p = ctx.p;
  const int d = p - 1;
  Eigen::MatrixXcd d1 = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    long e = mod_pow(ctx.k, i, p);
    double theta = 2.0 * M_PI * static_cast<double>(e) / p;
    d1(i, i) = Complex(std::cos(theta), std::sin(theta));
  }
  Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) d2((i + 1) % d, i) = 1.0;

  Irrep rep;
  rep.label = "big";
  rep.degree = d;
  rep.ev = [ctx, d1, d2](const GroupElement& g) {
    auto [a, m] = word_decompose(ctx, g);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(d1.rows(), d1.cols());
    for (int i = 0; i < a; ++i) out = out * d1;
    for (int i = 0; i < m; ++i) out = out * d2;
    return out;
  };
  return rep;
}

inline std::vector<Irrep> all_irreps(const GroupContext& ctx) {
  std::vector<Irrep> reps;
  for (int r = 1; r <= ctx.p - 1; ++r) reps.push_back(one_dim_rep(ctx, r));
  reps.push_back(big_rep(ctx));
  return reps;
}

// <chi, chi'> = (1/|G|) sum_g chi(g) conj(chi'(g)).
inline Complex character_inner(const GroupContext& ctx, const std::vector<Complex>& chi1,
                               const std::vector<Complex>& chi2) {
  Complex s = 0.0;
  for (int i = 0; i < ctx.order; ++i) s += chi1[i] * std::conj(chi2[i]);
  return s / static_cast<double>(ctx.order);
}

inline std::vector<Complex> character_values(const GroupContext& ctx, const Irrep& rep) {
  std::vector<Complex> chi(ctx.order);
  for (int i = 0; i < ctx.order; ++i) chi[i] = rep.character(ctx.element_at(i));
  return chi;
}

struct CharacterTable {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  std::vector<std::vector<Complex>> values;  // per irrep, indexed by element index
  std::vector<GroupElement> class_reps;
  std::vector<int> class_sizes;

  long degree_square_sum() const {
    long s = 0;
    for (int d : degrees) s += static_cast<long>(d) * d;
    return s;
  }
};

inline std::vector<std::vector<int>> conjugacy_classes(const GroupContext& ctx) {
  auto elems = ctx.elements();
  std::vector<int> cls(ctx.order, -1);
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < ctx.order; ++i) {
    if (cls[i] >= 0) continue;
    std::vector<int> c;
    for (const auto& h : elems) {
      int j = ctx.index_of(mul(mul(h, elems[i]), inv(h)));
      if (cls[j] < 0) {
        cls[j] = static_cast<int>(classes.size());
        c.push_back(j);
      }
    }
    classes.push_back(std::move(c));
  }
  return classes;
}

inline CharacterTable character_table(const GroupContext& ctx) {
  CharacterTable table;
  for (const auto& rep : all_irreps(ctx)) {
    table.labels.push_back(rep.label);
    table.degrees.push_back(rep.degree);
    table.values.push_back(character_values(ctx, rep));
  }
  for (const auto& c : conjugacy_classes(ctx)) {
    table.class_reps.push_back(ctx.element_at(c.front()));
    table.class_sizes.push_back(static_cast<int>(c.size()));
  }
  return table;
}

struct IrredCertificate {
  double character_norm = 0.0;  // <chi, chi>
  int commutant_dimension = 0;  // dim { X : rho(g) X = X rho(g) for all g }
  bool irreducible = false;
};

inline IrredCertificate irreducibility_certificate(const GroupContext& ctx, const Irrep& rep) {
  IrredCertificate cert;
  auto chi = character_values(ctx, rep);
  cert.character_norm = character_inner(ctx, chi, chi).real();

  // Null space of the stacked system rho(g) X - X rho(g) = 0 over all g,
  // with X vectorized column-major: (I (x) rho(g) - rho(g)^T (x) I) vec(X).
  const int d = rep.degree;
  Eigen::MatrixXcd sys(ctx.order * d * d, d * d);
  for (int gi = 0; gi < ctx.order; ++gi) {
    Eigen::MatrixXcd R = rep.ev(ctx.element_at(gi));
    for (int cj = 0; cj < d; ++cj)
      for (int ci = 0; ci < d; ++ci)
        for (int bj = 0; bj < d; ++bj)
          for (int bi = 0; bi < d; ++bi) {
            Complex v = 0.0;
            if (cj == bj) v += R(bi, ci);          // (rho X)_{bi,bj} from X_{ci,cj}
            if (ci == bi) v -= R(cj, bj);          // (X rho)_{bi,bj} from X_{ci,cj}
            sys(gi * d * d + bj * d + bi, cj * d + ci) = v;
          }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys);
  const auto& sv = svd.singularValues();
  double tol = 1e-8 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  cert.commutant_dimension = d * d - rank;
  cert.irreducible =
      std::abs(cert.character_norm - 1.0) < 1e-8 && cert.commutant_dimension == 1;
  return cert;
}

// Direct sum of two representations (test fixture for reducible inputs).
inline Irrep direct_sum(const Irrep& x, const Irrep& y) {
  Irrep rep;
  rep.label = x.label + "+" + y.label;
  rep.degree = x.degree + y.degree;
  auto evx = x.ev;
  auto evy = y.ev;
  int dx = x.degree, dy = y.degree;
  rep.ev = [evx, evy, dx, dy](const GroupElement& g) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dx + dy, dx + dy);
    out.topLeftCorner(dx, dx) = evx(g);
    out.bottomRightCorner(dy, dy) = evy(g);
    return out;
  };
  return rep;
}

// Multiplicities of each irrep in a G_p-invariant subspace, from the
// compressed character trace(g) = tr of the action of g on the subspace.
// Each multiplicity must land within tol of a nonnegative integer and the
// weighted degree sum must recover the subspace dimension (= trace(e)).
inline std::map<std::string, int> isotypic_multiplicities(
    const GroupContext& ctx, const std::vector<Irrep>& irreps,
    const std::function<Complex(const GroupElement&)>& trace_fn, double tol = 1e-6) {
  std::vector<Complex> chi_sub(ctx.order);
  for (int i = 0; i < ctx.order; ++i) chi_sub[i] = trace_fn(ctx.element_at(i));

  std::map<std::string, int> mult;
  long weighted = 0;
  for (const auto& rep : irreps) {
    Complex m = character_inner(ctx, chi_sub, character_values(ctx, rep));
    double re = m.real();
    long rounded = std::lround(re);
    if (std::abs(m.imag()) > tol || std::abs(re - rounded) > tol || rounded < 0)
      throw std::runtime_error("isotypic_multiplicities: subspace not action-invariant (" +
                               rep.label + " -> " + std::to_string(re) + ")");
    mult[rep.label] = static_cast<int>(rounded);
    weighted += rounded * rep.degree;
  }
  double dim = chi_sub[ctx.index_of(group_identity(ctx.p))].real();
  if (std::abs(dim - static_cast<double>(weighted)) > tol * std::max<double>(1.0, dim))
    throw std::runtime_error("isotypic_multiplicities: degree-weighted sum != subspace dimension");
  return mult;
}

}  // namespace steklov
