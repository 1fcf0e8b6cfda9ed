#pragma once

// Discrete Steklov and Steklov-Neumann eigenproblems: weighted-graph Laplacian,
// Dirichlet-to-Neumann Schur complement onto the boundary, generalized
// symmetric eigensolve against the boundary mass, multiplicity clustering,
// Rayleigh quotients and isotypic decomposition of eigenspace clusters.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "steklov/reptheory.hpp"
#include "steklov/surface.hpp"

namespace steklov {

inline Eigen::SparseMatrix<double> laplacian_from_edges(int n,
                                                        const std::vector<WeightedEdge>& edges) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * edges.size());
  for (const auto& e : edges) {
    trip.emplace_back(e.u, e.v, -e.c);
    trip.emplace_back(e.v, e.u, -e.c);
    trip.emplace_back(e.u, e.u, e.c);
    trip.emplace_back(e.v, e.v, e.c);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

inline Eigen::SparseMatrix<double> assemble_laplacian(const DiscreteSurface& s) {
  return laplacian_from_edges(s.n_vertices, s.edges);
}

struct SteklovOperator {
  Eigen::MatrixXd dtn;               // L_BB - L_BI L_II^-1 L_IB
  Eigen::VectorXd mass;              // diagonal boundary masses
  std::vector<int> boundary_index;   // row -> vertex
  std::vector<int> row_of;           // vertex -> row, -1 off-boundary
};

namespace detail {

// Schur complement of the Laplacian of the subcomplex spanned by `keep` onto
// the listed boundary vertices.  Dropping the complement of `keep` is the
// natural (zero-Neumann) condition on the interior boundary.
template <typename Solve>
Eigen::MatrixXd schur_complement(int n, const std::vector<WeightedEdge>& edges,
                                 const std::vector<int>& boundary, const std::vector<char>& keep,
                                 Solve&& solve_interior_factory) {
  std::vector<int> brow(n, -1), irow(n, -1);
  for (size_t i = 0; i < boundary.size(); ++i) {
    if (!keep[boundary[i]])
      throw std::invalid_argument("schur_complement: domain missing a boundary vertex");
    brow[boundary[i]] = static_cast<int>(i);
  }
  int ni = 0;
  for (int v = 0; v < n; ++v)
    if (keep[v] && brow[v] < 0) irow[v] = ni++;
  const int nb = static_cast<int>(boundary.size());

  Eigen::MatrixXd Lbb = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::SparseMatrix<double> Lii(ni, ni);
  std::vector<Eigen::Triplet<double>> ii_trip;
  Eigen::MatrixXd Lib = Eigen::MatrixXd::Zero(ni, nb);
  for (const auto& e : edges) {
    if (!keep[e.u] || !keep[e.v]) continue;
    int bu = brow[e.u], bv = brow[e.v], iu = irow[e.u], iv = irow[e.v];
    if (bu >= 0 && bv >= 0) {
      Lbb(bu, bu) += e.c;
      Lbb(bv, bv) += e.c;
      Lbb(bu, bv) -= e.c;
      Lbb(bv, bu) -= e.c;
    } else if (iu >= 0 && iv >= 0) {
      ii_trip.emplace_back(iu, iu, e.c);
      ii_trip.emplace_back(iv, iv, e.c);
      ii_trip.emplace_back(iu, iv, -e.c);
      ii_trip.emplace_back(iv, iu, -e.c);
    } else {
      int i = iu >= 0 ? iu : iv;
      int b = bu >= 0 ? bu : bv;
      ii_trip.emplace_back(i, i, e.c);
      Lbb(b, b) += e.c;
      Lib(i, b) -= e.c;
    }
  }
  Lii.setFromTriplets(ii_trip.begin(), ii_trip.end());
  if (ni == 0) return Lbb;

  auto solve = solve_interior_factory(Lii);
  Eigen::MatrixXd X(ni, nb);
  for (int j = 0; j < nb; ++j) X.col(j) = solve(Eigen::VectorXd(Lib.col(j)));
  Eigen::MatrixXd out = Lbb - Lib.transpose() * X;
  return 0.5 * (out + out.transpose());  // symmetrize roundoff
}

inline auto ldlt_factory() {
  return [](const Eigen::SparseMatrix<double>& Lii) {
    auto solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    solver->compute(Lii);
    if (solver->info() != Eigen::Success)
      throw std::runtime_error("dtn_operator: interior component detached from boundary");
    return [solver](const Eigen::VectorXd& rhs) { return Eigen::VectorXd(solver->solve(rhs)); };
  };
}

inline auto cg_factory(double tol) {
  return [tol](const Eigen::SparseMatrix<double>& Lii) {
    auto solver =
        std::make_shared<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>>();
    solver->setTolerance(tol);
    solver->setMaxIterations(20 * Lii.rows());
    solver->compute(Lii);
    return [solver](const Eigen::VectorXd& rhs) { return Eigen::VectorXd(solver->solve(rhs)); };
  };
}

}  // namespace detail

inline SteklovOperator dtn_operator(const DiscreteSurface& s) {
  if (s.boundary_vertices.empty()) throw std::invalid_argument("dtn_operator: empty boundary");
  SteklovOperator op;
  op.boundary_index = s.boundary_vertices;
  op.row_of.assign(s.n_vertices, -1);
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    op.row_of[s.boundary_vertices[i]] = static_cast<int>(i);
  op.mass = Eigen::Map<const Eigen::VectorXd>(s.boundary_mass.data(), s.boundary_mass.size());
  op.dtn = detail::schur_complement(s.n_vertices, s.edges, s.boundary_vertices,
                                    std::vector<char>(s.n_vertices, 1), detail::ldlt_factory());
  return op;
}

// Iterative-solve route of the same Schur complement (dual-path check).
inline SteklovOperator dtn_operator_iterative(const DiscreteSurface& s, double tol = 1e-12) {
  SteklovOperator op;
  op.boundary_index = s.boundary_vertices;
  op.row_of.assign(s.n_vertices, -1);
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    op.row_of[s.boundary_vertices[i]] = static_cast<int>(i);
  op.mass = Eigen::Map<const Eigen::VectorXd>(s.boundary_mass.data(), s.boundary_mass.size());
  op.dtn = detail::schur_complement(s.n_vertices, s.edges, s.boundary_vertices,
                                    std::vector<char>(s.n_vertices, 1), detail::cg_factory(tol));
  return op;
}

// Mixed Steklov-Neumann operator on the subdomain selected by `domain`
// (must contain all of the Steklov boundary).
inline SteklovOperator steklov_neumann_operator(const DiscreteSurface& s,
                                                const std::vector<char>& domain) {
  SteklovOperator op;
  op.boundary_index = s.boundary_vertices;
  op.row_of.assign(s.n_vertices, -1);
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    op.row_of[s.boundary_vertices[i]] = static_cast<int>(i);
  op.mass = Eigen::Map<const Eigen::VectorXd>(s.boundary_mass.data(), s.boundary_mass.size());
  op.dtn = detail::schur_complement(s.n_vertices, s.edges, s.boundary_vertices, domain,
                                    detail::ldlt_factory());
  return op;
}

// The ell-invariant Steklov-Neumann domain: the union of the square regions.
inline std::vector<char> square_domain(const DiscreteSurface& s) {
  return std::vector<char>(s.in_square.begin(), s.in_square.end());
}

struct SpectralResult {
  std::vector<double> eigenvalues;      // ascending
  Eigen::MatrixXd eigenvectors;         // boundary vectors, M-orthonormal columns
  Eigen::VectorXd mass;
  std::vector<int> boundary_index;
  std::vector<std::vector<int>> clusters;
  double max_residual = 0;              // relative to ||dtn||_F
  bool truncated = false;
};

inline std::vector<std::vector<int>> cluster_eigenvalues(const std::vector<double>& ev,
                                                         double rel_tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < static_cast<int>(ev.size()); ++i) {
    if (!clusters.empty() &&
        ev[i] - ev[clusters.back().back()] <= rel_tol * std::max(1.0, std::abs(ev[i])))
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }
  return clusters;
}

inline SpectralResult steklov_spectrum(const SteklovOperator& op, int count = -1,
                                       double gap_rel = 1e-6) {
  const int nb = static_cast<int>(op.dtn.rows());
  if (count > nb) throw std::invalid_argument("steklov_spectrum: count exceeds boundary size");
  Eigen::VectorXd isqrt = op.mass.array().sqrt().inverse();
  Eigen::MatrixXd B = isqrt.asDiagonal() * op.dtn * isqrt.asDiagonal();
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw std::runtime_error("steklov_spectrum: eigensolve failed");

  SpectralResult res;
  res.mass = op.mass;
  res.boundary_index = op.boundary_index;
  int keep = count < 0 ? nb : count;
  res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + keep);
  res.eigenvectors = isqrt.asDiagonal() * es.eigenvectors().leftCols(keep);
  res.truncated = keep < nb;
  res.clusters = cluster_eigenvalues(res.eigenvalues, gap_rel);

  double scale = op.dtn.norm();
  for (int j = 0; j < keep; ++j) {
    double r = (op.dtn * res.eigenvectors.col(j) -
                res.eigenvalues[j] * (op.mass.asDiagonal() * res.eigenvectors.col(j)))
                   .norm();
    res.max_residual = std::max(res.max_residual, r / std::max(1e-300, scale));
  }
  return res;
}

// Size of the maximal tolerance-cluster containing eigen_index.
inline int multiplicity(const SpectralResult& res, int eigen_index, double rel_tol = 1e-6) {
  auto clusters = cluster_eigenvalues(res.eigenvalues, rel_tol);
  for (const auto& c : clusters)
    if (eigen_index >= c.front() && eigen_index <= c.back()) {
      if (res.truncated && c.back() + 1 == static_cast<int>(res.eigenvalues.size()))
        throw std::runtime_error("multiplicity: cluster truncated; recompute with larger count");
      return static_cast<int>(c.size());
    }
  throw std::invalid_argument("multiplicity: index out of range");
}

// Index of the first eigenvalue cluster above zero (sigma_1's cluster).
inline std::vector<int> sigma1_cluster(const SpectralResult& res, double zero_tol = 1e-8,
                                       double rel_tol = 1e-6) {
  auto clusters = cluster_eigenvalues(res.eigenvalues, rel_tol);
  for (const auto& c : clusters)
    if (res.eigenvalues[c.front()] > zero_tol) return c;
  throw std::runtime_error("sigma1_cluster: no nonzero eigenvalue found");
}

// Discrete Rayleigh quotient (u^T L u) / (u_b^T M u_b) on a full vertex vector.
inline double rayleigh(const DiscreteSurface& s, const Eigen::VectorXd& u) {
  double energy = 0;
  for (const auto& e : s.edges) {
    double d = u[e.u] - u[e.v];
    energy += e.c * d * d;
  }
  double bnorm = 0;
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    bnorm += s.boundary_mass[i] * u[s.boundary_vertices[i]] * u[s.boundary_vertices[i]];
  if (bnorm <= 0) throw std::invalid_argument("rayleigh: zero boundary norm");
  return energy / bnorm;
}

// Harmonic extension of boundary data: u_I = -L_II^-1 L_IB u_B.
inline Eigen::VectorXd harmonic_extension(const DiscreteSurface& s,
                                          const Eigen::VectorXd& u_boundary) {
  std::vector<int> brow(s.n_vertices, -1), irow(s.n_vertices, -1);
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    brow[s.boundary_vertices[i]] = static_cast<int>(i);
  int ni = 0;
  for (int v = 0; v < s.n_vertices; ++v)
    if (brow[v] < 0) irow[v] = ni++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
  for (const auto& e : s.edges) {
    int iu = irow[e.u], iv = irow[e.v];
    if (iu >= 0 && iv >= 0) {
      trip.emplace_back(iu, iu, e.c);
      trip.emplace_back(iv, iv, e.c);
      trip.emplace_back(iu, iv, -e.c);
      trip.emplace_back(iv, iu, -e.c);
    } else if (iu >= 0 || iv >= 0) {
      int i = iu >= 0 ? iu : iv;
      int b = iu >= 0 ? brow[e.v] : brow[e.u];
      trip.emplace_back(i, i, e.c);
      rhs[i] += e.c * u_boundary[b];
    }
  }
  Eigen::SparseMatrix<double> Lii(ni, ni);
  Lii.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Lii);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("harmonic_extension: singular interior");
  Eigen::VectorXd ui = solver.solve(rhs);

  Eigen::VectorXd full(s.n_vertices);
  for (int v = 0; v < s.n_vertices; ++v) full[v] = brow[v] >= 0 ? u_boundary[brow[v]] : ui[irow[v]];
  return full;
}

// The test function f_i: 1 on region i away from its half-collars, the linear
// collar ramp dist(., mid-circle)/w on half-collars of region i, 0 elsewhere.
inline Eigen::VectorXd test_function(const DiscreteSurface& s, int region) {
  if (region < 0 || region >= s.n_regions)
    throw std::invalid_argument("test_function: region index out of range");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(s.n_vertices);
  for (int v = 0; v < s.n_vertices; ++v)
    if (s.region_of[v] == region) f[v] = s.ramp[v];
  return f;
}

// (2p-2) ell^2 / (4 A w(ell)).
inline double analytic_bound(int p, double ell, double a_const) {
  if (p < 3 || !(ell > 0) || !(a_const > 0))
    throw std::invalid_argument("analytic_bound: nonpositive input");
  return (2.0 * p - 2.0) * ell * ell / (4.0 * a_const * collar_half_width(ell));
}

// Total boundary mass of the part of the Steklov boundary inside region i
// (the constant A; ell-independent by construction).
inline double boundary_mass_of_region(const DiscreteSurface& s, int region) {
  double m = 0;
  for (size_t i = 0; i < s.boundary_vertices.size(); ++i)
    if (s.region_of[s.boundary_vertices[i]] == region) m += s.boundary_mass[i];
  return m;
}

// ---------------------------------------------------------------------------
// Symmetry and isotypic decomposition

// Boundary restriction of a vertex permutation; throws if the boundary is not
// preserved setwise.
inline std::vector<int> boundary_permutation(const SteklovOperator& op,
                                             const std::vector<int>& vertex_perm) {
  std::vector<int> bp(op.boundary_index.size());
  for (size_t r = 0; r < op.boundary_index.size(); ++r) {
    int img = op.row_of[vertex_perm[op.boundary_index[r]]];
    if (img < 0) throw std::runtime_error("boundary_permutation: boundary not preserved");
    bp[r] = img;
  }
  return bp;
}

inline double commutation_defect(const SteklovOperator& op, const std::vector<int>& bperm) {
  const int nb = static_cast<int>(op.dtn.rows());
  Eigen::MatrixXd conj(nb, nb);  // P^T dtn P, P the permutation row(v) -> row(g v)
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) conj(i, j) = op.dtn(bperm[i], bperm[j]);
  double scale = std::max(1e-300, op.dtn.norm());
  double mass_defect = 0;
  for (int i = 0; i < nb; ++i)
    mass_defect = std::max(mass_defect, std::abs(op.mass[bperm[i]] - op.mass[i]));
  return std::max((conj - op.dtn).norm() / scale, mass_defect / op.mass.maxCoeff());
}

struct IsotypicReport {
  std::map<std::string, int> multiplicity;
  bool delta1_acts_trivially = false;
  double commutation_defect = 0;
};

// Isotypic decomposition of an eigenvalue cluster under the surface's group
// action, via compressed character traces in the M-inner product.
inline IsotypicReport eigenspace_isotypic(const DiscreteSurface& s, const SteklovOperator& op,
                                          const SpectralResult& res, const std::vector<int>& cluster,
                                          const GroupContext& ctx, const std::vector<Irrep>& irreps,
                                          double commute_tol = 1e-8) {
  if (s.action.empty()) throw std::invalid_argument("eigenspace_isotypic: action not populated");
  IsotypicReport report;
  for (const GroupElement& gen : {ctx.delta1, ctx.delta2}) {
    double defect = commutation_defect(op, boundary_permutation(op, s.action[ctx.index_of(gen)]));
    report.commutation_defect = std::max(report.commutation_defect, defect);
  }
  if (report.commutation_defect > commute_tol)
    throw std::runtime_error("eigenspace_isotypic: action does not commute with the operator");

  Eigen::MatrixXd V(op.dtn.rows(), cluster.size());
  for (size_t j = 0; j < cluster.size(); ++j) V.col(j) = res.eigenvectors.col(cluster[j]);

  // t(g) = tr(V^T M P_g V) with (P_g x)(row(w)) = x(row(g^-1 w)).
  auto trace_fn = [&](const GroupElement& g) -> Complex {
    const auto& perm_inv = s.action[ctx.index_of(inv(g))];
    double t = 0;
    for (int r = 0; r < static_cast<int>(op.boundary_index.size()); ++r) {
      int src = op.row_of[perm_inv[op.boundary_index[r]]];
      t += op.mass[r] * V.row(r).dot(V.row(src));
    }
    return Complex(t, 0.0);
  };
  report.multiplicity = isotypic_multiplicities(ctx, irreps, trace_fn);
  report.delta1_acts_trivially =
      std::abs(trace_fn(ctx.delta1).real() - static_cast<double>(cluster.size())) < 1e-6;
  return report;
}

}  // namespace steklov
