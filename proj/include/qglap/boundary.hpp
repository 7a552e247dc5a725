#pragma once
// Boundary conditions A psi + B psi' = 0 for the Laplacian on a metric graph,
// and their classification: quasi-m-accretive, m-sectorial, m-accretive,
// self-adjoint. Everything reduces to finite-dimensional linear algebra on the
// d x d coefficient pair (A, B).

#include <qglap/graph.hpp>
#include <qglap/numeric.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qglap {

struct Tolerances {
  double zero = 1e-10;  // relative cutoff for declaring a matrix zero
  double psd = 1e-10;   // relative slack in semidefiniteness decisions
};

struct BoundaryCondition {
  MetricGraph graph;
  Eigen::MatrixXcd A, B;

  int dim() const { return graph.boundary_dim(); }

  void validate() const {
    graph.validate();
    const int d = graph.boundary_dim();
    if (A.rows() != d || A.cols() != d || B.rows() != d || B.cols() != d)
      throw input_error("boundary condition: A and B must be square with the boundary dimension");
    if (!A.allFinite() || !B.allFinite())
      throw input_error("boundary condition: A and B must be finite");
  }
};

struct RankCheck {
  bool ok = false;
  double smin = 0.0;    // d-th singular value of (A|B)
  double cutoff = 0.0;  // rank threshold d * eps * sigma_max
};

// The pair is admissible only if (A|B) has full row rank d.
inline RankCheck check_max_rank(const BoundaryCondition& bc) {
  bc.validate();
  const int d = bc.dim();
  Eigen::MatrixXcd ab(d, 2 * d);
  ab << bc.A, bc.B;
  const SvdInfo f = svd_with_rank(ab, d);
  return {f.rank == d, f.s(d - 1), f.cutoff};
}

struct Projectors {
  Eigen::MatrixXcd P;       // orthogonal projector onto Ker B
  Eigen::MatrixXcd Q;       // orthogonal projector onto (Ran B)^perp
  Eigen::MatrixXcd B_pinv;  // Moore-Penrose inverse of B
  int rank_B = 0;
  double cutoff = 0.0;
};

inline Projectors compute_projectors(const Eigen::MatrixXcd& B, Tolerances tol = {}) {
  if (B.rows() != B.cols()) throw input_error("compute_projectors: B must be square");
  const int d = static_cast<int>(B.rows());
  SvdInfo f = svd_with_rank(B, d);
  // B is usually assembled from matrix products whose noise floor sits right
  // at d*eps*smax, so the range/kernel split uses the relative zero tolerance
  // instead: counting a noise direction as range corrupts Q and Pperp by O(1),
  // while dropping a genuinely tiny direction perturbs them by that amount.
  f.cutoff = std::max(f.cutoff, tol.zero * (f.s.size() > 0 ? f.s(0) : 0.0));
  f.rank = 0;
  for (Eigen::Index i = 0; i < f.s.size(); ++i)
    if (f.s(i) > f.cutoff) ++f.rank;
  Projectors pr;
  pr.rank_B = f.rank;
  pr.cutoff = f.cutoff;
  const auto vn = f.V.rightCols(d - f.rank);
  const auto un = f.U.rightCols(d - f.rank);
  pr.P = vn * vn.adjoint();
  pr.Q = un * un.adjoint();
  pr.B_pinv = pseudo_inverse(f);
  return pr;
}

struct AssumptionCheck {
  bool ok = false;
  double defect = 0.0;  // ||Q A Pperp||_F
  double cutoff = 0.0;
};

// The kernel condition Q A Pperp = 0: A must not couple the complement of
// Ker B into the complement of Ran B.
inline AssumptionCheck check_assumption_A(const BoundaryCondition& bc, Tolerances tol = {}) {
  bc.validate();
  const Projectors pr = compute_projectors(bc.B, tol);
  const int d = bc.dim();
  const Eigen::MatrixXcd pperp = Eigen::MatrixXcd::Identity(d, d) - pr.P;
  const double defect = (pr.Q * bc.A * pperp).norm();
  const double cutoff = tol.zero * (1.0 + bc.A.norm());
  return {defect <= cutoff, defect, cutoff};
}

// Canonical form of an admissible pair: conditions P psi = 0 and
// Pperp psi' = L psi with L = pinv(B) A Pperp mapping Ran(Pperp) to itself.
struct NormalizedBC {
  Eigen::MatrixXcd P;
  Eigen::MatrixXcd L;

  Eigen::MatrixXcd Pperp() const {
    return Eigen::MatrixXcd::Identity(P.rows(), P.cols()) - P;
  }
};

inline NormalizedBC normalize(const BoundaryCondition& bc, Tolerances tol = {}) {
  const RankCheck rk = check_max_rank(bc);
  if (!rk.ok) throw refusal("normalize: (A|B) does not have full row rank");
  const AssumptionCheck aa = check_assumption_A(bc, tol);
  if (!aa.ok) throw refusal("normalize: kernel condition fails, no canonical form exists");
  const Projectors pr = compute_projectors(bc.B, tol);
  NormalizedBC nf;
  nf.P = pr.P;
  nf.L = pr.B_pinv * bc.A * nf.Pperp();
  return nf;
}

// The pair (P + L, Pperp) describing the same conditions as the original.
inline BoundaryCondition rebuild(const MetricGraph& g, const NormalizedBC& nf) {
  BoundaryCondition bc;
  bc.graph = g;
  bc.A = nf.P + nf.L;
  bc.B = nf.Pperp();
  return bc;
}

// Largest principal angle (its sine) between Ker(A1|B1) and Ker(A2|B2).
inline double subspace_gap(const BoundaryCondition& bc1, const BoundaryCondition& bc2) {
  if (bc1.dim() != bc2.dim()) throw input_error("subspace_gap: dimension mismatch");
  if (!check_max_rank(bc1).ok || !check_max_rank(bc2).ok)
    throw refusal("subspace_gap: both pairs must have full row rank");
  const int d = bc1.dim();
  auto proj = [&](const BoundaryCondition& bc) {
    Eigen::MatrixXcd ab(d, 2 * d);
    ab << bc.A, bc.B;
    const Eigen::MatrixXcd k = kernel_basis(ab, d);
    return (k * k.adjoint()).eval();
  };
  return operator_norm(proj(bc1) - proj(bc2));
}

// Same conditions up to an invertible change of rows?
inline bool equivalent(const BoundaryCondition& bc1, const BoundaryCondition& bc2,
                       double tol = 1e-8) {
  return subspace_gap(bc1, bc2) <= tol;
}

// Boundary contribution of the interval ends: for each internal edge of length
// a, the 2x2 block [[-1/a, 1/a], [1/a, -1/a]] on its two value coordinates.
inline Eigen::MatrixXd m0_matrix(const MetricGraph& g) {
  const int d = g.boundary_dim();
  const int ne = g.n_external();
  const int ni = g.n_internal();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < ni; ++i) {
    const double inv = 1.0 / g.internal_edges[i].length;
    const int s = ne + i;
    const int t = ne + ni + i;
    m(s, s) -= inv;
    m(t, t) -= inv;
    m(s, t) += inv;
    m(t, s) += inv;
  }
  return m;
}

inline Eigen::MatrixXcd accretivity_matrix(const BoundaryCondition& bc) {
  return hermitian_part(bc.A * bc.B.adjoint()) +
         bc.B * m0_matrix(bc.graph) * bc.B.adjoint();
}

struct AccretivityCheck {
  bool ok = false;
  bool rank_ok = false;
  double max_eig = 0.0;
  double cutoff = 0.0;
};

// m-accretive iff max rank and Re(A B*) + B M0 B* <= 0. A true verdict also
// implies the kernel condition; that implication is re-checked here because a
// violation would mean a numerical inconsistency, not a borderline input.
inline AccretivityCheck check_m_accretive(const BoundaryCondition& bc, Tolerances tol = {}) {
  AccretivityCheck out;
  out.rank_ok = check_max_rank(bc).ok;
  const Eigen::MatrixXcd m = accretivity_matrix(bc);
  double norm2 = 0.0;
  const bool nsd = negative_semidefinite(m, tol.psd, &out.max_eig, &norm2);
  out.cutoff = tol.psd * (1.0 + norm2);
  out.ok = out.rank_ok && nsd;
  if (out.ok) {
    Tolerances loose = tol;
    loose.zero = 1e-6;
    if (!check_assumption_A(bc, loose).ok)
      throw std::logic_error("check_m_accretive: verdict true but kernel condition fails");
  }
  return out;
}

inline NormalizedBC real_part(const BoundaryCondition& bc, Tolerances tol = {}) {
  NormalizedBC nf = normalize(bc, tol);
  nf.L = hermitian_part(nf.L);
  return nf;
}

inline bool check_self_adjoint(const BoundaryCondition& bc, Tolerances tol = {}) {
  if (!check_max_rank(bc).ok || !check_assumption_A(bc, tol).ok) return false;
  const NormalizedBC nf = normalize(bc, tol);
  return (nf.L - nf.L.adjoint()).norm() <= tol.zero * (1.0 + nf.L.norm());
}

struct QwbResult {
  bool negative_semidefinite = false;
  double max_eig = 0.0;
};

// The block matrix [[A, B*], [B, 0]] with A Hermitian is negative
// semidefinite iff A <= 0 and B = 0. The verdict is cross-checked against
// that equivalence; disagreement outside the tolerance band is a hard error.
inline QwbResult qwb_check(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                           Tolerances tol = {}) {
  if (A.rows() != A.cols()) throw input_error("qwb_check: A must be square");
  if (B.cols() != A.rows()) throw input_error("qwb_check: B must have as many columns as A");
  if ((A - A.adjoint()).norm() > tol.zero * (1.0 + A.norm()) * 1e3)
    throw input_error("qwb_check: A must be Hermitian");
  const Eigen::Index p = A.rows();
  const Eigen::Index q = B.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(p + q, p + q);
  m.topLeftCorner(p, p) = hermitian_part(A);
  m.topRightCorner(p, q) = B.adjoint();
  m.bottomLeftCorner(q, p) = B;
  QwbResult out;
  double norm2 = 0.0;
  out.negative_semidefinite = negative_semidefinite(m, tol.psd, &out.max_eig, &norm2);

  const double t = tol.psd * (1.0 + norm2);
  const double norm_a = operator_norm(A);
  const double sig_b = operator_norm(B);
  double max_eig_a = 0.0;
  negative_semidefinite(A, tol.psd, &max_eig_a, nullptr);
  if (out.negative_semidefinite) {
    // A is a principal submatrix, so lambda_max(A) <= lambda_max(M); and any
    // singular pair of B yields sigma_max(B)^2 <= t (t + ||A||).
    const double band = 1.01 * std::sqrt(std::max(t * (t + norm_a), 0.0)) + t;
    if (max_eig_a > 10.0 * t + 10.0 * machine_eps * (1.0 + norm_a) ||
        sig_b > 10.0 * band + 10.0 * machine_eps * (1.0 + norm_a))
      throw std::logic_error("qwb_check: block verdict inconsistent with A <= 0 and B = 0");
  } else {
    if (max_eig_a <= t / 10.0 && sig_b <= t / 10.0)
      throw std::logic_error("qwb_check: A <= 0 and B ~ 0 but block verdict is negative");
  }
  return out;
}

struct Classification {
  bool rank_ok = false;
  bool assumption_A_ok = false;
  bool quasi_m_accretive = false;
  bool m_sectorial = false;
  bool m_accretive = false;
  bool self_adjoint = false;

  double rank_smin = 0.0;
  double rank_cutoff = 0.0;
  double assumption_defect = 0.0;
  double assumption_cutoff = 0.0;
  double accretivity_max_eig = 0.0;
  double accretivity_cutoff = 0.0;

  std::optional<NormalizedBC> normalized;  // present iff quasi_m_accretive
  std::optional<NormalizedBC> real;        // ditto

  Tolerances tol;
};

// Total classification: never throws on admissible input shapes, degenerate
// pairs simply come back with rank_ok = false.
inline Classification classify(const BoundaryCondition& bc, Tolerances tol = {}) {
  bc.validate();
  Classification c;
  c.tol = tol;
  const RankCheck rk = check_max_rank(bc);
  c.rank_ok = rk.ok;
  c.rank_smin = rk.smin;
  c.rank_cutoff = rk.cutoff;
  const AssumptionCheck aa = check_assumption_A(bc, tol);
  c.assumption_A_ok = aa.ok;
  c.assumption_defect = aa.defect;
  c.assumption_cutoff = aa.cutoff;
  c.quasi_m_accretive = c.rank_ok && c.assumption_A_ok;
  c.m_sectorial = c.quasi_m_accretive;
  const AccretivityCheck ac = check_m_accretive(bc, tol);
  c.accretivity_max_eig = ac.max_eig;
  c.accretivity_cutoff = ac.cutoff;
  // In exact arithmetic ac.ok implies the kernel condition; the conjunction
  // only guards rounding at the tolerance boundary.
  c.m_accretive = ac.ok && c.assumption_A_ok;
  if (c.quasi_m_accretive) {
    c.normalized = normalize(bc, tol);
    NormalizedBC re = *c.normalized;
    re.L = hermitian_part(re.L);
    c.real = re;
    c.self_adjoint =
        (c.normalized->L - c.normalized->L.adjoint()).norm() <=
        tol.zero * (1.0 + c.normalized->L.norm());
  }
  return c;
}

}  // namespace qglap
