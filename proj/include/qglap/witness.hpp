#pragma once
// When the kernel condition fails, the numerical range of the form is
// unbounded below. This module builds the explicit function sequence showing
// that: Rayleigh quotients marching to -infinity while every member satisfies
// the boundary conditions exactly.

#include <qglap/boundary.hpp>
#include <qglap/graph.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

namespace qglap {

struct WitnessEntry {
  int n = 0;
  double a = 0.0, b = 0.0, c = 0.0;  // piece breakpoints on each half-line
  cplx rayleigh;                     // form value over squared norm
  double norm_sq = 0.0;
  double bc_residual = 0.0;          // relative residual of the boundary data
};

struct WitnessSequence {
  Eigen::VectorXcd alpha;   // boundary vector: Q A alpha = 0, P alpha != 0
  double p_alpha_norm = 0.0;
  std::vector<WitnessEntry> entries;
};

namespace detail {

// Composite Simpson for real-valued integrands on [0, a].
template <class F>
double simpson(F&& fn, double a, int intervals = 32) {
  double acc = fn(0.0) + fn(a);
  for (int j = 1; j < intervals; ++j)
    acc += fn(j * a / intervals) * (j % 2 ? 4.0 : 2.0);
  return acc * a / (3.0 * intervals);
}

}  // namespace detail

// The n-th member lives on a star of half-lines with boundary data
// u(0) = alpha, u'(0) = H_n alpha, H_n = -(pinv(B) A + n P): an exponential
// e^{H_n x} alpha near the vertex, a polynomial ramp, then a cubic fade to
// zero. Values, derivatives, norms and energies all have closed or
// spectrally-exact forms; nothing here touches a grid.
inline WitnessSequence build_witness(const BoundaryCondition& bc, int n_max = 20,
                                     Tolerances tol = {}) {
  bc.validate();
  if (bc.graph.n_internal() != 0)
    throw refusal("build_witness: supported on graphs with only half-line edges");
  if (n_max < 1) throw input_error("build_witness: n_max must be at least 1");
  if (!check_max_rank(bc).ok)
    throw refusal("build_witness: (A|B) does not have full row rank");
  if (check_assumption_A(bc, tol).ok)
    throw refusal("build_witness: kernel condition holds, the form is bounded below");

  const Projectors pr = compute_projectors(bc.B, tol);
  const Eigen::MatrixXcd h0 = -(pr.B_pinv * bc.A);

  // alpha in Ker(Q A) maximizing ||P alpha||; failure of the kernel condition
  // guarantees the maximum is positive.
  const Eigen::MatrixXcd nbasis = kernel_basis(pr.Q * bc.A, bc.dim());
  if (nbasis.cols() == 0)
    throw refusal("build_witness: Q A has trivial kernel");
  const SvdInfo pn = svd_with_rank(pr.P * nbasis);
  WitnessSequence out;
  out.alpha = nbasis * pn.V.col(0);
  out.p_alpha_norm = pn.s(0);
  if (out.p_alpha_norm <= 1e-12)
    throw refusal("build_witness: kernel of Q A meets Ker P only");
  const Eigen::VectorXcd& alpha = out.alpha;

  // contiguous small n, then doubling
  std::vector<int> ns;
  for (int n = 1; n <= n_max && n <= 64; ++n) ns.push_back(n);
  for (int n = 128; n <= n_max; n *= 2) ns.push_back(n);
  if (!ns.empty() && ns.back() != n_max && n_max > 64) ns.push_back(n_max);

  for (int n : ns) {
    const Eigen::MatrixXcd h = h0 - double(n) * pr.P;
    const double hn = std::max(operator_norm(h), 1e-150);
    const double a = std::min(0.1, std::max(std::exp(-2.0 * hn), 1e-280) / (hn * hn));
    const double b = 2.0 * a;
    const double c = 1.0;

    const Eigen::MatrixXcd eha = (h * a).exp();
    const Eigen::VectorXcd v = h * (eha * alpha);   // u'(a), also the ramp slope scale
    const Eigen::VectorXcd g =
        (Eigen::MatrixXcd::Identity(bc.dim(), bc.dim()) + ((b - a) / (n + 1.0)) * h) *
        (eha * alpha);                               // plateau value gamma_n alpha
    const double mu = b - a;

    // exponential piece by quadrature (integrand is entire and tiny in extent)
    const double n_exp = detail::simpson(
        [&](double x) { return ((h * x).exp() * alpha).squaredNorm(); }, a);
    const double e_exp = detail::simpson(
        [&](double x) { return (h * ((h * x).exp() * alpha)).squaredNorm(); }, a);

    // ramp piece in closed form: p = g - mu r^{n+1}/(n+1) v, p' = r^n v
    const double n_p = mu * g.squaredNorm() -
                       2.0 * mu * mu * (g.dot(v)).real() / ((n + 1.0) * (n + 2.0)) +
                       mu * mu * mu * v.squaredNorm() / ((n + 1.0) * (n + 1.0) * (2.0 * n + 3.0));
    const double e_p = v.squaredNorm() * mu / (2.0 * n + 1.0);

    // cubic fade: s(t) = (1-t)^2 (1+2t), int s^2 = 13/35, int s'^2 = 6/5
    const double n_q = g.squaredNorm() * (c - b) * (13.0 / 35.0);
    const double e_q = g.squaredNorm() * (6.0 / 5.0) / (c - b);

    WitnessEntry w;
    w.n = n;
    w.a = a;
    w.b = b;
    w.c = c;
    w.norm_sq = n_exp + n_p + n_q;
    const cplx boundary = alpha.dot(h * alpha);
    w.rayleigh = (e_exp + e_p + e_q + boundary) / w.norm_sq;
    const Eigen::VectorXcd resid = bc.A * alpha + bc.B * (h * alpha);
    const double scale =
        bc.A.norm() * alpha.norm() + bc.B.norm() * (h * alpha).norm();
    w.bc_residual = scale > 0.0 ? resid.norm() / scale : resid.norm();
    out.entries.push_back(w);
  }
  return out;
}

}  // namespace qglap
