#pragma once
// Sesquilinear form of the graph Laplacian evaluated on sampled functions:
// Dirichlet energy plus boundary pairing, the normalized variant, numerical
// range sampling, and the endpoint trace estimate.

#include <qglap/boundary.hpp>
#include <qglap/graph.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qglap {

struct FormValue {
  double dirichlet = 0.0;   // integral of |f'|^2
  cplx boundary = 0.0;      // <psi, psi'> (or -<psi, L psi> in normalized form)
  cplx value = 0.0;         // dirichlet + boundary
  double norm_sq = 0.0;
  double bc_residual = 0.0; // relative trace residual against the conditions
};

namespace detail {

// f_scale guards the denominator for functions whose trace is itself near
// zero (a Dirichlet eigenfunction has psi ~ 0; the residual must compare
// against the size of the function, not of its vanishing trace).
inline double trace_residual(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                             const Trace& t, double f_scale = 0.0) {
  const double err = (A * t.psi + B * t.psi_prime).norm();
  const double scale =
      A.norm() * (t.psi.norm() + f_scale) + B.norm() * (t.psi_prime.norm() + f_scale);
  return scale > 0.0 ? err / scale : err;
}

inline double sup_norm(const EdgeFunction& f) {
  double m = 0.0;
  for (const auto& v : f.values)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace detail

// Form value delta[f] = integral |f'|^2 + <psi, psi'>. The sampled function
// must satisfy the boundary conditions up to tol_bc (relative), else the
// evaluation is refused: outside the form domain the value is meaningless.
inline FormValue quadratic_form(const EdgeFunction& f, const BoundaryCondition& bc,
                                double tol_bc = 1e-6) {
  bc.validate();
  if (f.grid.boundary_dim() != bc.dim())
    throw input_error("quadratic_form: grid does not match the graph");
  const Trace t = trace(f);
  FormValue out;
  out.bc_residual = detail::trace_residual(bc.A, bc.B, t, detail::sup_norm(f));
  if (out.bc_residual > tol_bc)
    throw refusal("quadratic_form: function violates the boundary conditions");
  out.dirichlet = dirichlet_energy(f);
  out.boundary = t.psi.dot(t.psi_prime);
  out.value = out.dirichlet + out.boundary;
  out.norm_sq = norm_sq(f);
  return out;
}

// Normalized variant: on {P psi = 0} the form is integral |f'|^2 - <psi, L psi>,
// no derivative trace involved.
inline FormValue quadratic_form_normalized(const EdgeFunction& f, const NormalizedBC& nf,
                                           double tol_bc = 1e-6) {
  const Trace t = trace(f);
  if (t.psi.size() != nf.P.rows())
    throw input_error("quadratic_form_normalized: dimension mismatch");
  FormValue out;
  out.bc_residual = (nf.P * t.psi).norm() / (1.0 + t.psi.norm());
  if (out.bc_residual > tol_bc)
    throw refusal("quadratic_form_normalized: P psi != 0");
  const Eigen::VectorXcd p = nf.Pperp() * t.psi;
  out.dirichlet = dirichlet_energy(f);
  out.boundary = -p.dot(nf.L * p);
  out.value = out.dirichlet + out.boundary;
  out.norm_sq = norm_sq(f);
  return out;
}

// <f, -f''> by direct quadrature; integration by parts makes this agree with
// quadratic_form up to discretization error, for any smooth f.
inline cplx direct_pairing(const EdgeFunction& f) {
  cplx acc = 0.0;
  for (int e = 0; e < f.grid.n_edges(); ++e) {
    const Eigen::VectorXcd dd = second_derivative_samples(f.grid.x[e], f.values[e]);
    const Eigen::VectorXd w = trapezoid_weights(f.grid.x[e]);
    for (Eigen::Index j = 0; j < w.size(); ++j)
      acc += w(j) * std::conj(f.values[e](j)) * (-dd(j));
  }
  return acc;
}

// |f(end)|^2 <= (2/l) ||f||^2 + l ||f'||^2 with norms over a window of length
// l at that end. The window snaps to grid nodes and l_used reports the exact
// length entering the bound.
struct TraceBoundRecord {
  int edge = 0;
  bool terminal = false;
  double l_used = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline std::vector<TraceBoundRecord> trace_inequality_check(const EdgeFunction& f, double l) {
  if (!(l > 0.0)) throw input_error("trace_inequality_check: l must be positive");
  std::vector<TraceBoundRecord> out;
  for (int e = 0; e < f.grid.n_edges(); ++e) {
    const auto& x = f.grid.x[e];
    const auto& v = f.values[e];
    const Eigen::Index n = x.size();
    const double len = x(n - 1);
    if (l > len * (1.0 + 1e-12))
      throw input_error("trace_inequality_check: window longer than the edge");
    const Eigen::VectorXcd g = derivative_samples(x, v);
    auto record = [&](bool terminal) {
      // nodes within distance l of the chosen end
      Eigen::Index lo = 0, hi = n - 1;
      if (!terminal) {
        while (hi > 2 && x(hi) > l * (1.0 + 1e-12)) --hi;
      } else {
        while (lo < n - 3 && len - x(lo) > l * (1.0 + 1e-12)) ++lo;
      }
      const Eigen::Index m = hi - lo + 1;
      const double l_used = x(hi) - x(lo);
      const Eigen::VectorXd w = trapezoid_weights(x.segment(lo, m));
      const double nrm = (w.array() * v.segment(lo, m).array().abs2()).sum();
      const double en = (w.array() * g.segment(lo, m).array().abs2()).sum();
      TraceBoundRecord r;
      r.edge = e;
      r.terminal = terminal;
      r.l_used = l_used;
      r.lhs = std::norm(v(terminal ? n - 1 : 0));
      r.rhs = (2.0 / l_used) * nrm + l_used * en;
      out.push_back(r);
    };
    record(false);
    if (!f.grid.is_external(e)) record(true);
  }
  return out;
}

struct NumRangeOptions {
  double h = 0.125;
  double R = 0.0;  // <= 0: default truncation for the graph
  int samples = 100;
  std::uint64_t seed = 42;
};

struct NumRangeSample {
  cplx rayleigh;
  double norm_sq = 0.0;
};

// Random smooth functions pushed into the discrete form domain by a
// minimal-norm correction, then Rayleigh quotients of the form. The
// correction solves the same trace constraints quadratic_form checks, so the
// samples pass its residual test by construction.
inline std::vector<NumRangeSample> sample_numerical_range(const BoundaryCondition& bc,
                                                          NumRangeOptions opt = {}) {
  bc.validate();
  const double R = opt.R > 0.0 ? opt.R : default_truncation(bc.graph);
  const EdgeGrid grid = make_grid(bc.graph, opt.h, R);
  const TraceMatrices tm = trace_matrices(grid);
  const int n = grid.total_nodes();
  const int d = grid.boundary_dim();
  const auto off = grid.node_offsets();

  Eigen::MatrixXcd c(d + grid.n_external, n);
  c.topRows(d) = bc.A * tm.Ev + bc.B * tm.Ed;
  c.bottomRows(grid.n_external).setZero();
  for (int e = 0; e < grid.n_external; ++e)
    c(d + e, off[e] + grid.x[e].size() - 1) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(c);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto rc = [&] { return cplx(uni(rng), uni(rng)); };

  std::vector<NumRangeSample> out;
  out.reserve(opt.samples);
  int guard = 0;
  while (static_cast<int>(out.size()) < opt.samples && guard < 20 * opt.samples + 100) {
    ++guard;
    EdgeFunction f = EdgeFunction::zero(grid);
    for (int e = 0; e < grid.n_edges(); ++e) {
      const cplx c0 = rc(), c1 = rc(), c2 = rc(), c3 = rc();
      const double k = 0.5 + std::abs(uni(rng));
      const double len = grid.x[e](grid.x[e].size() - 1);
      for (Eigen::Index j = 0; j < grid.x[e].size(); ++j) {
        const double x = grid.x[e](j);
        cplx val = c0 + c1 * x + c2 * x * x + c3 * std::sin(3.0 * x / len);
        if (grid.is_external(e)) val *= std::exp(-k * x);
        f.values[e](j) = val;
      }
    }
    Eigen::VectorXcd v = stack(f);
    v += cod.solve(-(c * v));
    if ((c * v).norm() > 1e-10 * (1.0 + v.norm())) continue;
    const EdgeFunction g = unstack(grid, v);
    const double ns = norm_sq(g);
    if (ns < 1e-8) continue;
    const FormValue fv = quadratic_form(g, bc, 1e-8);
    out.push_back({fv.value / ns, ns});
  }
  if (static_cast<int>(out.size()) < opt.samples)
    throw std::runtime_error("sample_numerical_range: could not generate enough samples");
  return out;
}

}  // namespace qglap
