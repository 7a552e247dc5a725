#pragma once
// Finite-dimensional stand-ins for the graph Laplacian. Two reductions:
// a collocation matrix for spectra and forced evolution, and a Galerkin pair
// (stiffness, mass) on the form domain whose accretivity is exact, used for
// growth bounds and Crank-Nicolson heat flow.

#include <qglap/boundary.hpp>
#include <qglap/graph.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace qglap {

struct GridSpec {
  double h = 0.05;
  double R = 0.0;  // <= 0 means default_truncation(graph)
};

namespace detail {

inline EdgeGrid spec_grid(const MetricGraph& g, const GridSpec& spec, int min_nodes) {
  const double R = spec.R > 0.0 ? spec.R : default_truncation(g);
  EdgeGrid grid = make_grid(g, spec.h, R);
  for (const auto& xe : grid.x)
    if (xe.size() < min_nodes)
      throw input_error("discretize: an edge has fewer than 5 grid points");
  return grid;
}

inline Eigen::MatrixXcd cap_rows(const EdgeGrid& grid) {
  const auto off = grid.node_offsets();
  Eigen::MatrixXcd caps = Eigen::MatrixXcd::Zero(grid.n_external, grid.total_nodes());
  for (int e = 0; e < grid.n_external; ++e)
    caps(e, off[e] + grid.x[e].size() - 1) = 1.0;
  return caps;
}

inline Eigen::VectorXd node_weights(const EdgeGrid& grid) {
  Eigen::VectorXd w(grid.total_nodes());
  Eigen::Index at = 0;
  for (const auto& xe : grid.x) {
    w.segment(at, xe.size()) = trapezoid_weights(xe);
    at += xe.size();
  }
  return w;
}

}  // namespace detail

struct DiscreteOperator {
  EdgeGrid grid;
  Eigen::MatrixXcd Z;      // orthonormal basis of the constraint kernel
  Eigen::MatrixXcd T_red;  // collocation reduction of -d^2/dx^2
  Eigen::VectorXd weights; // trapezoid weights per node
};

// Nodes satisfy the boundary conditions (via the discrete trace) and Dirichlet
// caps at the truncation radius; interior nodes carry the standard 3-point
// second difference. The reduced matrix represents the operator on the
// constraint kernel by collocation at interior nodes.
inline DiscreteOperator assemble(const BoundaryCondition& bc, GridSpec spec = {}) {
  bc.validate();
  DiscreteOperator op;
  op.grid = detail::spec_grid(bc.graph, spec, 5);
  const EdgeGrid& grid = op.grid;
  const int n = grid.total_nodes();
  const int d = grid.boundary_dim();
  const auto off = grid.node_offsets();

  const TraceMatrices tm = trace_matrices(grid);
  Eigen::MatrixXcd con(d + grid.n_external, n);
  con.topRows(d) = bc.A * tm.Ev + bc.B * tm.Ed;
  con.bottomRows(grid.n_external) = detail::cap_rows(grid);
  op.Z = kernel_basis(con, -1);
  if (op.Z.cols() != n - 2 * grid.n_edges())
    throw refusal("assemble: discrete constraints are degenerate");

  const int ni = n - 2 * grid.n_edges();
  Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(ni, n);
  Eigen::MatrixXcd sten = Eigen::MatrixXcd::Zero(ni, n);
  int row = 0;
  for (int e = 0; e < grid.n_edges(); ++e) {
    const auto& xe = grid.x[e];
    const double h2 = (xe(1) - xe(0)) * (xe(1) - xe(0));
    for (Eigen::Index j = 1; j + 1 < xe.size(); ++j, ++row) {
      sel(row, off[e] + j) = 1.0;
      sten(row, off[e] + j - 1) = -1.0 / h2;
      sten(row, off[e] + j) = 2.0 / h2;
      sten(row, off[e] + j + 1) = -1.0 / h2;
    }
  }
  const Eigen::MatrixXcd sz = sel * op.Z;
  const Eigen::MatrixXcd rz = sten * op.Z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sz);
  op.T_red = lu.solve(rz);
  if ((sz * op.T_red - rz).norm() > 1e-8 * (1.0 + rz.norm()))
    throw refusal("assemble: interior collocation system is singular");
  op.weights = detail::node_weights(grid);
  return op;
}

// Eigenvalues of the reduced operator, sorted by real part then imaginary.
inline Eigen::VectorXcd spectrum(const DiscreteOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.T_red);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
  Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<cplx> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct FormOperator {
  EdgeGrid grid;
  Eigen::MatrixXcd Z;      // kernel of {P psi = 0, caps}
  Eigen::MatrixXcd G_red;  // reduced form matrix (stiffness minus boundary coupling)
  Eigen::MatrixXcd M_red;  // reduced lumped mass
};

// Galerkin matrices of the normalized form on piecewise-linear functions.
// Only quasi-m-accretive conditions have one.
inline FormOperator build_form_operator(const BoundaryCondition& bc, GridSpec spec = {},
                                        Tolerances tol = {}) {
  const NormalizedBC nf = normalize(bc, tol);
  FormOperator fo;
  fo.grid = detail::spec_grid(bc.graph, spec, 5);
  const EdgeGrid& grid = fo.grid;
  const int n = grid.total_nodes();
  const auto off = grid.node_offsets();

  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < grid.n_edges(); ++e) {
    const auto& xe = grid.x[e];
    for (Eigen::Index j = 0; j + 1 < xe.size(); ++j) {
      const double w = 1.0 / (xe(j + 1) - xe(j));
      const int p = off[e] + static_cast<int>(j);
      stiff(p, p) += w;
      stiff(p + 1, p + 1) += w;
      stiff(p, p + 1) -= w;
      stiff(p + 1, p) -= w;
    }
  }
  const TraceMatrices tm = trace_matrices(grid);
  const Eigen::MatrixXcd pperp = nf.Pperp();
  Eigen::MatrixXcd g = stiff.cast<cplx>();
  g -= tm.Ev.adjoint() * (pperp * nf.L * pperp) * tm.Ev;

  const SvdInfo pf = svd_with_rank(nf.P, static_cast<int>(nf.P.rows()));
  Eigen::MatrixXcd con(pf.rank + grid.n_external, n);
  con.topRows(pf.rank) = pf.U.leftCols(pf.rank).adjoint() * tm.Ev;
  con.bottomRows(grid.n_external) = detail::cap_rows(grid);
  fo.Z = kernel_basis(con, -1);

  const Eigen::VectorXcd w = detail::node_weights(grid).cast<cplx>();
  Eigen::MatrixXcd wz = fo.Z;
  for (Eigen::Index i = 0; i < wz.rows(); ++i) wz.row(i) *= w(i);
  fo.G_red = fo.Z.adjoint() * g * fo.Z;
  fo.M_red = fo.Z.adjoint() * wz;
  return fo;
}

struct GrowthBound {
  double omega = 0.0;           // Richardson-extrapolated lower form bound
  double error_estimate = 0.0;
  double omega_coarse = 0.0;
  double omega_fine = 0.0;
};

namespace detail {

inline double form_min_eig(const FormOperator& fo) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      hermitian_part(fo.G_red), hermitian_part(fo.M_red),
      Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("growth_bound: generalized eigensolver failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace detail

// Smallest Rayleigh quotient of the form, i.e. the omega with
// ||e^{-tH} psi|| <= e^{-omega t} ||psi||, estimated at h and h/2.
inline GrowthBound growth_bound(const BoundaryCondition& bc, GridSpec spec = {},
                                Tolerances tol = {}) {
  GrowthBound out;
  out.omega_coarse = detail::form_min_eig(build_form_operator(bc, spec, tol));
  GridSpec fine = spec;
  fine.h = spec.h / 2.0;
  out.omega_fine = detail::form_min_eig(build_form_operator(bc, fine, tol));
  out.omega = out.omega_fine + (out.omega_fine - out.omega_coarse) / 3.0;
  out.error_estimate = std::abs(out.omega_fine - out.omega_coarse) / 3.0;
  return out;
}

struct EvolveOptions {
  bool force = false;       // run the collocation path even without the theory's blessing
  std::uint64_t seed = 42;  // initial-state generator
  // explicit initial profile (edge index, x) -> value; seeded bump when absent
  std::function<cplx(int, double)> initial;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;
  bool used_form_path = true;
};

namespace detail {

inline Eigen::VectorXcd seeded_initial_state(const EdgeGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  EdgeFunction f = EdgeFunction::zero(grid);
  for (int e = 0; e < grid.n_edges(); ++e) {
    const cplx amp(1.0 + 0.25 * uni(rng), 0.25 * uni(rng));
    const double shift = 0.25 * uni(rng);
    const auto& xe = grid.x[e];
    const double len = xe(xe.size() - 1);
    for (Eigen::Index j = 0; j < xe.size(); ++j) {
      const double x = xe(j);
      const double bump = grid.is_external(e)
                              ? x * std::exp(-(1.0 + shift) * x)
                              : std::pow(x * (len - x) / (len * len), 2);
      f.values[e](j) = amp * bump;
    }
  }
  return stack(f);
}

inline Eigen::VectorXcd initial_state(const EdgeGrid& grid, const EvolveOptions& opt) {
  if (opt.initial) return stack(sample(grid, opt.initial));
  return seeded_initial_state(grid, opt.seed);
}

}  // namespace detail

// Crank-Nicolson heat flow d/dt u = -H u. Quasi-m-accretive conditions run on
// the Galerkin pair, where discrete accretivity is exact; anything else is
// refused unless forced onto the collocation matrix.
inline Trajectory evolve(const BoundaryCondition& bc, GridSpec spec, double dt, double t_end,
                         EvolveOptions opt = {}, Tolerances tol = {}) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw input_error("evolve: dt and t_end must be positive");
  const Classification cls = classify(bc, tol);
  Trajectory out;
  const int steps = static_cast<int>(std::llround(std::ceil(t_end / dt - 1e-12)));

  if (cls.quasi_m_accretive) {
    const FormOperator fo = build_form_operator(bc, spec, tol);
    const Eigen::VectorXcd v0 = detail::initial_state(fo.grid, opt);
    const Eigen::VectorXcd w = detail::node_weights(fo.grid).cast<cplx>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> mass_lu(fo.M_red);
    Eigen::VectorXcd c = mass_lu.solve(fo.Z.adjoint() * v0.cwiseProduct(w));
    const Eigen::MatrixXcd lhs = fo.M_red + (dt / 2.0) * fo.G_red;
    const Eigen::MatrixXcd rhs = fo.M_red - (dt / 2.0) * fo.G_red;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
    auto mnorm = [&](const Eigen::VectorXcd& u) {
      return std::sqrt(std::max(0.0, (u.dot(fo.M_red * u)).real()));
    };
    out.used_form_path = true;
    out.times.push_back(0.0);
    out.norms.push_back(mnorm(c));
    for (int k = 1; k <= steps; ++k) {
      c = lu.solve(rhs * c);
      out.times.push_back(k * dt);
      out.norms.push_back(mnorm(c));
    }
    return out;
  }

  if (!opt.force)
    throw refusal("evolve: conditions are not quasi-m-accretive; pass force to run anyway");

  const DiscreteOperator op = assemble(bc, spec);
  const Eigen::VectorXcd v0 = detail::initial_state(op.grid, opt);
  Eigen::VectorXcd c = op.Z.adjoint() * v0;
  const Eigen::Index m = op.T_red.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(id + (dt / 2.0) * op.T_red);
  const Eigen::MatrixXcd rhs = id - (dt / 2.0) * op.T_red;
  auto wnorm = [&](const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd v = op.Z * u;
    return std::sqrt((op.weights.array() * v.array().abs2()).sum());
  };
  out.used_form_path = false;
  out.times.push_back(0.0);
  out.norms.push_back(wnorm(c));
  for (int k = 1; k <= steps; ++k) {
    c = lu.solve(rhs * c);
    out.times.push_back(k * dt);
    out.norms.push_back(wnorm(c));
  }
  return out;
}

struct ContractivityAudit {
  bool monotone_ok = true;         // no step grows the norm beyond tol_step
  bool envelope_ok = true;         // norms stay under norm0 * e^{-omega t} * (1 + tol_envelope)
  double max_step_growth = 0.0;    // worst norms[k+1]/norms[k] - 1
  double max_envelope_excess = 0.0;
};

inline ContractivityAudit audit_contractivity(const Trajectory& traj, double omega,
                                              double tol_step = 1e-10,
                                              double tol_envelope = 1e-2) {
  ContractivityAudit a;
  const std::size_t n = traj.norms.size();
  if (n == 0) return a;
  const double n0 = traj.norms[0];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (traj.norms[k] > 0.0)
      a.max_step_growth = std::max(a.max_step_growth, traj.norms[k + 1] / traj.norms[k] - 1.0);
  }
  a.monotone_ok = a.max_step_growth <= tol_step;
  for (std::size_t k = 0; k < n; ++k) {
    const double bound = n0 * std::exp(-omega * traj.times[k]);
    if (bound > 0.0)
      a.max_envelope_excess = std::max(a.max_envelope_excess, traj.norms[k] / bound - 1.0);
  }
  a.envelope_ok = a.max_envelope_excess <= tol_envelope;
  return a;
}

}  // namespace qglap
