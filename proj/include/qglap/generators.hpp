#pragma once
// Ready-made families of boundary conditions on small graphs.

#include <qglap/boundary.hpp>
#include <qglap/graph.hpp>

#include <cmath>

namespace qglap {

inline MetricGraph star_graph(int degree) {
  if (degree < 1) throw input_error("star_graph: degree must be at least 1");
  MetricGraph g;
  g.vertices = {0};
  g.external_edges.assign(degree, ExternalEdge{0});
  return g;
}

// Continuity across the vertex plus sum of inward derivatives = -gamma * value:
// rows psi_i - psi_{i+1} = 0 and gamma psi_n + sum psi'_e = 0.
inline BoundaryCondition gen_delta(int degree, cplx gamma) {
  BoundaryCondition bc;
  bc.graph = star_graph(degree);
  const int d = degree;
  bc.A = Eigen::MatrixXcd::Zero(d, d);
  bc.B = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    bc.A(i, i) = 1.0;
    bc.A(i, i + 1) = -1.0;
  }
  bc.A(d - 1, d - 1) = gamma;
  bc.B.row(d - 1).setOnes();
  return bc;
}

// Derivative continuity plus sum of values = -gamma * derivative: the roles of
// the two delta blocks swapped. Needs gamma != 0 for an invertible B.
inline BoundaryCondition gen_delta_prime(int degree, cplx gamma) {
  if (std::abs(gamma) == 0.0)
    throw input_error("gen_delta_prime: gamma must be nonzero");
  BoundaryCondition bc;
  bc.graph = star_graph(degree);
  const int d = degree;
  bc.A = Eigen::MatrixXcd::Zero(d, d);
  bc.B = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    bc.B(i, i) = 1.0;
    bc.B(i, i + 1) = -1.0;
  }
  bc.B(d - 1, d - 1) = gamma;
  bc.A.row(d - 1).setOnes();
  return bc;
}

// Two half-lines with a tau-twisted coupling: full rank for every tau, but the
// kernel condition fails on [0, pi/2) and the form is unbounded below there.
// At tau = pi/2 the conditions become self-adjoint.
inline BoundaryCondition gen_counterexample(double tau) {
  BoundaryCondition bc;
  bc.graph = star_graph(2);
  bc.A = Eigen::MatrixXcd::Zero(2, 2);
  bc.B = Eigen::MatrixXcd::Zero(2, 2);
  const cplx i(0.0, 1.0);
  bc.A(0, 0) = 1.0;
  bc.A(0, 1) = -std::exp(i * tau);
  bc.B(1, 0) = 1.0;
  bc.B(1, 1) = -std::exp(-i * tau);
  return bc;
}

}  // namespace qglap
