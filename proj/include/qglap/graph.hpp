#pragma once
// Finite metric graphs: intervals and half-lines glued at vertices, sampled
// edge functions, and the boundary trace map (values and inward derivatives).

#include <qglap/numeric.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace qglap {

// Bad user input: malformed files, dimension mismatches, invalid parameters.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation declined on mathematical grounds (preconditions of the theory).
struct refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal edges are intervals [0, length]; external edges are half-lines [0, inf),
// each attached to a vertex at x = 0.
struct InternalEdge {
  std::int64_t from = 0;
  std::int64_t to = 0;
  double length = 0.0;
};

struct ExternalEdge {
  std::int64_t from = 0;
};

struct MetricGraph {
  std::vector<std::int64_t> vertices;
  std::vector<InternalEdge> internal_edges;
  std::vector<ExternalEdge> external_edges;

  int n_internal() const { return static_cast<int>(internal_edges.size()); }
  int n_external() const { return static_cast<int>(external_edges.size()); }
  int n_edges() const { return n_internal() + n_external(); }

  // Dimension of the space of boundary values: one per half-line end plus two
  // per interval.
  int boundary_dim() const { return n_external() + 2 * n_internal(); }

  double max_internal_length() const {
    double m = 0.0;
    for (const auto& e : internal_edges) m = std::max(m, e.length);
    return m;
  }

  void validate() const {
    if (vertices.empty()) throw input_error("graph: vertex list is empty");
    std::unordered_set<std::int64_t> ids(vertices.begin(), vertices.end());
    if (ids.size() != vertices.size()) throw input_error("graph: duplicate vertex id");
    if (n_edges() == 0) throw input_error("graph: no edges");
    for (const auto& e : internal_edges) {
      if (!ids.count(e.from) || !ids.count(e.to))
        throw input_error("graph: internal edge references unknown vertex");
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw input_error("graph: internal edge length must be positive and finite");
    }
    for (const auto& e : external_edges)
      if (!ids.count(e.from)) throw input_error("graph: external edge references unknown vertex");
  }
};

// Position of one boundary coordinate. Coordinates are ordered: external edge
// starts, internal edge starts, internal edge ends.
struct BoundaryCoordinate {
  bool internal = false;
  int edge = 0;       // index into external_edges or internal_edges
  bool terminal = false;  // internal edges only: the x = length end
};

inline int boundary_index(const MetricGraph& g, const BoundaryCoordinate& c) {
  const int ne = g.n_external();
  const int ni = g.n_internal();
  if (!c.internal) {
    if (c.edge < 0 || c.edge >= ne) throw input_error("boundary_index: external edge out of range");
    return c.edge;
  }
  if (c.edge < 0 || c.edge >= ni) throw input_error("boundary_index: internal edge out of range");
  return ne + c.edge + (c.terminal ? ni : 0);
}

inline BoundaryCoordinate boundary_coordinate(const MetricGraph& g, int k) {
  const int ne = g.n_external();
  const int ni = g.n_internal();
  if (k < 0 || k >= g.boundary_dim()) throw input_error("boundary_coordinate: index out of range");
  if (k < ne) return {false, k, false};
  if (k < ne + ni) return {true, k - ne, false};
  return {true, k - ne - ni, true};
}

// Per-edge sample abscissae. Edges are ordered external first, then internal,
// matching the boundary coordinate layout.
struct EdgeGrid {
  int n_external = 0;
  std::vector<Eigen::VectorXd> x;

  int n_edges() const { return static_cast<int>(x.size()); }
  int n_internal() const { return n_edges() - n_external; }
  bool is_external(int e) const { return e < n_external; }
  int boundary_dim() const { return n_external + 2 * n_internal(); }

  int total_nodes() const {
    int n = 0;
    for (const auto& xe : x) n += static_cast<int>(xe.size());
    return n;
  }

  std::vector<int> node_offsets() const {
    std::vector<int> off(x.size() + 1, 0);
    for (std::size_t e = 0; e < x.size(); ++e)
      off[e + 1] = off[e] + static_cast<int>(x[e].size());
    return off;
  }
};

// Default half-line truncation radius for discretizations.
inline double default_truncation(const MetricGraph& g) {
  return 20.0 * std::max(1.0, g.max_internal_length());
}

// Uniform grids with spacing ~h on every edge; half-lines truncated at x = R.
inline EdgeGrid make_grid(const MetricGraph& g, double h, double R) {
  g.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw input_error("make_grid: h must be positive");
  if (g.n_external() > 0 && (!(R > 0.0) || !std::isfinite(R)))
    throw input_error("make_grid: R must be positive");
  EdgeGrid grid;
  grid.n_external = g.n_external();
  auto edge_axis = [&](double len, const char* what) {
    if (!(h < len))
      throw input_error(std::string("make_grid: h >= ") + what + " length");
    const auto n = static_cast<Eigen::Index>(std::llround(len / h));
    if (n < 2) throw input_error(std::string("make_grid: fewer than 3 nodes on ") + what);
    return Eigen::VectorXd::LinSpaced(n + 1, 0.0, len).eval();
  };
  for (int e = 0; e < g.n_external(); ++e) grid.x.push_back(edge_axis(R, "external edge"));
  for (const auto& ie : g.internal_edges) grid.x.push_back(edge_axis(ie.length, "internal edge"));
  return grid;
}

struct EdgeFunction {
  EdgeGrid grid;
  std::vector<Eigen::VectorXcd> values;

  static EdgeFunction zero(const EdgeGrid& g) {
    EdgeFunction f;
    f.grid = g;
    for (const auto& xe : g.x) f.values.emplace_back(Eigen::VectorXcd::Zero(xe.size()));
    return f;
  }
};

inline EdgeFunction sample(const EdgeGrid& g, const std::function<cplx(int, double)>& fn) {
  EdgeFunction f = EdgeFunction::zero(g);
  for (int e = 0; e < g.n_edges(); ++e)
    for (Eigen::Index j = 0; j < g.x[e].size(); ++j) f.values[e](j) = fn(e, g.x[e](j));
  return f;
}

inline Eigen::VectorXcd stack(const EdgeFunction& f) {
  Eigen::VectorXcd v(f.grid.total_nodes());
  Eigen::Index at = 0;
  for (const auto& ve : f.values) {
    v.segment(at, ve.size()) = ve;
    at += ve.size();
  }
  return v;
}

inline EdgeFunction unstack(const EdgeGrid& g, const Eigen::VectorXcd& v) {
  if (v.size() != g.total_nodes()) throw input_error("unstack: node count mismatch");
  EdgeFunction f = EdgeFunction::zero(g);
  Eigen::Index at = 0;
  for (auto& ve : f.values) {
    ve = v.segment(at, ve.size());
    at += ve.size();
  }
  return f;
}

// Boundary trace as matrices on stacked node values: row k of Ev picks the
// value and row k of Ed the inward 3-point derivative at boundary coordinate k.
// Inward means the derivative at x = length enters with a minus sign.
struct TraceMatrices {
  Eigen::MatrixXcd Ev, Ed;
};

inline TraceMatrices trace_matrices(const EdgeGrid& g) {
  const int d = g.boundary_dim();
  const int n = g.total_nodes();
  const auto off = g.node_offsets();
  TraceMatrices t;
  t.Ev = Eigen::MatrixXcd::Zero(d, n);
  t.Ed = Eigen::MatrixXcd::Zero(d, n);
  auto put = [&](int row, int e, bool terminal) {
    const auto& xe = g.x[e];
    const auto m = xe.size();
    if (m < 3) throw input_error("trace_matrices: edge has fewer than 3 nodes");
    const double sign = terminal ? -1.0 : 1.0;
    const Eigen::Index lo = terminal ? m - 3 : 0;
    const Eigen::Index at = terminal ? m - 1 : 0;
    const Eigen::VectorXd w = detail::fd_weights(xe(at), xe.segment(lo, 3), 1);
    t.Ev(row, off[e] + at) = 1.0;
    for (Eigen::Index k = 0; k < 3; ++k) t.Ed(row, off[e] + lo + k) = sign * w(k);
  };
  const int ni = g.n_internal();
  for (int e = 0; e < g.n_external; ++e) put(e, e, false);
  for (int i = 0; i < ni; ++i) {
    put(g.n_external + i, g.n_external + i, false);
    put(g.n_external + ni + i, g.n_external + i, true);
  }
  return t;
}

struct Trace {
  Eigen::VectorXcd psi;        // boundary values
  Eigen::VectorXcd psi_prime;  // inward derivatives
};

inline Trace trace(const EdgeFunction& f) {
  const TraceMatrices t = trace_matrices(f.grid);
  const Eigen::VectorXcd v = stack(f);
  return {t.Ev * v, t.Ed * v};
}

inline double norm_sq(const EdgeFunction& f) {
  double acc = 0.0;
  for (int e = 0; e < f.grid.n_edges(); ++e) {
    const Eigen::VectorXd w = trapezoid_weights(f.grid.x[e]);
    acc += (w.array() * f.values[e].array().abs2()).sum();
  }
  return acc;
}

// Trapezoid integral of |f'|^2 with f' from 3-point stencils.
inline double dirichlet_energy(const EdgeFunction& f) {
  double acc = 0.0;
  for (int e = 0; e < f.grid.n_edges(); ++e) {
    const Eigen::VectorXcd g = derivative_samples(f.grid.x[e], f.values[e]);
    const Eigen::VectorXd w = trapezoid_weights(f.grid.x[e]);
    acc += (w.array() * g.array().abs2()).sum();
  }
  return acc;
}

}  // namespace qglap
