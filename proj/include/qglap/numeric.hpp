#pragma once
// Dense linear-algebra and finite-difference helpers shared across the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>

namespace qglap {

using cplx = std::complex<double>;

inline constexpr double machine_eps = std::numeric_limits<double>::epsilon();

namespace detail {

// Finite-difference weights for the m-th derivative at z from arbitrary nodes
// (Fornberg's recursion, Math. Comp. 51, 1988).
inline Eigen::VectorXd fd_weights(double z, const Eigen::Ref<const Eigen::VectorXd>& x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, m + 1);
  double c1 = 1.0;
  double c4 = x(0) - z;
  c(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

}  // namespace detail

// Composite trapezoid weights for sorted abscissae.
inline Eigen::VectorXd trapezoid_weights(const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j) {
    const double h = x(j + 1) - x(j);
    w(j) += 0.5 * h;
    w(j + 1) += 0.5 * h;
  }
  return w;
}

// First derivative at every node: 3-point stencils, one-sided at the ends.
inline Eigen::VectorXcd derivative_samples(const Eigen::VectorXd& x, const Eigen::VectorXcd& v) {
  const Eigen::Index n = x.size();
  if (n < 3) throw std::invalid_argument("derivative_samples: need at least 3 nodes");
  Eigen::VectorXcd g(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index lo = std::clamp<Eigen::Index>(j - 1, 0, n - 3);
    const Eigen::VectorXd w = detail::fd_weights(x(j), x.segment(lo, 3), 1);
    g(j) = w(0) * v(lo) + w(1) * v(lo + 1) + w(2) * v(lo + 2);
  }
  return g;
}

// Second derivative at every node: 3-point stencils inside, 4-point one-sided at the ends.
inline Eigen::VectorXcd second_derivative_samples(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXcd& v) {
  const Eigen::Index n = x.size();
  if (n < 4) throw std::invalid_argument("second_derivative_samples: need at least 4 nodes");
  Eigen::VectorXcd g(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index lo, len;
    if (j == 0) {
      lo = 0;
      len = 4;
    } else if (j == n - 1) {
      lo = n - 4;
      len = 4;
    } else {
      lo = j - 1;
      len = 3;
    }
    const Eigen::VectorXd w = detail::fd_weights(x(j), x.segment(lo, len), 2);
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < len; ++k) acc += w(k) * v(lo + k);
    g(j) = acc;
  }
  return g;
}

struct SvdInfo {
  Eigen::MatrixXcd U, V;
  Eigen::VectorXd s;
  int rank = 0;
  double cutoff = 0.0;
};

// Full SVD with a rank decision at cutoff = rank_scale * eps * sigma_max.
// rank_scale <= 0 means max(rows, cols).
inline SvdInfo svd_with_rank(const Eigen::MatrixXcd& m, int rank_scale = -1) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdInfo out;
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.s = svd.singularValues();
  const double smax = out.s.size() > 0 ? out.s(0) : 0.0;
  const double scale = rank_scale > 0 ? rank_scale : static_cast<double>(std::max(m.rows(), m.cols()));
  out.cutoff = scale * machine_eps * smax;
  out.rank = 0;
  for (Eigen::Index i = 0; i < out.s.size(); ++i)
    if (out.s(i) > out.cutoff) ++out.rank;
  return out;
}

inline Eigen::MatrixXcd pseudo_inverse(const SvdInfo& f) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(f.V.rows(), f.U.rows());
  for (int i = 0; i < f.rank; ++i) out += (1.0 / f.s(i)) * f.V.col(i) * f.U.col(i).adjoint();
  return out;
}

// Orthonormal basis of the right null space. Uses a pivoted QR of the adjoint for
// matrices too large for a Jacobi SVD.
inline Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& m, int rank_scale = -1) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  if (std::max(m.rows(), cols) <= 64) {
    const SvdInfo f = svd_with_rank(m, rank_scale);
    return f.V.rightCols(cols - f.rank);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m.adjoint());
  qr.setThreshold(Eigen::Default);
  const Eigen::Index r = qr.rank();
  Eigen::MatrixXcd tail = Eigen::MatrixXcd::Zero(cols, cols - r);
  tail.bottomRows(cols - r).setIdentity();
  return qr.householderQ() * tail;
}

inline Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(h));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

// lambda_max(H) <= tol_rel * (1 + ||H||_2), H Hermitian.
inline bool negative_semidefinite(const Eigen::MatrixXcd& h, double tol_rel,
                                  double* max_eig = nullptr, double* norm2 = nullptr) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(h);
  const double lo = ev.size() ? ev(0) : 0.0;
  const double hi = ev.size() ? ev(ev.size() - 1) : 0.0;
  const double nrm = std::max(std::abs(lo), std::abs(hi));
  if (max_eig) *max_eig = hi;
  if (norm2) *norm2 = nrm;
  return hi <= tol_rel * (1.0 + nrm);
}

inline double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

}  // namespace qglap
