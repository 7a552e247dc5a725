#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

#include <qglap/qglap.hpp>

#include <cmath>

using namespace qglap;

namespace {

const cplx I(0.0, 1.0);

Eigen::MatrixXcd ones(int d) { return Eigen::MatrixXcd::Ones(d, d); }

}  // namespace

TEST_CASE("projector identities for random ranks") {
  auto rng = testsup::make_rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 6);
    const int r = static_cast<int>(rng() % (d + 1));
    const Eigen::MatrixXcd b = r == d ? testsup::rand_well_conditioned(d, rng)
                                      : testsup::rand_with_rank(d, r, rng);
    const Projectors pr = compute_projectors(b);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    REQUIRE(pr.rank_B == r);
    CHECK((pr.P * pr.P - pr.P).norm() < 1e-12);
    CHECK((pr.P - pr.P.adjoint()).norm() < 1e-12);
    CHECK((pr.Q * pr.Q - pr.Q).norm() < 1e-12);
    CHECK((pr.Q - pr.Q.adjoint()).norm() < 1e-12);
    CHECK((b * pr.P).norm() < 1e-12 * (1.0 + b.norm()));
    CHECK((pr.Q * b).norm() < 1e-12 * (1.0 + b.norm()));
    CHECK((pr.B_pinv * b - (id - pr.P)).norm() < 1e-10);
    CHECK((b * pr.B_pinv - (id - pr.Q)).norm() < 1e-10);
    CHECK(std::lround(pr.P.trace().real()) == d - r);
    CHECK(std::lround(pr.Q.trace().real()) == d - r);
  }
}

TEST_CASE("delta coupling: projectors, kernel condition, canonical form") {
  const cplx gamma(2.0, 3.0);
  const BoundaryCondition bc = gen_delta(3, gamma);
  REQUIRE(check_max_rank(bc).ok);

  const Projectors pr = compute_projectors(bc.B);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  CHECK((pr.P - (id - ones(3) / 3.0)).norm() < 1e-12);
  Eigen::MatrixXcd qexp = Eigen::MatrixXcd::Zero(3, 3);
  qexp(0, 0) = 1.0;
  qexp(1, 1) = 1.0;
  CHECK((pr.Q - qexp).norm() < 1e-12);
  Eigen::MatrixXcd pinv_exp = Eigen::MatrixXcd::Zero(3, 3);
  pinv_exp.col(2).setConstant(1.0 / 3.0);
  CHECK((pr.B_pinv - pinv_exp).norm() < 1e-12);

  const AssumptionCheck aa = check_assumption_A(bc);
  CHECK(aa.ok);
  CHECK(aa.defect < 1e-13);

  const NormalizedBC nf = normalize(bc);
  CHECK((nf.L - (gamma / 9.0) * ones(3)).norm() < 1e-12);
  CHECK((nf.P * nf.L).norm() < 1e-12);
  CHECK((nf.L * nf.P).norm() < 1e-12);
}

TEST_CASE("delta-prime coupling: invertible B, canonical form") {
  const cplx gamma(2.0, 3.0);
  const BoundaryCondition bc = gen_delta_prime(3, gamma);
  REQUIRE(check_max_rank(bc).ok);
  const Projectors pr = compute_projectors(bc.B);
  CHECK(pr.rank_B == 3);
  CHECK(pr.P.norm() < 1e-12);
  CHECK(pr.Q.norm() < 1e-12);
  CHECK(check_assumption_A(bc).ok);

  const NormalizedBC nf = normalize(bc);
  CHECK((nf.L - (1.0 / gamma) * ones(3)).norm() < 1e-12);

  // real part of the canonical form matches the delta-prime coupling with
  // strength |gamma|^2 / Re gamma, not Re gamma
  const NormalizedBC re = real_part(bc);
  const double eff = std::norm(gamma) / gamma.real();  // 13/2 for 2+3i
  const NormalizedBC cmp = normalize(gen_delta_prime(3, eff));
  CHECK(eff == Catch::Approx(6.5));
  CHECK((re.L - cmp.L).norm() < 1e-12);
  CHECK((re.L - (2.0 / 13.0) * ones(3)).norm() < 1e-12);
}

TEST_CASE("twisted pair across the tau range") {
  for (double tau : {0.0, M_PI / 4.0, M_PI / 2.0}) {
    const BoundaryCondition bc = gen_counterexample(tau);
    const RankCheck rk = check_max_rank(bc);
    REQUIRE(rk.ok);
    CHECK(rk.smin == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const Projectors pr = compute_projectors(bc.B);
    const Eigen::MatrixXcd defect =
        pr.Q * bc.A * (Eigen::MatrixXcd::Identity(2, 2) - pr.P);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 2);
    expect(0, 0) = 0.5 * (1.0 + std::exp(2.0 * I * tau));
    expect(0, 1) = -std::cos(tau);
    CHECK((defect - expect).norm() < 1e-12);
  }
  CHECK_FALSE(check_assumption_A(gen_counterexample(0.0)).ok);
  CHECK_FALSE(check_assumption_A(gen_counterexample(M_PI / 4.0)).ok);
  // at tau = pi/2 the coupling decouples into a self-adjoint pair
  const Classification c = classify(gen_counterexample(M_PI / 2.0));
  CHECK(c.assumption_A_ok);
  CHECK(c.quasi_m_accretive);
  CHECK(c.m_accretive);
  CHECK(c.self_adjoint);
  const Classification c0 = classify(gen_counterexample(0.0));
  CHECK(c0.rank_ok);
  CHECK_FALSE(c0.assumption_A_ok);
  CHECK_FALSE(c0.quasi_m_accretive);
  CHECK_FALSE(c0.m_sectorial);
  CHECK_FALSE(c0.m_accretive);
  CHECK_FALSE(c0.self_adjoint);
  CHECK_FALSE(c0.normalized.has_value());
}

TEST_CASE("accretivity of the delta family follows the sign of Re gamma") {
  for (double re : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
    for (double im : {0.0, 2.5}) {
      const BoundaryCondition bc = gen_delta(3, cplx(re, im));
      const Classification c = classify(bc);
      REQUIRE(c.quasi_m_accretive);
      CHECK(c.m_sectorial);
      CHECK(c.m_accretive == (re <= 0.0));
      CHECK(c.self_adjoint == (im == 0.0));
    }
  }
}

TEST_CASE("accretivity of the delta-prime family follows the sign of Re gamma") {
  for (cplx gamma : {cplx(-4, 0), cplx(-1, 2), cplx(0, 1), cplx(1, -1), cplx(4, 0)}) {
    const Classification c = classify(gen_delta_prime(3, gamma));
    REQUIRE(c.quasi_m_accretive);
    CHECK(c.m_accretive == (gamma.real() <= 0.0));
    CHECK(c.self_adjoint == (gamma.imag() == 0.0));
  }
}

TEST_CASE("normalize refuses without its preconditions") {
  CHECK_THROWS_AS(normalize(gen_counterexample(0.0)), refusal);
  BoundaryCondition degenerate;
  degenerate.graph = testsup::star(2);
  degenerate.A = Eigen::MatrixXcd::Zero(2, 2);
  degenerate.B = Eigen::MatrixXcd::Zero(2, 2);
  CHECK_THROWS_AS(normalize(degenerate), refusal);
  const Classification c = classify(degenerate);
  CHECK_FALSE(c.rank_ok);
  CHECK_FALSE(c.quasi_m_accretive);
}

TEST_CASE("rebuild produces an equivalent pair") {
  const BoundaryCondition bc = gen_delta(4, cplx(2.0, 3.0));
  const BoundaryCondition rb = rebuild(bc.graph, normalize(bc));
  CHECK(subspace_gap(bc, rb) < 1e-12);
  CHECK(equivalent(bc, rb));

  // Dirichlet and Neumann on the same graph are not equivalent
  BoundaryCondition dir, neu;
  dir.graph = neu.graph = testsup::star(2);
  dir.A = Eigen::MatrixXcd::Identity(2, 2);
  dir.B = Eigen::MatrixXcd::Zero(2, 2);
  neu.A = Eigen::MatrixXcd::Zero(2, 2);
  neu.B = Eigen::MatrixXcd::Identity(2, 2);
  CHECK(subspace_gap(dir, neu) == Catch::Approx(1.0));
  CHECK_FALSE(equivalent(dir, neu));
  CHECK_FALSE(equivalent(gen_delta(3, 1.0), gen_delta(3, 2.0)));
}

TEST_CASE("classification is invariant under row transformations") {
  auto rng = testsup::make_rng(2024);
  int quasi_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const MetricGraph g = testsup::rand_graph(d, rng);
    const int r = static_cast<int>(rng() % (d + 1));
    BoundaryCondition bc = (trial % 3 == 0)
                               ? testsup::constructed_quasi(g, d - r, false, rng)
                               : testsup::rand_bc(g, r, rng);
    const Eigen::MatrixXcd c = testsup::rand_well_conditioned(d, rng);
    BoundaryCondition tbc;
    tbc.graph = g;
    tbc.A = c * bc.A;
    tbc.B = c * bc.B;

    const Classification c1 = classify(bc);
    const Classification c2 = classify(tbc);
    CHECK(c1.rank_ok == c2.rank_ok);
    CHECK(c1.assumption_A_ok == c2.assumption_A_ok);
    CHECK(c1.quasi_m_accretive == c2.quasi_m_accretive);
    CHECK(c1.m_accretive == c2.m_accretive);
    CHECK(c1.self_adjoint == c2.self_adjoint);
    if (c1.quasi_m_accretive) {
      ++quasi_seen;
      CHECK((c1.normalized->P - c2.normalized->P).norm() < 1e-10);
      CHECK((c1.normalized->L - c2.normalized->L).norm() <
            1e-10 * (1.0 + c1.normalized->L.norm()));
      CHECK(equivalent(bc, tbc, 1e-9));
    }
  }
  CHECK(quasi_seen > 10);
}

TEST_CASE("a true accretivity verdict forces the kernel condition") {
  auto rng = testsup::make_rng(515);
  int accretive_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const MetricGraph g = testsup::rand_graph(d, rng);
    const int r = static_cast<int>(rng() % (d + 1));
    BoundaryCondition bc;
    if (trial % 4 == 0)
      bc = testsup::constructed_quasi(testsup::star(d), d - r, true, rng);
    else
      bc = testsup::rand_bc(g, r, rng);
    // check_m_accretive throws std::logic_error if its verdict ever
    // contradicts the kernel condition
    const AccretivityCheck ac = check_m_accretive(bc);
    const AssumptionCheck aa = check_assumption_A(bc);
    if (ac.ok) {
      ++accretive_seen;
      CHECK(aa.defect <= 1e-6 * (1.0 + bc.A.norm()));
    }
  }
  CHECK(accretive_seen > 100);
}

TEST_CASE("interval ends only lower the accretivity test matrix") {
  auto rng = testsup::make_rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_int = 1 + static_cast<int>(rng() % 3);
    const int n_ext = static_cast<int>(rng() % 3);
    const MetricGraph g = testsup::mixed_graph(n_ext, n_int, rng);
    const int d = g.boundary_dim();
    const BoundaryCondition bc = testsup::rand_bc(g, static_cast<int>(rng() % (d + 1)), rng);
    const Eigen::MatrixXcd re_ab = hermitian_part(bc.A * bc.B.adjoint());
    const double lam_plain = hermitian_eigenvalues(re_ab).maxCoeff();
    const double lam_full = hermitian_eigenvalues(accretivity_matrix(bc)).maxCoeff();
    CHECK(lam_full <= lam_plain + 1e-11 * (1.0 + std::abs(lam_plain)));
  }
}

TEST_CASE("interval end matrix") {
  MetricGraph g;
  g.vertices = {0, 1};
  g.internal_edges.push_back({0, 1, 2.0});
  const Eigen::MatrixXd m0 = m0_matrix(g);
  Eigen::MatrixXd expect(2, 2);
  expect << -0.5, 0.5, 0.5, -0.5;
  CHECK((m0 - expect).norm() < 1e-14);
  const Eigen::VectorXd ev = hermitian_eigenvalues(m0.cast<cplx>());
  CHECK(ev.minCoeff() == Catch::Approx(-1.0));
  CHECK(ev.maxCoeff() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("block semidefiniteness reduction") {
  auto rng = testsup::make_rng(7777);
  // A <= 0 with nonzero B: the block matrix is never negative semidefinite
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 4);
    const int q = 1 + static_cast<int>(rng() % 3);
    const Eigen::MatrixXcd gg = testsup::rand_matrix(p, p, rng);
    const Eigen::MatrixXcd a = -gg * gg.adjoint();
    Eigen::MatrixXcd b = testsup::rand_matrix(q, p, rng);
    const QwbResult res = qwb_check(a, b);
    CHECK_FALSE(res.negative_semidefinite);
    CHECK(res.max_eig > 0.0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXcd gg = testsup::rand_matrix(p, p, rng);
    const Eigen::MatrixXcd a = -gg * gg.adjoint();
    const Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2, p);
    CHECK(qwb_check(a, b).negative_semidefinite);
  }
  // scalar sanity: [[a, b],[b, 0]] has top eigenvalue (a + sqrt(a^2+4b^2))/2
  Eigen::MatrixXcd a1(1, 1), b1(1, 1);
  a1(0, 0) = -1.0;
  b1(0, 0) = 0.5;
  const QwbResult scalar = qwb_check(a1, b1);
  CHECK(scalar.max_eig == Catch::Approx((-1.0 + std::sqrt(2.0)) / 2.0));
  CHECK_FALSE(scalar.negative_semidefinite);
  // non-Hermitian A is rejected
  Eigen::MatrixXcd bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(qwb_check(bad, Eigen::MatrixXcd::Zero(1, 2)), input_error);
}

TEST_CASE("self-adjointness matches equivalence with the adjoint conditions") {
  auto rng = testsup::make_rng(31415);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 4);
    const int rp = static_cast<int>(rng() % d);
    BoundaryCondition bc = testsup::constructed_quasi(testsup::star(d), rp, false, rng);
    if (trial % 2 == 0) {
      // force a Hermitian L
      NormalizedBC nf = normalize(bc);
      nf.L = hermitian_part(nf.L);
      bc = rebuild(bc.graph, nf);
    }
    const NormalizedBC nf = normalize(bc);
    NormalizedBC adj = nf;
    adj.L = nf.L.adjoint();
    const BoundaryCondition bc_adj = rebuild(bc.graph, adj);
    const bool sa = check_self_adjoint(bc);
    CHECK(sa == equivalent(bc, bc_adj, 1e-8));
  }
  CHECK(check_self_adjoint(gen_delta(3, 4.0)));
  CHECK_FALSE(check_self_adjoint(gen_delta(3, cplx(4.0, 1.0))));
  CHECK(check_self_adjoint(gen_delta_prime(3, -2.0)));
  CHECK_FALSE(check_self_adjoint(gen_counterexample(0.0)));
}

TEST_CASE("normalization is idempotent and exact on its invariants") {
  auto rng = testsup::make_rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const int rp = static_cast<int>(rng() % d);
    const BoundaryCondition bc = testsup::constructed_quasi(testsup::star(d), rp, false, rng);
    const NormalizedBC nf = normalize(bc);
    const BoundaryCondition rb = rebuild(bc.graph, nf);
    const NormalizedBC nf2 = normalize(rb);
    CHECK((nf.P - nf2.P).norm() < 1e-10);
    CHECK((nf.L - nf2.L).norm() < 1e-10 * (1.0 + nf.L.norm()));
    // real_part is idempotent
    const NormalizedBC re1 = real_part(bc);
    const NormalizedBC re2 = real_part(rebuild(bc.graph, re1));
    CHECK((re1.L - re2.L).norm() < 1e-10 * (1.0 + re1.L.norm()));
    CHECK((re1.L - re1.L.adjoint()).norm() < 1e-12 * (1.0 + re1.L.norm()));
  }
}
