#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

#include <qglap/qglap.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

using namespace qglap;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("generator matrices have the documented structure") {
  const cplx gamma(2.0, 3.0);
  const BoundaryCondition d3 = gen_delta(3, gamma);
  Eigen::MatrixXcd a(3, 3), b(3, 3);
  a << 1, -1, 0, 0, 1, -1, 0, 0, gamma;
  b << 0, 0, 0, 0, 0, 0, 1, 1, 1;
  CHECK((d3.A - a).norm() == 0.0);
  CHECK((d3.B - b).norm() == 0.0);
  CHECK(d3.graph.n_external() == 3);
  CHECK(d3.graph.n_internal() == 0);

  const BoundaryCondition dp = gen_delta_prime(3, gamma);
  Eigen::MatrixXcd ap(3, 3), bp(3, 3);
  ap << 0, 0, 0, 0, 0, 0, 1, 1, 1;
  bp << 1, -1, 0, 0, 1, -1, 0, 0, gamma;
  CHECK((dp.A - ap).norm() == 0.0);
  CHECK((dp.B - bp).norm() == 0.0);

  // degree one reduces to a Robin half-line
  const BoundaryCondition rob = gen_delta(1, gamma);
  CHECK(rob.A(0, 0) == gamma);
  CHECK(rob.B(0, 0) == cplx(1.0));

  const BoundaryCondition tw = gen_counterexample(0.3);
  CHECK(tw.A(0, 0) == cplx(1.0));
  CHECK(std::abs(tw.A(0, 1) + std::exp(cplx(0.0, 0.3))) < 1e-15);
  CHECK(tw.A.row(1).norm() == 0.0);
  CHECK(tw.B.row(0).norm() == 0.0);
  CHECK(tw.B(1, 0) == cplx(1.0));
  CHECK(std::abs(tw.B(1, 1) + std::exp(cplx(0.0, -0.3))) < 1e-15);

  CHECK_THROWS_AS(star_graph(0), input_error);
  CHECK_THROWS_AS(gen_delta_prime(3, 0.0), input_error);
}

TEST_CASE("complex literals parse in every supported spelling") {
  CHECK(parse_complex_literal("2") == cplx(2.0, 0.0));
  CHECK(parse_complex_literal("-1.5e2") == cplx(-150.0, 0.0));
  CHECK(parse_complex_literal("3i") == cplx(0.0, 3.0));
  CHECK(parse_complex_literal("i") == cplx(0.0, 1.0));
  CHECK(parse_complex_literal("-i") == cplx(0.0, -1.0));
  CHECK(parse_complex_literal("+i") == cplx(0.0, 1.0));
  CHECK(parse_complex_literal("2+3i") == cplx(2.0, 3.0));
  CHECK(parse_complex_literal("2-i") == cplx(2.0, -1.0));
  CHECK(parse_complex_literal("1e-3-2e-4j") == cplx(1e-3, -2e-4));
  CHECK(parse_complex_literal("1e+3i") == cplx(0.0, 1000.0));
  CHECK(parse_complex_literal("[1.5,-2]") == cplx(1.5, -2.0));
  CHECK(parse_complex_literal(" 2 + 3 i ") == cplx(2.0, 3.0));
  CHECK_THROWS_AS(parse_complex_literal("abc"), input_error);
  CHECK_THROWS_AS(parse_complex_literal("2+3"), input_error);
  CHECK_THROWS_AS(parse_complex_literal("[1]"), input_error);
  CHECK_THROWS_AS(parse_complex_literal("[1,2"), input_error);
  CHECK_THROWS_AS(parse_complex_literal(""), input_error);
  CHECK_THROWS_AS(parse_complex_literal("2i+3"), input_error);
}

TEST_CASE("complex values load from numbers, strings, or pairs") {
  CHECK(complex_from_json(json(2.5)) == cplx(2.5, 0.0));
  CHECK(complex_from_json(json("2+3i")) == cplx(2.0, 3.0));
  CHECK(complex_from_json(json::array({1.0, -2.0})) == cplx(1.0, -2.0));
  CHECK_THROWS_AS(complex_from_json(json::array({1.0, 2.0, 3.0})), input_error);
  CHECK_THROWS_AS(complex_from_json(json::object()), input_error);
}

TEST_CASE("matrices and conditions round-trip through JSON") {
  auto rng = testsup::make_rng(11);
  const Eigen::MatrixXcd m = testsup::rand_matrix(3, 4, rng);
  CHECK((matrix_from_json(matrix_to_json(m)) - m).norm() == 0.0);
  // through an actual serialized string as well
  const json parsed = json::parse(matrix_to_json(m).dump());
  CHECK((matrix_from_json(parsed) - m).norm() == 0.0);

  json ragged = matrix_to_json(m);
  ragged[1].erase(3);
  CHECK_THROWS_AS(matrix_from_json(ragged), input_error);
  CHECK_THROWS_AS(matrix_from_json(json::array()), input_error);

  const MetricGraph g = testsup::mixed_graph(2, 2, rng);
  const MetricGraph g2 = graph_from_json(graph_to_json(g));
  CHECK(g2.n_external() == g.n_external());
  CHECK(g2.n_internal() == g.n_internal());
  CHECK(g2.boundary_dim() == g.boundary_dim());
  for (std::size_t i = 0; i < g.internal_edges.size(); ++i) {
    CHECK(g2.internal_edges[i].from == g.internal_edges[i].from);
    CHECK(g2.internal_edges[i].to == g.internal_edges[i].to);
    CHECK(g2.internal_edges[i].length == g.internal_edges[i].length);
  }

  const BoundaryCondition bc = testsup::rand_bc(g, 3, rng);
  const BoundaryCondition bc2 = bc_from_json(bc_to_json(bc));
  CHECK((bc2.A - bc.A).norm() == 0.0);
  CHECK((bc2.B - bc.B).norm() == 0.0);

  json bad = bc_to_json(bc);
  bad["A"].erase(0);  // wrong row count
  CHECK_THROWS_AS(bc_from_json(bad), input_error);
  CHECK_THROWS_AS(graph_from_json(json::object()), input_error);
}

TEST_CASE("classification serializes with verdicts, diagnostics, and forms") {
  const json j = classification_to_json(classify(gen_delta(3, 4.0)));
  REQUIRE(j.contains("verdict"));
  CHECK(j["verdict"]["rank_ok"].get<bool>());
  CHECK(j["verdict"]["assumption_A_ok"].get<bool>());
  CHECK(j["verdict"]["quasi_m_accretive"].get<bool>());
  CHECK(j["verdict"]["m_sectorial"].get<bool>());
  CHECK_FALSE(j["verdict"]["m_accretive"].get<bool>());
  CHECK(j["verdict"]["self_adjoint"].get<bool>());
  CHECK(j["details"]["rank_smin"].get<double>() > 0.0);
  CHECK(j["tolerances"]["zero"].get<double>() == 1e-10);
  REQUIRE_FALSE(j["normalized"].is_null());
  const Eigen::MatrixXcd l = matrix_from_json(j["normalized"]["L"]);
  CHECK(std::abs(l(0, 0) - cplx(4.0 / 9.0)) < 1e-12);
  REQUIRE_FALSE(j["real_part"].is_null());

  const json j2 = classification_to_json(classify(gen_counterexample(0.0)));
  CHECK(j2["normalized"].is_null());
  CHECK(j2["real_part"].is_null());
  CHECK_FALSE(j2["verdict"]["quasi_m_accretive"].get<bool>());
}

TEST_CASE("csv reports carry headers and full precision") {
  const WitnessSequence ws = build_witness(gen_counterexample(0.0), 5);
  const std::string wcsv = witness_csv(ws);
  CHECK(wcsv.rfind("n,re_rayleigh,im_rayleigh,norm,bc_residual\n", 0) == 0);
  CHECK(count_lines(wcsv) == 6);

  Trajectory traj;
  traj.times = {0.0, 0.5, 1.0};
  traj.norms = {2.0, 1.0, 0.5};
  const std::string tcsv = trajectory_csv(traj, 1.0);
  CHECK(tcsv.rfind("t,norm,bound\n", 0) == 0);
  CHECK(count_lines(tcsv) == 4);
  std::istringstream is(tcsv);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  CHECK(line == "0,2,2");  // bound at t=0 equals the initial norm
  const std::string tno = trajectory_csv(traj, std::nullopt);
  CHECK(tno.find("nan") != std::string::npos);

  Eigen::VectorXcd ev(2);
  ev << cplx(1.0 / 3.0, 0.0), cplx(0.0, -2.0);
  const std::string scsv = spectrum_csv(ev);
  CHECK(scsv.rfind("re,im\n", 0) == 0);
  CHECK(scsv.find("0.33333333333333331") != std::string::npos);

  for (double v : {1.0 / 3.0, M_PI, 1e-280, -7.25e100}) {
    CHECK(std::stod(fmt_g17(v)) == v);
  }
}

TEST_CASE("file loading distinguishes missing from malformed") {
  CHECK_THROWS_AS(load_json("definitely_not_here.json"), input_error);
  const std::string tmp =
      (std::filesystem::temp_directory_path() / "qglap_io_test.json").string();
  save_text(tmp, "{ not json");
  CHECK_THROWS_AS(load_json(tmp), input_error);
  save_json(tmp, bc_to_json(gen_delta(3, cplx(0.0, 1.0))));
  const BoundaryCondition bc = bc_from_json(load_json(tmp));
  CHECK(bc.A(2, 2) == cplx(0.0, 1.0));
  std::filesystem::remove(tmp);
}
