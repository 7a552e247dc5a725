#pragma once
// JSON and CSV serialization. Complex numbers travel as [re, im] pairs in
// JSON; the parser also accepts bare numbers and "a+bi" literals. CSV doubles
// are printed with %.17g so files round-trip exactly.

#include <qglap/boundary.hpp>
#include <qglap/discretize.hpp>
#include <qglap/forms.hpp>
#include <qglap/graph.hpp>
#include <qglap/witness.hpp>

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qglap {

using json = nlohmann::json;

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline double stod_all(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw input_error("cannot parse number: '" + s + "'");
  }
  if (pos != s.size()) throw input_error("cannot parse number: '" + s + "'");
  return v;
}

}  // namespace detail

// Accepts "2", "-1.5e2", "3i", "-i", "2+3i", "1e-3-2e-4j", "[re,im]".
inline cplx parse_complex_literal(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw input_error("empty complex literal");
  if (s.front() == '[') {
    if (s.back() != ']') throw input_error("unterminated complex literal: '" + raw + "'");
    const std::string body = s.substr(1, s.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string::npos)
      throw input_error("complex literal needs two components: '" + raw + "'");
    return {detail::stod_all(body.substr(0, comma)), detail::stod_all(body.substr(comma + 1))};
  }
  const char last = static_cast<char>(std::tolower(static_cast<unsigned char>(s.back())));
  if (last != 'i' && last != 'j') return {detail::stod_all(s), 0.0};
  s.pop_back();
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  int split = -1;
  for (int k = static_cast<int>(s.size()) - 1; k > 0; --k) {
    const char c = s[k];
    if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split < 0) return {0.0, detail::stod_all(s)};
  const std::string re = s.substr(0, split);
  std::string im = s.substr(split);
  double imv;
  if (im == "+")
    imv = 1.0;
  else if (im == "-")
    imv = -1.0;
  else
    imv = detail::stod_all(im);
  return {detail::stod_all(re), imv};
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex_literal(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw input_error("expected a complex number as [re, im], a number, or an 'a+bi' string");
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw input_error("expected a matrix as an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw input_error("expected a matrix as an array of rows");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw input_error("matrix rows have inconsistent lengths");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

inline json graph_to_json(const MetricGraph& g) {
  json j;
  j["vertices"] = g.vertices;
  j["internal_edges"] = json::array();
  for (const auto& e : g.internal_edges)
    j["internal_edges"].push_back({{"from", e.from}, {"to", e.to}, {"length", e.length}});
  j["external_edges"] = json::array();
  for (const auto& e : g.external_edges) j["external_edges"].push_back({{"from", e.from}});
  return j;
}

inline MetricGraph graph_from_json(const json& j) {
  MetricGraph g;
  if (!j.is_object()) throw input_error("graph: expected an object");
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw input_error("graph: missing 'vertices' array");
  for (const auto& v : j["vertices"]) g.vertices.push_back(v.get<std::int64_t>());
  if (j.contains("internal_edges"))
    for (const auto& e : j["internal_edges"])
      g.internal_edges.push_back(
          {e.at("from").get<std::int64_t>(), e.at("to").get<std::int64_t>(),
           e.at("length").get<double>()});
  if (j.contains("external_edges"))
    for (const auto& e : j["external_edges"])
      g.external_edges.push_back({e.at("from").get<std::int64_t>()});
  g.validate();
  return g;
}

inline json bc_to_json(const BoundaryCondition& bc) {
  json j;
  j["graph"] = graph_to_json(bc.graph);
  j["A"] = matrix_to_json(bc.A);
  j["B"] = matrix_to_json(bc.B);
  return j;
}

inline BoundaryCondition bc_from_json(const json& j) {
  if (!j.is_object()) throw input_error("boundary condition: expected an object");
  BoundaryCondition bc;
  bc.graph = graph_from_json(j.at("graph"));
  bc.A = matrix_from_json(j.at("A"));
  bc.B = matrix_from_json(j.at("B"));
  bc.validate();
  return bc;
}

inline json normalized_to_json(const NormalizedBC& nf) {
  return {{"P", matrix_to_json(nf.P)}, {"L", matrix_to_json(nf.L)}};
}

inline json classification_to_json(const Classification& c) {
  json j;
  j["verdict"] = {{"rank_ok", c.rank_ok},
                  {"assumption_A_ok", c.assumption_A_ok},
                  {"quasi_m_accretive", c.quasi_m_accretive},
                  {"m_sectorial", c.m_sectorial},
                  {"m_accretive", c.m_accretive},
                  {"self_adjoint", c.self_adjoint}};
  j["details"] = {{"rank_smin", c.rank_smin},
                  {"rank_cutoff", c.rank_cutoff},
                  {"assumption_defect", c.assumption_defect},
                  {"assumption_cutoff", c.assumption_cutoff},
                  {"accretivity_max_eig", c.accretivity_max_eig},
                  {"accretivity_cutoff", c.accretivity_cutoff}};
  j["tolerances"] = {{"zero", c.tol.zero}, {"psd", c.tol.psd}};
  j["normalized"] = c.normalized ? normalized_to_json(*c.normalized) : json(nullptr);
  j["real_part"] = c.real ? normalized_to_json(*c.real) : json(nullptr);
  return j;
}

inline json growth_bound_to_json(const GrowthBound& gb) {
  return {{"omega", gb.omega},
          {"error_estimate", gb.error_estimate},
          {"omega_coarse", gb.omega_coarse},
          {"omega_fine", gb.omega_fine}};
}

inline json witness_to_json(const WitnessSequence& w) {
  json alpha = json::array();
  for (Eigen::Index i = 0; i < w.alpha.size(); ++i) alpha.push_back(complex_to_json(w.alpha(i)));
  return {{"alpha", alpha}, {"p_alpha_norm", w.p_alpha_norm},
          {"entries", w.entries.size()}};
}

inline std::string witness_csv(const WitnessSequence& w) {
  std::ostringstream os;
  os << "n,re_rayleigh,im_rayleigh,norm,bc_residual\n";
  for (const auto& e : w.entries)
    os << e.n << ',' << fmt_g17(e.rayleigh.real()) << ',' << fmt_g17(e.rayleigh.imag()) << ','
       << fmt_g17(std::sqrt(e.norm_sq)) << ',' << fmt_g17(e.bc_residual) << '\n';
  return os.str();
}

inline std::string trajectory_csv(const Trajectory& t, std::optional<double> omega) {
  std::ostringstream os;
  os << "t,norm,bound\n";
  const double n0 = t.norms.empty() ? 0.0 : t.norms[0];
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    os << fmt_g17(t.times[k]) << ',' << fmt_g17(t.norms[k]) << ',';
    if (omega)
      os << fmt_g17(n0 * std::exp(-*omega * t.times[k]));
    else
      os << "nan";
    os << '\n';
  }
  return os.str();
}

inline std::string spectrum_csv(const Eigen::VectorXcd& ev) {
  std::ostringstream os;
  os << "re,im\n";
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    os << fmt_g17(ev(i).real()) << ',' << fmt_g17(ev(i).imag()) << '\n';
  return os.str();
}

inline std::string numrange_csv(const std::vector<NumRangeSample>& samples) {
  std::ostringstream os;
  os << "re,im,norm_sq\n";
  for (const auto& s : samples)
    os << fmt_g17(s.rayleigh.real()) << ',' << fmt_g17(s.rayleigh.imag()) << ','
       << fmt_g17(s.norm_sq) << '\n';
  return os.str();
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void save_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw input_error("write failed: " + path);
}

inline void save_json(const std::string& path, const json& j) {
  save_text(path, j.dump(2) + "\n");
}

}  // namespace qglap
