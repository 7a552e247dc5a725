// Command-line front end: classify boundary conditions, compute canonical
// forms, growth bounds, heat-flow trajectories, divergence witnesses, and
// numerical-range samples. Results go to stdout as JSON and to files under
// --output-dir.

#include <qglap/qglap.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using qglap::json;

struct InputSpec {
  std::string file;
  std::string example;
  int degree = 3;
  std::string gamma = "1";
  double tau = 0.0;
};

void add_input_options(CLI::App* cmd, InputSpec& in) {
  cmd->add_option("input", in.file, "boundary-condition JSON file");
  cmd->add_option("--example", in.example,
                  "built-in family: delta, delta-prime, counterexample");
  cmd->add_option("--degree", in.degree, "star degree for built-in families");
  cmd->add_option("--gamma", in.gamma, "coupling constant, complex literal like 2+3i");
  cmd->add_option("--tau", in.tau, "twist angle for the counterexample family");
}

qglap::BoundaryCondition resolve_input(const InputSpec& in) {
  if (!in.file.empty() && !in.example.empty())
    throw qglap::input_error("pass an input file or --example, not both");
  if (!in.file.empty()) return qglap::bc_from_json(qglap::load_json(in.file));
  if (in.example == "delta")
    return qglap::gen_delta(in.degree, qglap::parse_complex_literal(in.gamma));
  if (in.example == "delta-prime")
    return qglap::gen_delta_prime(in.degree, qglap::parse_complex_literal(in.gamma));
  if (in.example == "counterexample") return qglap::gen_counterexample(in.tau);
  if (in.example.empty())
    throw qglap::input_error("no input: pass a JSON file or --example");
  throw qglap::input_error("unknown example family: " + in.example);
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void emit(const json& j, const std::string& dir, const std::string& name) {
  std::cout << j.dump(2) << "\n";
  qglap::save_json(out_path(dir, name), j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary conditions for Laplacians on metric graphs"};
  app.require_subcommand(1);
  // long-only help so -h / --h stays available for the grid spacing
  app.set_help_flag("--help", "print usage");

  InputSpec in;
  std::string output_dir = ".";
  qglap::Tolerances tol;
  qglap::GridSpec spec{0.05, 0.0};
  double dt = 0.0;
  double t_end = 1.0;
  int n_max = 20;
  int samples = 100;
  std::uint64_t seed = 42;
  bool force = false;
  std::string family;
  std::string out_file = "bc.json";

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print usage");
    add_input_options(cmd, in);
    cmd->add_option("--output-dir", output_dir, "directory for result files");
    cmd->add_option("--tol-zero", tol.zero, "relative zero-matrix tolerance");
    cmd->add_option("--tol-psd", tol.psd, "relative semidefiniteness tolerance");
  };

  auto* c_classify = app.add_subcommand("classify", "classify a boundary-condition pair");
  add_common(c_classify);

  auto* c_normalize = app.add_subcommand("normalize", "canonical form (P, L) of the pair");
  add_common(c_normalize);

  auto* c_realpart = app.add_subcommand("realpart", "canonical form of the real part");
  add_common(c_realpart);

  auto* c_growth = app.add_subcommand("growth-bound", "lower bound of the form via Galerkin");
  add_common(c_growth);
  c_growth->add_option("--h", spec.h, "grid spacing");
  c_growth->add_option("--R", spec.R, "half-line truncation radius");

  auto* c_sim = app.add_subcommand("simulate", "Crank-Nicolson heat flow");
  add_common(c_sim);
  c_sim->add_option("--h", spec.h, "grid spacing");
  c_sim->add_option("--R", spec.R, "half-line truncation radius");
  c_sim->add_option("--dt", dt, "time step (default: h)");
  c_sim->add_option("--t-end", t_end, "final time");
  c_sim->add_option("--seed", seed, "initial-state seed");
  c_sim->add_flag("--force", force, "simulate even when the theory refuses");

  auto* c_wit = app.add_subcommand("witness", "divergence sequence when the kernel condition fails");
  add_common(c_wit);
  c_wit->add_option("--n-max", n_max, "largest sequence index");

  double num_h = 0.125;
  auto* c_num = app.add_subcommand("numrange", "sample Rayleigh quotients of the form");
  add_common(c_num);
  c_num->add_option("--h", num_h, "grid spacing");
  c_num->add_option("--R", spec.R, "half-line truncation radius");
  c_num->add_option("--samples", samples, "number of samples");
  c_num->add_option("--seed", seed, "sampling seed");

  auto* c_ex = app.add_subcommand("example", "write a built-in boundary-condition file");
  c_ex->set_help_flag("--help", "print usage");
  c_ex->add_option("family", family, "delta, delta-prime, counterexample")->required();
  c_ex->add_option("--degree", in.degree, "star degree");
  c_ex->add_option("--gamma", in.gamma, "coupling constant, complex literal");
  c_ex->add_option("--tau", in.tau, "twist angle");
  c_ex->add_option("-o,--out", out_file, "output file");
  c_ex->add_option("--output-dir", output_dir, "directory for result files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*c_classify) {
      const auto bc = resolve_input(in);
      emit(qglap::classification_to_json(qglap::classify(bc, tol)), output_dir, "verdict.json");
    } else if (*c_normalize) {
      const auto bc = resolve_input(in);
      emit(qglap::normalized_to_json(qglap::normalize(bc, tol)), output_dir, "normalized.json");
    } else if (*c_realpart) {
      const auto bc = resolve_input(in);
      emit(qglap::normalized_to_json(qglap::real_part(bc, tol)), output_dir, "realpart.json");
    } else if (*c_growth) {
      const auto bc = resolve_input(in);
      emit(qglap::growth_bound_to_json(qglap::growth_bound(bc, spec, tol)), output_dir,
           "growth_bound.json");
    } else if (*c_sim) {
      const auto bc = resolve_input(in);
      if (dt <= 0.0) dt = spec.h;
      const auto traj = qglap::evolve(bc, spec, dt, t_end, {force, seed}, tol);
      std::optional<double> omega;
      if (traj.used_form_path) omega = qglap::growth_bound(bc, spec, tol).omega;
      qglap::save_text(out_path(output_dir, "trajectory.csv"),
                       qglap::trajectory_csv(traj, omega));
      json j{{"dt", dt},
             {"t_end", t_end},
             {"steps", traj.times.empty() ? 0 : traj.times.size() - 1},
             {"form_path", traj.used_form_path},
             {"omega", omega ? json(*omega) : json(nullptr)},
             {"final_norm", traj.norms.empty() ? 0.0 : traj.norms.back()}};
      emit(j, output_dir, "simulate.json");
    } else if (*c_wit) {
      const auto bc = resolve_input(in);
      const auto w = qglap::build_witness(bc, n_max, tol);
      qglap::save_text(out_path(output_dir, "witness.csv"), qglap::witness_csv(w));
      emit(qglap::witness_to_json(w), output_dir, "witness.json");
    } else if (*c_num) {
      const auto bc = resolve_input(in);
      qglap::NumRangeOptions opt;
      opt.h = num_h;
      opt.R = spec.R;
      opt.samples = samples;
      opt.seed = seed;
      const auto cloud = qglap::sample_numerical_range(bc, opt);
      qglap::save_text(out_path(output_dir, "numrange.csv"), qglap::numrange_csv(cloud));
      double remax = -1e300, remin = 1e300;
      for (const auto& s : cloud) {
        remax = std::max(remax, s.rayleigh.real());
        remin = std::min(remin, s.rayleigh.real());
      }
      emit(json{{"samples", cloud.size()}, {"re_min", remin}, {"re_max", remax},
                {"h", opt.h}, {"seed", opt.seed}},
           output_dir, "numrange.json");
    } else if (*c_ex) {
      InputSpec ex = in;
      ex.example = family;
      const auto bc = resolve_input(ex);
      const json j = qglap::bc_to_json(bc);
      std::cout << j.dump(2) << "\n";
      qglap::save_json(out_path(output_dir, out_file), j);
    }
  } catch (const qglap::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qglap::refusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
