// Classify a few coupling families on a degree-3 star and print the verdicts.

#include <qglap/qglap.hpp>

#include <cstdio>

int main() {
  using namespace qglap;

  auto report = [](const char* name, const BoundaryCondition& bc) {
    const Classification c = classify(bc);
    std::printf("%-28s rank=%d kernel_cond=%d quasi=%d sectorial=%d accretive=%d selfadj=%d\n",
                name, c.rank_ok, c.assumption_A_ok, c.quasi_m_accretive, c.m_sectorial,
                c.m_accretive, c.self_adjoint);
  };

  report("delta, gamma = -1", gen_delta(3, -1.0));
  report("delta, gamma = 4", gen_delta(3, 4.0));
  report("delta, gamma = 2+3i", gen_delta(3, {2.0, 3.0}));
  report("delta-prime, gamma = 2+3i", gen_delta_prime(3, {2.0, 3.0}));
  report("twisted pair, tau = 0", gen_counterexample(0.0));
  report("twisted pair, tau = pi/2", gen_counterexample(1.5707963267948966));

  const NormalizedBC nf = normalize(gen_delta(3, 4.0));
  std::printf("\ndelta(4) canonical form: ||P|| = %.3f, L(0,0) = %.6f\n", nf.P.norm(),
              nf.L(0, 0).real());
  return 0;
}
