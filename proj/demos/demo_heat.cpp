// Heat flow on a star with an attractive delta coupling: the semigroup grows,
// but stays under the computed envelope e^{-omega t}.

#include <qglap/qglap.hpp>

#include <cstdio>

int main() {
  using namespace qglap;

  const BoundaryCondition bc = gen_delta(3, 4.0);
  const GridSpec spec{0.1, 12.0};

  const GrowthBound gb = growth_bound(bc, spec);
  std::printf("growth bound omega = %.6f (error estimate %.2e)\n", gb.omega, gb.error_estimate);

  const Trajectory traj = evolve(bc, spec, 1e-2, 1.0);
  const ContractivityAudit audit = audit_contractivity(traj, gb.omega);
  std::printf("norm: %.6f -> %.6f over t in [0, 1]\n", traj.norms.front(), traj.norms.back());
  std::printf("envelope ok = %d (max excess %.2e)\n", audit.envelope_ok,
              audit.max_envelope_excess);

  const Trajectory cold = evolve(gen_delta(3, -1.0), spec, 1e-2, 1.0);
  const ContractivityAudit cold_audit = audit_contractivity(cold, 0.0);
  std::printf("dissipative coupling: monotone ok = %d (max step growth %.2e)\n",
              cold_audit.monotone_ok, cold_audit.max_step_growth);
  return 0;
}
