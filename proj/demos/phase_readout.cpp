// Read-out Fisher information of phase estimation relative to G, ideal versus
// controllized controlled unitaries, with tau tuned per configuration.

#include <cstdio>

#include "qmet/qmet.hpp"

using namespace qmet;

int main() {
  const auto model = make_qubit_direction(1.0);
  const double theta = kPi / 3, t = 1.0;
  const CemSolution s = g_bound(model, theta, t);
  std::printf("G = %.5f\n%3s %3s %9s %9s %9s\n", s.G_value, "n", "m", "tau", "ideal/G", "real/G");
  for (int n : {2, 4, 6})
    for (int m : {1, 3, 10}) {
      PhaseSimConfig cfg;
      cfg.n = n;
      cfg.m = m;
      cfg.V = s.V_opt;
      cfg.rho0 = DensityMatrix::from_pure(s.psi_opt);
      cfg.t = t;
      cfg.tau = tune_tau(cfg, model, theta);
      const double ideal = fisher_phase_readout(cfg, model, theta, {}, ReadoutMode::Ideal).value;
      const double real = fisher_phase_readout(cfg, model, theta).value;
      std::printf("%3d %3d %9.4f %9.4f %9.4f\n", n, m, cfg.tau, ideal / s.G_value, real / s.G_value);
    }
}
