// QFI, controlled-energy-measurement bound and the Fisher information reached by the
// optimal control for the field-direction qubit.

#include <cstdio>

#include "qmet/qmet.hpp"

using namespace qmet;

int main() {
  const auto model = make_qubit_direction(1.0);
  const double theta = kPi / 3;
  std::printf("%6s %10s %10s %10s %10s\n", "t", "qfi(|0>)", "max_qfi", "G", "F(V_opt)");
  for (double t : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double fq = qfi(unitary_family(model, t, PureState::basis(2, 0)), theta).value;
    const CemSolution s = g_bound(model, theta, t);
    const double f = fisher_cem(model, theta, t, s.V_opt, s.psi_opt).value;
    std::printf("%6.2f %10.5f %10.5f %10.5f %10.5f\n", t, fq, max_qfi(model, theta, t), s.G_value, f);
  }
}
