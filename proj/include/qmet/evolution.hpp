#pragma once

// Unitary encodings U_t(theta) = exp(-i t H(theta)) and the state families they generate.

#include <cmath>

#include "qmet/fisher.hpp"
#include "qmet/matcore.hpp"
#include "qmet/models.hpp"

namespace qmet {

/// i dU_t/dtheta U_t^dagger for U_t = exp(-i t H), from H and dH/dtheta:
///   integral_0^t exp(-iuH) dH exp(iuH) du,
/// which in the eigenbasis of H has entries dH_jk (1 - exp(-i t D_jk)) / (i D_jk), D_jk = e_j - e_k.
inline HermitianOperator evolution_generator(const HermitianOperator& h, const HermitianOperator& dh, double t) {
  require(h.dim() == dh.dim(), ErrorCode::DimensionMismatch, "H and dH differ in dimension");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  const ComplexMatrix& v = es.eigenvectors();
  const RealVector& e = es.eigenvalues();
  ComplexMatrix g = v.adjoint() * dh.matrix() * v;
  for (Index j = 0; j < g.rows(); ++j)
    for (Index k = 0; k < g.cols(); ++k) {
      const double x = t * (e(j) - e(k));
      const cplx w = std::abs(x) < 1e-8 ? t * (1.0 - 0.5 * kI * x) : (1.0 - std::exp(-kI * x)) / (kI * (e(j) - e(k)));
      g(j, k) *= w;
    }
  return HermitianOperator::hermitian_part(v * g * v.adjoint());
}

inline UnitaryOperator evolution(const HamiltonianModel& model, double theta, double t) {
  return expm_unitary(model.h(theta), t);
}

inline HermitianOperator evolution_generator(const HamiltonianModel& model, double theta, double t) {
  return evolution_generator(model.h(theta), model.dh(theta), t);
}

/// theta -> U_t(theta) rho0 U_t(theta)^dagger; exact derivative -i[g, rho] when the model has dH.
inline StateFamily unitary_family(const HamiltonianModel& model, double t, const DensityMatrix& rho0) {
  require(rho0.dim() == model.dim, ErrorCode::DimensionMismatch, "initial state and model dimensions differ");
  StateFamily fam;
  fam.domain = model.theta_domain;
  fam.rho = [model, t, rho0](double th) {
    const ComplexMatrix u = evolution(model, th, t).matrix();
    return DensityMatrix(u * rho0.matrix() * u.adjoint());
  };
  if (model.has_derivative()) {
    fam.drho = [model, t, rho0](double th) {
      const ComplexMatrix u = evolution(model, th, t).matrix();
      const ComplexMatrix rho = u * rho0.matrix() * u.adjoint();
      const ComplexMatrix g = evolution_generator(model, th, t).matrix();
      return ComplexMatrix(-kI * (g * rho - rho * g));
    };
  }
  return fam;
}

inline StateFamily unitary_family(const HamiltonianModel& model, double t, const PureState& psi0) {
  return unitary_family(model, t, DensityMatrix::from_pure(psi0));
}

/// QFI of the pure family U_t psi0 from the exact generator: 4 Var_{psi_theta}(g).
inline double unitary_qfi_pure(const HamiltonianModel& model, double theta, double t, const PureState& psi0) {
  const ComplexVector psi = evolution(model, theta, t).matrix() * psi0.amplitudes();
  return 4.0 * operator_variance(PureState::normalized(psi), evolution_generator(model, theta, t));
}

/// Maximum QFI over preparations for the encoding U_t: sigma(g)^2.
inline double max_qfi(const HamiltonianModel& model, double theta, double t) {
  const double s = spectral_gap(evolution_generator(model, theta, t));
  return s * s;
}

}  // namespace qmet
