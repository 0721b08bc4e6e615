#pragma once

// Random operators and states for property checks and optimizer restarts.

#include <random>
#include <vector>

#include "qmet/matcore.hpp"

namespace qmet {

using Rng = std::mt19937_64;

inline ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline HermitianOperator random_hermitian(Index d, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(d, d, rng);
  return HermitianOperator::hermitian_part(g);
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of R's diagonal removed.
inline UnitaryOperator haar_unitary(Index d, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian_matrix(d, d, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
  }
  return UnitaryOperator(q);
}

inline PureState random_pure_state(Index d, Rng& rng) {
  return PureState::normalized(gaussian_matrix(d, 1, rng).col(0));
}

/// Full-rank mixed state with eigenvalues bounded below by `floor`.
inline DensityMatrix random_density(Index d, Rng& rng, double floor = 0.02) {
  const ComplexMatrix g = gaussian_matrix(d, d, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = (1.0 - d * floor) * m + floor * identity(d);
  return DensityMatrix(m);
}

/// Random k-outcome POVM: Pi_x = S^{-1/2} A_x S^{-1/2} with A_x = G_x G_x^dagger and S = sum A_x.
inline std::vector<HermitianOperator> random_povm(Index d, int outcomes, Rng& rng) {
  std::vector<ComplexMatrix> a;
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (int x = 0; x < outcomes; ++x) {
    const ComplexMatrix g = gaussian_matrix(d, d, rng);
    a.push_back(g * g.adjoint());
    total += a.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(total);
  const ComplexMatrix inv_sqrt = es.operatorInverseSqrt();
  std::vector<HermitianOperator> out;
  for (const auto& ax : a) out.push_back(HermitianOperator::hermitian_part(inv_sqrt * ax * inv_sqrt));
  return out;
}

}  // namespace qmet
