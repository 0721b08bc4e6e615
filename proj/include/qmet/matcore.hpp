#pragma once

// Dense complex linear algebra on small Hilbert spaces.
//
// Every operator type validates its defining invariant on construction and is
// immutable afterwards. Eigensystems use non-increasing eigenvalue order
// (lambda_1 >= ... >= lambda_d) throughout the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "qmet/errors.hpp"

namespace qmet {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Thresholds used by the invariant checks. The defaults are the library-wide
/// values; callers may pass a modified copy to any operation taking one.
struct Tolerances {
  double hermitian = 1e-10;   // relative to 1 + max|M|
  double unitary = 1e-10;
  double density_eigen = 1e-10;
  double trace = 1e-10;
  double norm = 1e-12;
  double degeneracy = 1e-8;   // relative to 1 + spectral gap
};

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(double x) { return std::abs(x); }

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

inline bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() >= 1; }

// ---------------------------------------------------------------------------
// Operator and state types

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, const Tolerances& tol = {}) {
    require(is_square(m), ErrorCode::DimensionMismatch, "Hermitian operator must be a non-empty square matrix");
    const double defect = max_abs(m - m.adjoint());
    if (defect > tol.hermitian * (1.0 + max_abs(m)))
      fail(ErrorCode::NonHermitianInput, "max|M - M^dagger| = " + std::to_string(defect));
    m_ = 0.5 * (m + m.adjoint());
  }

  /// Hermitian part (M + M^dagger)/2 without any check.
  static HermitianOperator hermitian_part(const ComplexMatrix& m) {
    HermitianOperator h;
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

  HermitianOperator operator+(const HermitianOperator& o) const { return hermitian_part(m_ + o.m_); }
  HermitianOperator operator-(const HermitianOperator& o) const { return hermitian_part(m_ - o.m_); }
  HermitianOperator operator*(double s) const { return hermitian_part(s * m_); }

 private:
  HermitianOperator() = default;
  ComplexMatrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m, const Tolerances& tol = {}) {
    require(is_square(m), ErrorCode::DimensionMismatch, "unitary must be a non-empty square matrix");
    const double defect = max_abs(m * m.adjoint() - identity(m.rows()));
    if (defect > tol.unitary) fail(ErrorCode::NonUnitaryInput, "max|U U^dagger - I| = " + std::to_string(defect));
    m_ = std::move(m);
  }

  static UnitaryOperator identity_of(Index d) { return UnitaryOperator(identity(d)); }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  UnitaryOperator adjoint() const { return UnitaryOperator(m_.adjoint()); }
  UnitaryOperator operator*(const UnitaryOperator& o) const { return UnitaryOperator(m_ * o.m_); }

 private:
  ComplexMatrix m_;
};

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes, const Tolerances& tol = {}) {
    require(amplitudes.size() >= 1, ErrorCode::DimensionMismatch, "state must have at least one amplitude");
    const double n = amplitudes.norm();
    if (std::abs(n - 1.0) > tol.norm) fail(ErrorCode::InvalidState, "state norm deviates from 1 by " + std::to_string(n - 1.0));
    v_ = std::move(amplitudes);
  }

  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    require(n > 0.0 && std::isfinite(n), ErrorCode::InvalidState, "cannot normalize a zero or non-finite vector");
    return PureState(v / n);
  }

  static PureState basis(Index d, Index k) {
    require(k >= 0 && k < d, ErrorCode::DimensionMismatch, "basis index out of range");
    ComplexVector v = ComplexVector::Zero(d);
    v(k) = 1.0;
    return PureState(std::move(v));
  }

  const ComplexVector& amplitudes() const noexcept { return v_; }
  Index dim() const noexcept { return v_.size(); }
  ComplexMatrix projector() const { return v_ * v_.adjoint(); }

 private:
  ComplexVector v_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m, const Tolerances& tol = {}) {
    HermitianOperator h(m, tol);
    const double tr = h.matrix().trace().real();
    if (std::abs(tr - 1.0) > tol.trace) fail(ErrorCode::InvalidState, "trace deviates from 1 by " + std::to_string(tr - 1.0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.density_eigen)
      fail(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    m_ = h.matrix();
  }

  static DensityMatrix from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(Index d) { return DensityMatrix(identity(d) / static_cast<double>(d)); }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// Spectral decomposition

enum class Gauge { PhaseFixed, OverlapAligned };

struct Eigensystem {
  RealVector values;      // non-increasing
  ComplexMatrix vectors;  // column k belongs to values(k)
  Gauge gauge = Gauge::PhaseFixed;

  Index dim() const noexcept { return values.size(); }
  PureState vector(Index k) const { return PureState::normalized(vectors.col(k)); }
  ComplexMatrix reconstruct() const { return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint(); }
};

namespace detail {

// Largest-modulus entry real and non-negative; ties (within 1e-12) go to the lowest index.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
  const double top = v.cwiseAbs().maxCoeff();
  Index k = 0;
  while (std::abs(v(k)) < top - 1e-12) ++k;
  if (std::abs(v(k)) > 0.0) v *= std::conj(v(k)) / std::abs(v(k));
}

}  // namespace detail

/// Eigendecomposition with non-increasing eigenvalues and phase-fixed eigenvectors.
inline Eigensystem eig_hermitian(const HermitianOperator& m) {
  const Index d = m.dim();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix());
  Eigensystem out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  for (Index k = 0; k < d; ++k) detail::fix_phase(out.vectors.col(k));
  out.gauge = Gauge::PhaseFixed;
  return out;
}

inline Eigensystem eig_hermitian(const ComplexMatrix& m, const Tolerances& tol = {}) {
  return eig_hermitian(HermitianOperator(m, tol));
}

/// Re-phase the eigenvectors of `es` so that <reference_k|es_k> is real and positive.
/// Each column must have its maximal overlap with the same-index reference column;
/// anything else means the spectrum reordered between the two points.
inline Eigensystem align_gauge(Eigensystem es, const Eigensystem& reference) {
  require(es.dim() == reference.dim(), ErrorCode::DimensionMismatch, "eigensystems of different dimension");
  const ComplexMatrix overlaps = reference.vectors.adjoint() * es.vectors;
  for (Index k = 0; k < es.dim(); ++k) {
    Index best = 0;
    overlaps.col(k).cwiseAbs().maxCoeff(&best);
    if (best != k)
      fail(ErrorCode::NonSmoothFamily, "eigenvector " + std::to_string(k) + " matched reference column " + std::to_string(best));
    const cplx o = overlaps(k, k);
    es.vectors.col(k) *= std::conj(o) / std::abs(o);
  }
  es.gauge = Gauge::OverlapAligned;
  return es;
}

inline Eigensystem eig_hermitian_aligned(const HermitianOperator& m, const Eigensystem& reference) {
  return align_gauge(eig_hermitian(m), reference);
}

inline double spectral_gap(const RealVector& values) {
  return values.size() == 0 ? 0.0 : values.maxCoeff() - values.minCoeff();
}

inline double spectral_gap(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(m.dim() - 1) - es.eigenvalues()(0));
}

/// Raises DegenerateSpectrum when two consecutive eigenvalues are closer than
/// tol.degeneracy * (1 + spectral gap).
inline void require_nondegenerate(const RealVector& values, const Tolerances& tol = {}) {
  const double threshold = tol.degeneracy * (1.0 + spectral_gap(values));
  for (Index k = 1; k < values.size(); ++k) {
    if (std::abs(values(k - 1) - values(k)) < threshold)
      fail(ErrorCode::DegenerateSpectrum, "eigenvalues " + std::to_string(k - 1) + " and " + std::to_string(k) + " coincide");
  }
}

/// exp(-i t H) through the eigendecomposition of H.
inline UnitaryOperator expm_unitary(const HermitianOperator& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  ComplexVector phases(h.dim());
  for (Index k = 0; k < h.dim(); ++k) phases(k) = std::exp(-kI * (t * es.eigenvalues()(k)));
  const ComplexMatrix& v = es.eigenvectors();
  return UnitaryOperator(v * phases.asDiagonal() * v.adjoint());
}

// ---------------------------------------------------------------------------
// Tensor structure

inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

enum class Keep { A, B };

/// Partial trace over one factor of C^{dA} (x) C^{dB}; `keep` names the surviving factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Index d_a, Index d_b, Keep keep) {
  require(d_a >= 1 && d_b >= 1 && m.rows() == d_a * d_b && m.cols() == d_a * d_b, ErrorCode::DimensionMismatch,
          "partial_trace: matrix is not (dA*dB) x (dA*dB)");
  if (keep == Keep::A) {
    ComplexMatrix out = ComplexMatrix::Zero(d_a, d_a);
    for (Index i = 0; i < d_a; ++i)
      for (Index j = 0; j < d_a; ++j) out(i, j) = m.block(i * d_b, j * d_b, d_b, d_b).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d_b, d_b);
  for (Index i = 0; i < d_a; ++i) out += m.block(i * d_b, i * d_b, d_b, d_b);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

/// <psi|O^2|psi> - <psi|O|psi>^2, clamped at zero.
inline double operator_variance(const PureState& psi, const HermitianOperator& o) {
  require(psi.dim() == o.dim(), ErrorCode::DimensionMismatch, "operator_variance: dimension mismatch");
  const ComplexVector ov = o.matrix() * psi.amplitudes();
  const double mean = psi.amplitudes().dot(ov).real();
  const double second = ov.squaredNorm();
  return std::max(0.0, second - mean * mean);
}

inline double expectation(const ComplexMatrix& rho, const ComplexMatrix& op) { return (rho * op).trace().real(); }

// ---------------------------------------------------------------------------
// Common matrices

namespace pauli {
inline ComplexMatrix x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline ComplexMatrix y() { return (ComplexMatrix(2, 2) << 0, -kI, kI, 0).finished(); }
inline ComplexMatrix z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace pauli

}  // namespace qmet
