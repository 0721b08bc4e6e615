#pragma once

// Classical and quantum Fisher information for a single real parameter.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qmet/diff.hpp"
#include "qmet/errors.hpp"
#include "qmet/matcore.hpp"

namespace qmet {

struct OutcomeDistribution {
  RealVector probs;
  double support_threshold = 1e-12;

  /// Validates normalization; entries in (-eps, 0) are rounding noise and are clamped to zero.
  static OutcomeDistribution make(RealVector p, double eps = 1e-12, double sum_tol = 1e-10) {
    require(p.size() >= 1, ErrorCode::NonNormalized, "empty distribution");
    for (Index i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p(i)) || p(i) < -std::max(eps, 1e-12))
        fail(ErrorCode::NonNormalized, "probability " + std::to_string(i) + " = " + std::to_string(p(i)));
      if (p(i) < 0.0) p(i) = 0.0;
    }
    const double s = p.sum();
    if (std::abs(s - 1.0) > sum_tol) fail(ErrorCode::NonNormalized, "probabilities sum to " + std::to_string(s));
    return {std::move(p), eps};
  }

  Index size() const noexcept { return probs.size(); }
  bool in_support(Index i) const { return probs(i) > support_threshold; }
  std::vector<Index> support() const {
    std::vector<Index> s;
    for (Index i = 0; i < size(); ++i)
      if (in_support(i)) s.push_back(i);
    return s;
  }
};

inline double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch, "distributions over different outcome sets");
  return 0.5 * (a.probs - b.probs).cwiseAbs().sum();
}

struct ProbabilityModel {
  std::function<OutcomeDistribution(double)> at;
  std::function<RealVector(double)> derivative;  // optional d/dtheta of the probabilities
  Interval domain;
};

struct FisherReport {
  double value = 0.0;
  DiffMethod method = DiffMethod::RichardsonFd;
  double step = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

inline double fisher_sum(const OutcomeDistribution& p, const RealVector& dp) {
  double f = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p.in_support(i)) f += dp(i) * dp(i) / p.probs(i);
  return f;
}

}  // namespace detail

inline FisherReport classical_fisher(const ProbabilityModel& model, double theta, const DiffSpec& diff = {}) {
  const OutcomeDistribution p = model.at(theta);
  if (diff.method == DiffMethod::Analytic) {
    require(static_cast<bool>(model.derivative), ErrorCode::InvalidParameter, "model has no analytic derivative");
    const RealVector dp = model.derivative(theta);
    require(dp.size() == p.size(), ErrorCode::DimensionMismatch, "derivative size differs from outcome count");
    return {detail::fisher_sum(p, dp), DiffMethod::Analytic, 0.0, 0.0};
  }
  const Stencil s = make_stencil(theta, diff, model.domain);
  std::vector<RealVector> values;
  for (double x : s.nodes) {
    OutcomeDistribution q = model.at(x);
    require(q.size() == p.size(), ErrorCode::DimensionMismatch, "outcome count changes with theta");
    values.push_back(std::move(q.probs));
  }
  const DiffResult<RealVector> d = combine(s, values, diff.method);
  const double f = detail::fisher_sum(p, d.derivative);
  const double f_lower = detail::fisher_sum(p, d.lower);
  return {f, diff.method, d.step, std::abs(f - f_lower)};
}

// ---------------------------------------------------------------------------
// Measurements

class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> elements, double psd_tol = 1e-10, double completeness_tol = 1e-9) {
    require(!elements.empty(), ErrorCode::InvalidPovm, "POVM needs at least one element");
    const Index d = elements.front().dim();
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (const auto& e : elements) {
      require(e.dim() == d, ErrorCode::InvalidPovm, "POVM elements of different dimension");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(e.matrix(), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -psd_tol)
        fail(ErrorCode::InvalidPovm, "element with eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
      total += e.matrix();
    }
    const double defect = max_abs(total - identity(d));
    if (defect > completeness_tol) fail(ErrorCode::InvalidPovm, "elements sum to identity only within " + std::to_string(defect));
    elements_ = std::move(elements);
  }

  /// Projective measurement onto the columns of an orthonormal basis.
  static Povm projective(const ComplexMatrix& basis) {
    std::vector<HermitianOperator> e;
    for (Index k = 0; k < basis.cols(); ++k)
      e.push_back(HermitianOperator::hermitian_part(basis.col(k) * basis.col(k).adjoint()));
    return Povm(std::move(e));
  }

  const std::vector<HermitianOperator>& elements() const noexcept { return elements_; }
  Index size() const noexcept { return static_cast<Index>(elements_.size()); }
  Index dim() const noexcept { return elements_.front().dim(); }

  RealVector probabilities(const ComplexMatrix& rho) const {
    RealVector p(size());
    for (Index x = 0; x < size(); ++x) p(x) = expectation(rho, elements_[x].matrix());
    return p;
  }

 private:
  std::vector<HermitianOperator> elements_;
};

// ---------------------------------------------------------------------------
// Quantum Fisher information

/// A parametrized state theta -> rho(theta), optionally with its exact derivative.
struct StateFamily {
  std::function<DensityMatrix(double)> rho;
  std::function<ComplexMatrix(double)> drho;
  Interval domain;
};

/// Symmetric logarithmic derivative: solves d(rho) = (rho L + L rho)/2 in the eigenbasis of rho.
inline HermitianOperator sld(const DensityMatrix& rho, const ComplexMatrix& drho) {
  require(drho.rows() == rho.dim() && drho.cols() == rho.dim(), ErrorCode::DimensionMismatch, "sld: dimension mismatch");
  const double tr = std::abs(drho.trace());
  if (tr > 1e-9) fail(ErrorCode::NotTraceless, "|tr d(rho)| = " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  const ComplexMatrix& v = es.eigenvectors();
  const RealVector& p = es.eigenvalues();
  ComplexMatrix l = v.adjoint() * drho * v;
  for (Index k = 0; k < l.rows(); ++k)
    for (Index j = 0; j < l.cols(); ++j) {
      const double s = p(k) + p(j);
      l(k, j) = s < 1e-12 ? cplx(0.0) : 2.0 * l(k, j) / s;
    }
  return HermitianOperator::hermitian_part(v * l * v.adjoint());
}

inline double sld_qfi(const DensityMatrix& rho, const ComplexMatrix& drho) {
  const HermitianOperator l = sld(rho, drho);
  return std::max(0.0, (rho.matrix() * l.matrix() * l.matrix()).trace().real());
}

namespace detail {

inline Index rank_count(const ComplexMatrix& rho, double threshold) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  return (es.eigenvalues().array() > threshold).count();
}

struct StateDerivative {
  DensityMatrix rho;
  ComplexMatrix drho;
  ComplexMatrix drho_lower;
  DiffMethod method;
  double step = 0.0;
};

inline StateDerivative state_derivative(const StateFamily& fam, double theta, const DiffSpec& diff, bool check_rank) {
  DensityMatrix rho = fam.rho(theta);
  if (diff.method == DiffMethod::Analytic) {
    require(static_cast<bool>(fam.drho), ErrorCode::InvalidParameter, "state family has no analytic derivative");
    ComplexMatrix d = fam.drho(theta);
    return {std::move(rho), d, d, DiffMethod::Analytic, 0.0};
  }
  const Stencil s = make_stencil(theta, diff, fam.domain);
  const Index rank = check_rank ? rank_count(rho.matrix(), 1e-10) : 0;
  std::vector<ComplexMatrix> values;
  for (double x : s.nodes) {
    values.push_back(fam.rho(x).matrix());
    if (check_rank && rank_count(values.back(), 1e-10) != rank)
      fail(ErrorCode::RankChange, "rank of rho changes between theta = " + std::to_string(theta) + " and " + std::to_string(x));
  }
  const DiffResult<ComplexMatrix> d = combine(s, values, diff.method);
  // A trace-one family has a traceless derivative; remove the rounding residue.
  const Index n = rho.dim();
  ComplexMatrix dm = d.derivative - d.derivative.trace() / static_cast<double>(n) * identity(n);
  ComplexMatrix dl = d.lower - d.lower.trace() / static_cast<double>(n) * identity(n);
  return {std::move(rho), 0.5 * (dm + dm.adjoint()), 0.5 * (dl + dl.adjoint()), diff.method, d.step};
}

}  // namespace detail

inline FisherReport qfi(const StateFamily& fam, double theta, const DiffSpec& diff = {}) {
  const auto sd = detail::state_derivative(fam, theta, diff, true);
  const double f = sld_qfi(sd.rho, sd.drho);
  const double f_lower = sld_qfi(sd.rho, sd.drho_lower);
  return {f, sd.method, sd.step, std::abs(f - f_lower)};
}

/// 4 Re[<dpsi|dpsi> + <psi|dpsi>^2].
inline double qfi_pure(const PureState& psi, const ComplexVector& dpsi) {
  require(dpsi.size() == psi.dim(), ErrorCode::DimensionMismatch, "qfi_pure: dimension mismatch");
  const cplx overlap = psi.amplitudes().dot(dpsi);
  return std::max(0.0, 4.0 * (dpsi.squaredNorm() + (overlap * overlap).real()));
}

// ---------------------------------------------------------------------------
// Monotone metrics

enum class MetricTag { Ari, Har, Log };

inline MetricTag parse_metric_tag(const std::string& s) {
  if (s == "ari") return MetricTag::Ari;
  if (s == "har") return MetricTag::Har;
  if (s == "log") return MetricTag::Log;
  fail(ErrorCode::UnknownMetricTag, "unknown operator-monotone function '" + s + "'");
}

/// Operator-monotone function f with f(1) = 1.
inline double monotone_function(MetricTag tag, double x) {
  switch (tag) {
    case MetricTag::Ari: return 0.5 * (1.0 + x);
    case MetricTag::Har: return 2.0 * x / (1.0 + x);
    case MetricTag::Log: {
      const double u = x - 1.0;
      if (std::abs(u) < 1e-6) return 1.0 + u / 2.0 - u * u / 12.0;
      return u / std::log(x);
    }
  }
  fail(ErrorCode::UnknownMetricTag, "unhandled metric tag");
}

namespace detail {

// In the eigenbasis of rho, (p_l - p_k) <k|d l> = <k|d rho|l> for k != l, so the
// metric reads sum_k (d rho_kk)^2 / p_k + sum_{k != l} |d rho_kl|^2 / (p_l f(p_k/p_l)).
inline double metric_sum(MetricTag tag, const RealVector& p, const ComplexMatrix& drho_eig) {
  double value = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    value += std::norm(drho_eig(k, k)) / p(k);
    for (Index l = 0; l < p.size(); ++l) {
      if (l == k) continue;
      value += std::norm(drho_eig(k, l)) / (p(l) * monotone_function(tag, p(k) / p(l)));
    }
  }
  return value;
}

}  // namespace detail

inline FisherReport monotone_metric(MetricTag tag, const StateFamily& fam, double theta, const DiffSpec& diff = {}) {
  const auto sd = detail::state_derivative(fam, theta, diff, false);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sd.rho.matrix());
  const RealVector& p = es.eigenvalues();
  if (p.minCoeff() <= 1e-10) fail(ErrorCode::RankDeficient, "smallest eigenvalue " + std::to_string(p.minCoeff()));
  const ComplexMatrix& v = es.eigenvectors();
  const double f = detail::metric_sum(tag, p, v.adjoint() * sd.drho * v);
  const double f_lower = detail::metric_sum(tag, p, v.adjoint() * sd.drho_lower * v);
  return {f, sd.method, sd.step, std::abs(f - f_lower)};
}

/// Fisher information of a fixed (theta-independent) POVM applied to a state family.
inline FisherReport fisher_of_povm(const StateFamily& fam, double theta, const Povm& povm, const DiffSpec& diff = {}) {
  require(povm.dim() == fam.rho(theta).dim(), ErrorCode::DimensionMismatch, "POVM and state dimensions differ");
  ProbabilityModel model;
  model.domain = fam.domain;
  model.at = [&](double x) { return OutcomeDistribution::make(povm.probabilities(fam.rho(x).matrix())); };
  if (fam.drho) model.derivative = [&](double x) { return povm.probabilities(fam.drho(x)); };
  return classical_fisher(model, theta, diff);
}

}  // namespace qmet
