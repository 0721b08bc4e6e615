#pragma once

// Controlled energy measurements: measure the eigenbasis of H(theta) after a
// theta-independent control V. Everything that depends on theta is collected in
//
//   U~ = S V U_t,   S = sum_j |j><xi_j|,
//
// whose local generator is g[S] + S V g[U_t] V^dagger S^dagger. The largest
// possible spectral gap of that sum is sigma(g[U_t]) + sigma(g[S]), reached when
// S V rotates the eigenbasis of g[U_t] onto that of g[S].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qmet/diff.hpp"
#include "qmet/evolution.hpp"
#include "qmet/fisher.hpp"
#include "qmet/matcore.hpp"
#include "qmet/models.hpp"
#include "qmet/random.hpp"

namespace qmet {

struct CemOptions {
  std::optional<double> phase;  // relative phase of the optimal preparation; chosen automatically when empty
  RealVector gauge_phases;      // extra theta-independent phases on the energy eigenvectors (robustness checks)
  double support_threshold = 1e-12;
};

/// Eigenvectors of H(theta) as columns, ascending energy (column 0 is the ground state).
inline ComplexMatrix energy_basis(const HamiltonianModel& model, double theta, const RealVector& gauge_phases = {}) {
  const Eigensystem es = eig_hermitian(model.h(theta));
  require_nondegenerate(es.values);
  ComplexMatrix e = es.vectors.rowwise().reverse();
  for (Index j = 0; j < gauge_phases.size() && j < e.cols(); ++j) e.col(j) *= std::exp(kI * gauge_phases(j));
  return e;
}

inline RealVector energies(const HamiltonianModel& model, double theta) {
  const Eigensystem es = eig_hermitian(model.h(theta));
  return es.values.reverse();
}

/// Rows <xi_j|, so that S H S^dagger = diag(xi_0 <= ... <= xi_{d-1}).
inline UnitaryOperator diagonalizer_S(const HamiltonianModel& model, double theta) {
  return UnitaryOperator(energy_basis(model, theta).adjoint());
}

namespace detail {

// Re-phase each column of `e` so that <ref_j|e_j> is real and positive.
inline ComplexMatrix align_columns(ComplexMatrix e, const ComplexMatrix& ref) {
  const ComplexMatrix overlaps = ref.adjoint() * e;
  for (Index k = 0; k < e.cols(); ++k) {
    Index best = 0;
    overlaps.col(k).cwiseAbs().maxCoeff(&best);
    if (best != k) fail(ErrorCode::NonSmoothFamily, "energy eigenvector " + std::to_string(k) + " swapped with " + std::to_string(best));
    e.col(k) *= std::conj(overlaps(k, k)) / std::abs(overlaps(k, k));
  }
  return e;
}

}  // namespace detail

/// theta -> S(theta) in the gauge aligned with the eigenvectors at theta0.
inline std::function<UnitaryOperator(double)> diagonalizer_family(const HamiltonianModel& model, double theta0,
                                                                  const RealVector& gauge_phases = {}) {
  const ComplexMatrix ref = energy_basis(model, theta0, gauge_phases);
  return [model, ref, gauge_phases](double th) {
    return UnitaryOperator(detail::align_columns(energy_basis(model, th, gauge_phases), ref).adjoint());
  };
}

/// i dU/dtheta U^dagger by finite differences.
inline HermitianOperator local_generator(const std::function<UnitaryOperator(double)>& u_of, double theta,
                                         const DiffSpec& diff = {}, const Interval& domain = {}) {
  require(diff.method != DiffMethod::Analytic, ErrorCode::InvalidParameter,
          "local_generator differentiates numerically; use the model's analytic generators instead");
  const auto d = differentiate([&](double x) { return ComplexMatrix(u_of(x).matrix()); }, theta, diff, domain);
  const ComplexMatrix g = kI * d.derivative * u_of(theta).matrix().adjoint();
  const double defect = max_abs(g - g.adjoint());
  if (defect > 1e-8 * (1.0 + max_abs(g)))
    fail(ErrorCode::NonSmoothFamily, "generator anti-Hermitian part " + std::to_string(defect));
  return HermitianOperator::hermitian_part(g);
}

/// Exact g[S] in the parallel-transport gauge: i <xi_j|dH|xi_k> / (xi_j - xi_k) off the diagonal, 0 on it.
inline HermitianOperator diagonalizer_generator(const HamiltonianModel& model, double theta) {
  const ComplexMatrix e = energy_basis(model, theta);
  const RealVector xi = energies(model, theta);
  ComplexMatrix g = e.adjoint() * model.dh(theta).matrix() * e;
  for (Index j = 0; j < g.rows(); ++j)
    for (Index k = 0; k < g.cols(); ++k) g(j, k) = j == k ? cplx(0.0) : kI * g(j, k) / (xi(j) - xi(k));
  return HermitianOperator::hermitian_part(g);
}

struct GeneratorPair {
  HermitianOperator g_dyn;   // g[U_t]
  HermitianOperator g_diag;  // g[S]
  double sigma_dyn = 0.0;
  double sigma_diag = 0.0;
  double theta = 0.0;
  double t = 0.0;
};

inline GeneratorPair generators(const HamiltonianModel& model, double theta, double t, const DiffSpec& diff = {},
                                const RealVector& gauge_phases = {}) {
  if (diff.method == DiffMethod::Analytic) {
    HermitianOperator gu = evolution_generator(model, theta, t);
    HermitianOperator gs = diagonalizer_generator(model, theta);
    if (gauge_phases.size() > 0) {
      ComplexVector ph(model.dim);
      for (Index j = 0; j < model.dim; ++j) ph(j) = std::exp(-kI * (j < gauge_phases.size() ? gauge_phases(j) : 0.0));
      gs = HermitianOperator::hermitian_part(ph.asDiagonal() * gs.matrix() * ph.conjugate().asDiagonal());
    }
    const double su = spectral_gap(gu), ss = spectral_gap(gs);
    return {std::move(gu), std::move(gs), su, ss, theta, t};
  }
  // Make sure the spectrum is non-degenerate at theta before differentiating.
  energy_basis(model, theta);
  HermitianOperator gu = local_generator([&](double x) { return evolution(model, x, t); }, theta, diff, model.theta_domain);
  HermitianOperator gs = local_generator(diagonalizer_family(model, theta, gauge_phases), theta, diff, model.theta_domain);
  const double su = spectral_gap(gu), ss = spectral_gap(gs);
  return {std::move(gu), std::move(gs), su, ss, theta, t};
}

/// Eigenvectors of a Hermitian generator as columns, eigenvalues non-increasing.
inline ComplexMatrix descending_eigenvectors(const HermitianOperator& g) { return eig_hermitian(g).vectors; }

/// Outcomes on which either extremal eigenvector of g[S] has weight.
inline std::vector<Index> condition_support(const HermitianOperator& g_diag, double eps = 1e-12) {
  const ComplexMatrix v = descending_eigenvectors(g_diag);
  const Index d = v.rows();
  std::vector<Index> s;
  for (Index j = 0; j < d; ++j)
    if (std::norm(v(j, 0)) + std::norm(v(j, d - 1)) > eps) s.push_back(j);
  return s;
}

/// |<j|lambda_1>| = |<j|lambda_d>| for every j in the support.
inline bool check_condition(const HermitianOperator& g_diag, const std::vector<Index>& support) {
  const ComplexMatrix v = descending_eigenvectors(g_diag);
  const Index d = v.rows();
  for (Index j : support) {
    require(j >= 0 && j < d, ErrorCode::DimensionMismatch, "support index out of range");
    if (std::abs(std::abs(v(j, 0)) - std::abs(v(j, d - 1))) > 1e-8) return false;
  }
  return true;
}

inline bool check_condition(const HermitianOperator& g_diag) { return check_condition(g_diag, condition_support(g_diag)); }

struct CemSolution {
  double G_value = 0.0;
  double sigma_dyn = 0.0;
  double sigma_diag = 0.0;
  bool condition_holds = false;
  UnitaryOperator V_opt = UnitaryOperator::identity_of(1);
  PureState psi_opt = PureState::basis(1, 0);
  double phase = 0.0;
};

namespace detail {

// With phi = 0 the two extremal eigenvectors can interfere destructively on some
// outcome and empty it, which removes that outcome's Fisher information. Pick the
// phase that keeps the smallest outcome weight of (l1 + e^{i phi} ld)/sqrt2 largest.
inline double balanced_phase(const ComplexVector& l1, const ComplexVector& ld, const std::vector<Index>& support) {
  constexpr int kSteps = 64;
  double best_phase = 0.0, best = -1.0;
  for (int s = 0; s < kSteps; ++s) {
    const double phi = 2.0 * kPi * s / kSteps;
    double worst = std::numeric_limits<double>::infinity();
    for (Index j : support) worst = std::min(worst, 0.5 * std::norm(l1(j) + std::exp(kI * phi) * ld(j)));
    if (worst > best + 1e-12) {
      best = worst;
      best_phase = phi;
    }
  }
  return best_phase;
}

}  // namespace detail

inline CemSolution g_bound(const HamiltonianModel& model, double theta, double t, const DiffSpec& diff = {},
                           const CemOptions& opts = {}) {
  const GeneratorPair gp = generators(model, theta, t, diff, opts.gauge_phases);
  ComplexMatrix e = energy_basis(model, theta, opts.gauge_phases);
  const ComplexMatrix s = e.adjoint();
  const ComplexMatrix l_diag = descending_eigenvectors(gp.g_diag);
  const ComplexMatrix l_dyn = descending_eigenvectors(gp.g_dyn);
  // R = (descending eigenvectors)^dagger diagonalizes a generator; V = S^dagger R1^dagger R2.
  const ComplexMatrix v_opt = s.adjoint() * l_diag * l_dyn.adjoint();
  const ComplexMatrix u_tilde = s * v_opt * evolution(model, theta, t).matrix();

  const Index d = model.dim;
  const std::vector<Index> support = condition_support(gp.g_diag, opts.support_threshold);
  const ComplexVector l1 = l_diag.col(0), ld = l_diag.col(d - 1);
  const double phi = opts.phase ? *opts.phase : detail::balanced_phase(l1, ld, support);
  const ComplexVector target = (l1 + std::exp(kI * phi) * ld) / std::sqrt(2.0);

  CemSolution sol;
  sol.sigma_dyn = gp.sigma_dyn;
  sol.sigma_diag = gp.sigma_diag;
  sol.G_value = (gp.sigma_dyn + gp.sigma_diag) * (gp.sigma_dyn + gp.sigma_diag);
  sol.condition_holds = check_condition(gp.g_diag, support);
  sol.V_opt = UnitaryOperator(v_opt, Tolerances{1e-10, 1e-9});
  sol.psi_opt = PureState::normalized(u_tilde.adjoint() * target);
  sol.phase = phi;
  return sol;
}

// ---------------------------------------------------------------------------
// Fisher information of a controlled energy measurement

/// Pr(j) = <xi_j| V rho_theta V^dagger |xi_j>, j ascending in energy.
inline OutcomeDistribution cem_distribution(const HamiltonianModel& model, double theta, double t, const ComplexMatrix& v,
                                            const ComplexMatrix& rho0, double eps = 1e-12) {
  const ComplexMatrix u = evolution(model, theta, t).matrix();
  const ComplexMatrix e = energy_basis(model, theta);
  const ComplexMatrix w = e.adjoint() * v * u;
  const ComplexMatrix rv = w * rho0 * w.adjoint();
  return OutcomeDistribution::make(rv.diagonal().real(), eps);
}

inline ProbabilityModel cem_probability_model(const HamiltonianModel& model, double t, const UnitaryOperator& v,
                                              const DensityMatrix& rho0) {
  require(v.dim() == model.dim && rho0.dim() == model.dim, ErrorCode::DimensionMismatch, "control/state dimension mismatch");
  ProbabilityModel pm;
  pm.domain = model.theta_domain;
  const ComplexMatrix vm = v.matrix(), r0 = rho0.matrix();
  pm.at = [model, t, vm, r0](double th) { return cem_distribution(model, th, t, vm, r0); };
  if (model.has_derivative()) {
    // dPr(j)/dtheta = (-i [g[U~], rho^V])_jj, independent of the eigenvector phases.
    pm.derivative = [model, t, vm, r0](double th) {
      const GeneratorPair gp = generators(model, th, t, DiffSpec{DiffMethod::Analytic});
      const ComplexMatrix sv = energy_basis(model, th).adjoint() * vm;
      const ComplexMatrix w = sv * evolution(model, th, t).matrix();
      const ComplexMatrix rv = w * r0 * w.adjoint();
      const ComplexMatrix g = gp.g_diag.matrix() + sv * gp.g_dyn.matrix() * sv.adjoint();
      const ComplexMatrix dr = -kI * (g * rv - rv * g);
      return RealVector(dr.diagonal().real());
    };
  }
  return pm;
}

inline FisherReport fisher_cem(const HamiltonianModel& model, double theta, double t, const UnitaryOperator& v,
                               const DensityMatrix& rho0, const DiffSpec& diff = {}) {
  return classical_fisher(cem_probability_model(model, t, v, rho0), theta, diff);
}

inline FisherReport fisher_cem(const HamiltonianModel& model, double theta, double t, const UnitaryOperator& v,
                               const PureState& psi0, const DiffSpec& diff = {}) {
  return fisher_cem(model, theta, t, v, DensityMatrix::from_pure(psi0), diff);
}

// ---------------------------------------------------------------------------
// Derivative-free search over controls and preparations

struct OptimizerBudget {
  int restarts = 8;
  int iterations = 400;  // coordinate line searches per restart
  bool seed_analytic = true;  // restart 0 starts from the g_bound optimum
};

struct OptimizeResult {
  double best = 0.0;
  UnitaryOperator V = UnitaryOperator::identity_of(1);
  PureState psi = PureState::basis(1, 0);
  double seed_value = 0.0;  // objective at the analytic seed
  int restarts_used = 0;
  int evaluations = 0;
};


namespace detail {

// Stencil data fixed for the whole search: U_t and E^dagger at every node.
struct CemObjective {
  Stencil stencil;
  DiffMethod method = DiffMethod::RichardsonFd;
  std::vector<ComplexMatrix> u, ea;
  ComplexMatrix u0, ea0;
  double eps = 1e-12;

  CemObjective(const HamiltonianModel& model, double theta, double t, const DiffSpec& diff)
      : stencil(make_stencil(theta, diff, model.theta_domain)), method(diff.method) {
    u0 = evolution(model, theta, t).matrix();
    ea0 = energy_basis(model, theta).adjoint();
    for (double x : stencil.nodes) {
      u.push_back(evolution(model, x, t).matrix());
      ea.push_back(energy_basis(model, x).adjoint());
    }
  }

  double operator()(const ComplexMatrix& v, const ComplexVector& psi) const {
    std::vector<RealVector> values;
    values.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) values.push_back((ea[i] * (v * (u[i] * psi))).cwiseAbs2());
    const RealVector p0 = (ea0 * (v * (u0 * psi))).cwiseAbs2();
    const RealVector dp = combine(stencil, values, method).derivative;
    double f = 0.0;
    for (Index j = 0; j < p0.size(); ++j)
      if (p0(j) > eps) f += dp(j) * dp(j) / p0(j);
    return f;
  }
};

inline ComplexMatrix hermitian_from_params(const std::vector<double>& x, Index d) {
  ComplexMatrix a(d, d);
  std::size_t i = 0;
  for (Index k = 0; k < d; ++k) a(k, k) = x[i++];
  for (Index k = 0; k < d; ++k)
    for (Index l = k + 1; l < d; ++l) {
      a(k, l) = cplx(x[i], x[i + 1]);
      a(l, k) = std::conj(a(k, l));
      i += 2;
    }
  return a;
}

// Pure state from d-1 hyperspherical angles followed by d-1 relative phases.
inline ComplexVector state_from_params(const double* x, Index d) {
  ComplexVector psi(d);
  double carry = 1.0;
  for (Index k = 0; k + 1 < d; ++k) {
    psi(k) = carry * std::cos(x[k]);
    carry *= std::sin(x[k]);
  }
  psi(d - 1) = carry;
  for (Index k = 1; k < d; ++k) psi(k) *= std::exp(kI * x[d - 1 + k - 1]);
  return psi;
}

inline std::vector<double> params_from_state(const ComplexVector& psi) {
  const Index d = psi.size();
  std::vector<double> x(2 * d - 2, 0.0);
  const double ref = std::abs(psi(0)) > 0.0 ? std::arg(psi(0)) : 0.0;
  for (Index k = 0; k + 1 < d; ++k) x[k] = std::atan2(psi.tail(d - k - 1).norm(), std::abs(psi(k)));
  for (Index k = 1; k < d; ++k) x[d - 1 + k - 1] = std::abs(psi(k)) > 0.0 ? std::arg(psi(k)) - ref : 0.0;
  return x;
}

}  // namespace detail

/// Multistart coordinate-wise golden-section ascent of fisher_cem over V = V_base exp(-iA) and pure preparations.
/// Restart 0 starts from the analytic optimum of g_bound; the others from Haar-random controls and random states.
inline OptimizeResult optimize_cem(const HamiltonianModel& model, double theta, double t, const OptimizerBudget& budget,
                                   std::uint64_t seed = 1, const DiffSpec& diff = {}) {
  require(budget.restarts >= 1 && budget.iterations >= 1, ErrorCode::InvalidParameter, "optimizer budget must be positive");
  const Index d = model.dim;
  const detail::CemObjective objective(model, theta, t, diff);
  const std::size_t n_a = static_cast<std::size_t>(d * d);
  const std::size_t n_params = n_a + static_cast<std::size_t>(2 * d - 2);
  const CemSolution analytic = g_bound(model, theta, t, diff);

  OptimizeResult out;
  out.V = UnitaryOperator::identity_of(d);
  out.psi = PureState::basis(d, 0);
  out.best = -1.0;

  for (int r = 0; r < budget.restarts; ++r) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r));
    ComplexMatrix v_base;
    std::vector<double> x(n_a, 0.0);
    std::vector<double> psi_params;
    if (r == 0 && budget.seed_analytic) {
      v_base = analytic.V_opt.matrix();
      psi_params = detail::params_from_state(analytic.psi_opt.amplitudes());
    } else {
      v_base = haar_unitary(d, rng).matrix();
      psi_params = detail::params_from_state(random_pure_state(d, rng).amplitudes());
    }
    x.insert(x.end(), psi_params.begin(), psi_params.end());

    auto control = [&](const std::vector<double>& p) {
      return ComplexMatrix(v_base * expm_unitary(HermitianOperator::hermitian_part(detail::hermitian_from_params(p, d)), 1.0).matrix());
    };
    auto eval = [&](const std::vector<double>& p) {
      ++out.evaluations;
      return objective(control(p), detail::state_from_params(p.data() + n_a, d));
    };

    double fx = eval(x);
    if (r == 0) out.seed_value = fx;
    constexpr double kGolden = 0.6180339887498949;
    for (int it = 0; it < budget.iterations; ++it) {
      const std::size_t i = static_cast<std::size_t>(it) % n_params;
      const int pass = it / static_cast<int>(n_params);
      const double width = std::max(1e-6, std::pow(0.75, pass));
      double lo = x[i] - width, hi = x[i] + width;
      std::vector<double> trial = x;
      auto at = [&](double c) {
        trial[i] = c;
        return eval(trial);
      };
      double c1 = hi - kGolden * (hi - lo), c2 = lo + kGolden * (hi - lo);
      double f1 = at(c1), f2 = at(c2);
      for (int k = 0; k < 10; ++k) {
        if (f1 > f2) {
          hi = c2;
          c2 = c1;
          f2 = f1;
          c1 = hi - kGolden * (hi - lo);
          f1 = at(c1);
        } else {
          lo = c1;
          c1 = c2;
          f1 = f2;
          c2 = lo + kGolden * (hi - lo);
          f2 = at(c2);
        }
      }
      const double c = f1 > f2 ? c1 : c2;
      const double fc = std::max(f1, f2);
      if (fc > fx) {
        x[i] = c;
        fx = fc;
      }
    }
    ++out.restarts_used;
    if (fx > out.best) {
      out.best = fx;
      out.V = UnitaryOperator(control(x), Tolerances{1e-10, 1e-9});
      out.psi = PureState::normalized(detail::state_from_params(x.data() + n_a, d));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral gap of a sum

struct GapLemmaResult {
  double numeric_max = 0.0;  // best over random conjugations and the aligned pair
  double analytic = 0.0;     // sigma(M1) + sigma(M2)
  double constructed = 0.0;  // gap reached by the aligned pair alone
};

/// sigma(M1 + W M2 W^dagger) over unitaries W is at most sigma(M1) + sigma(M2), with equality
/// when W maps the eigenbasis of M2 onto that of M1 with matching order.
inline GapLemmaResult max_gap_lemma_check(const HermitianOperator& m1, const HermitianOperator& m2, int trials,
                                          std::uint64_t seed = 1) {
  require(trials >= 1, ErrorCode::InvalidParameter, "trials must be positive");
  require(m1.dim() == m2.dim(), ErrorCode::DimensionMismatch, "matrices of different dimension");
  const Index d = m1.dim();
  Rng rng(seed);
  auto gap_with = [&](const ComplexMatrix& w) {
    return spectral_gap(HermitianOperator::hermitian_part(m1.matrix() + w * m2.matrix() * w.adjoint()));
  };
  GapLemmaResult r;
  r.analytic = spectral_gap(m1) + spectral_gap(m2);
  const ComplexMatrix w_aligned = eig_hermitian(m1).vectors * eig_hermitian(m2).vectors.adjoint();
  r.constructed = gap_with(w_aligned);
  r.numeric_max = r.constructed;
  for (int k = 0; k < trials; ++k) r.numeric_max = std::max(r.numeric_max, gap_with(haar_unitary(d, rng).matrix()));
  return r;
}

}  // namespace qmet
