#pragma once

// Phase-estimation read-out of a controlled energy measurement.
//
// n control qubits in |+>, controlled U_tau^(2^(l-1)) on qubit l, inverse QFT on the
// register. With energies shifted so that the ground state sits at zero, an energy
// eigenstate xi leaves outcome Q with probability K_n(alpha), alpha = tau xi + 2 pi Q / 2^n,
//
//   K_n(alpha) = (sin(2^n alpha / 2) / (2^n sin(alpha / 2)))^2.
//
// When each controlled-U is built from m uncontrolled steps with a maximally mixed
// ancilla, every coherence is damped by a and rotated by phi, where tr(U_{tau/m})/d = a e^{i phi}.

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "qmet/cem.hpp"
#include "qmet/fisher.hpp"
#include "qmet/matcore.hpp"
#include "qmet/models.hpp"

namespace qmet {

enum class ReadoutMode { Ideal, Realistic };

struct ControllizationFactors {
  double a = 1.0;
  double phi = 0.0;
  cplx eps_m{0.0, 0.0};
};

struct PhaseSimConfig {
  int n = 6;
  int m = 1;
  double tau = 0.0;                    // 0 selects 0.9 * 2 pi / (xi_max - xi_min + 1e-6) at the evaluation theta
  std::optional<double> energy_shift;  // default -xi_min at every node
  UnitaryOperator V = UnitaryOperator::identity_of(1);
  DensityMatrix rho0 = DensityMatrix::maximally_mixed(1);
  double t = 1.0;
  std::optional<ControllizationFactors> forced_factors;  // replaces the factors derived from U_{tau/m}
};

inline ControllizationFactors controllization_factors(const UnitaryOperator& u, int m) {
  require(m >= 1, ErrorCode::InvalidParameter, "m must be at least 1");
  const cplx z = u.matrix().trace() / static_cast<double>(u.dim());
  ControllizationFactors f;
  f.a = std::abs(z);
  f.phi = f.a < 1e-14 ? 0.0 : std::arg(z);
  f.eps_m = std::pow(z, m) - 1.0;
  return f;
}

/// Fejer-type kernel with the removable singularity at alpha = 0 mod 2 pi.
inline double readout_kernel(double alpha, int n) {
  const double big_n = std::ldexp(1.0, n);
  const double s = std::sin(0.5 * alpha);
  if (std::abs(s) < 1e-9) return 1.0;
  const double r = std::sin(0.5 * big_n * alpha) / (big_n * s);
  return r * r;
}

/// Pr(xi_j) = <xi_j| V rho_theta V^dagger |xi_j>.
inline OutcomeDistribution energy_probs(const HamiltonianModel& model, double theta, double t, const UnitaryOperator& v,
                                        const DensityMatrix& rho0) {
  require(v.dim() == model.dim && rho0.dim() == model.dim, ErrorCode::DimensionMismatch, "control/state dimension mismatch");
  return cem_distribution(model, theta, t, v.matrix(), rho0.matrix());
}

namespace detail {

inline double default_tau(const RealVector& xi) { return 0.9 * 2.0 * kPi / (spectral_gap(xi) + 1e-6); }

inline void check_aliasing(double tau, const RealVector& xi) {
  require(tau > 0.0, ErrorCode::InvalidParameter, "tau must be positive");
  const double spread = spectral_gap(xi);
  if (tau * spread >= 2.0 * kPi)
    fail(ErrorCode::AliasingRisk, "tau * (xi_max - xi_min) = " + std::to_string(tau * spread) +
                                      " reaches 2 pi; lower tau below " + std::to_string(2.0 * kPi / spread));
}

inline void check_config(const PhaseSimConfig& cfg, const HamiltonianModel& model) {
  require(cfg.n >= 1 && cfg.n <= 12, ErrorCode::InvalidParameter, "n must lie in [1, 12]");
  require(cfg.m >= 1, ErrorCode::InvalidParameter, "m must be at least 1");
  require(cfg.V.dim() == model.dim && cfg.rho0.dim() == model.dim, ErrorCode::DimensionMismatch,
          "control/state dimension differs from the model");
}

// Energies at theta after the shift, ascending.
inline RealVector shifted_energies(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta) {
  const RealVector xi = energies(model, theta);
  const double shift = cfg.energy_shift ? *cfg.energy_shift : -xi.minCoeff();
  return (xi.array() + shift).matrix();
}

}  // namespace detail

/// tau used for a run at theta: the configured value or the anti-aliasing default.
inline double resolve_tau(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta) {
  return cfg.tau > 0.0 ? cfg.tau : detail::default_tau(energies(model, theta));
}

inline ControllizationFactors readout_factors(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta,
                                              double tau) {
  if (cfg.forced_factors) return *cfg.forced_factors;
  const RealVector xi = energies(model, theta);
  const double shift = cfg.energy_shift ? *cfg.energy_shift : -xi.minCoeff();
  const HermitianOperator h = model.h(theta) + HermitianOperator::hermitian_part(shift * identity(model.dim));
  return controllization_factors(expm_unitary(h, tau / cfg.m), cfg.m);
}

namespace detail {

inline OutcomeDistribution readout_distribution(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta,
                                                double tau, ReadoutMode mode) {
  check_config(cfg, model);
  const RealVector xi = shifted_energies(cfg, model, theta);
  check_aliasing(tau, xi);
  const RealVector p = energy_probs(model, theta, cfg.t, cfg.V, cfg.rho0).probs;
  const int n = cfg.n;
  const Index big_n = Index{1} << n;
  RealVector q = RealVector::Zero(big_n);
  ControllizationFactors f;
  if (mode == ReadoutMode::Realistic) f = readout_factors(cfg, model, theta, tau);
  for (Index j = 0; j < xi.size(); ++j) {
    if (p(j) == 0.0) continue;
    for (Index k = 0; k < big_n; ++k) {
      const double alpha = tau * xi(j) + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(big_n);
      double w;
      if (mode == ReadoutMode::Ideal) {
        w = readout_kernel(alpha, n);
      } else {
        const double beta = alpha + cfg.m * f.phi;
        w = 1.0 / static_cast<double>(big_n);
        for (int l = 1; l <= n; ++l) {
          const double pw = std::ldexp(1.0, l - 1);
          w *= 1.0 + std::pow(f.a, pw * cfg.m) * std::cos(pw * beta);
        }
      }
      q(k) += p(j) * w;
    }
  }
  return OutcomeDistribution::make(std::move(q), 1e-12, 1e-9);
}

}  // namespace detail

inline OutcomeDistribution ideal_distribution(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta) {
  return detail::readout_distribution(cfg, model, theta, resolve_tau(cfg, model, theta), ReadoutMode::Ideal);
}

inline OutcomeDistribution realistic_distribution(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta) {
  return detail::readout_distribution(cfg, model, theta, resolve_tau(cfg, model, theta), ReadoutMode::Realistic);
}

/// Fisher information of the read-out Q. tau is resolved once at theta and held fixed at the
/// differentiation nodes; the energy shift follows each node's own spectrum.
inline FisherReport fisher_phase_readout(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta,
                                         const DiffSpec& diff = {}, ReadoutMode mode = ReadoutMode::Realistic) {
  require(diff.method != DiffMethod::Analytic, ErrorCode::InvalidParameter, "read-out Fisher information is differentiated numerically");
  const double tau = resolve_tau(cfg, model, theta);
  ProbabilityModel pm;
  pm.domain = model.theta_domain;
  pm.at = [&](double x) { return detail::readout_distribution(cfg, model, x, tau, mode); };
  return classical_fisher(pm, theta, diff);
}

/// Scan tau over (0, 2 pi / spread) for the largest read-out Fisher information, then refine by golden section.
inline double tune_tau(PhaseSimConfig cfg, const HamiltonianModel& model, double theta, ReadoutMode mode = ReadoutMode::Realistic,
                       const DiffSpec& diff = {}, int samples = 200) {
  const double spread = spectral_gap(energies(model, theta));
  require(spread > 0.0, ErrorCode::DegenerateSpectrum, "zero spectral spread");
  const double tau_max = 0.999 * 2.0 * kPi / spread;
  auto score = [&](double tau) {
    cfg.tau = tau;
    try {
      return fisher_phase_readout(cfg, model, theta, diff, mode).value;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::AliasingRisk) return -1.0;
      throw;
    }
  };
  double best_tau = tau_max, best = -1.0;
  const double step = tau_max / samples;
  for (int k = 1; k <= samples; ++k) {
    const double tau = step * k;
    const double f = score(tau);
    if (f > best) {
      best = f;
      best_tau = tau;
    }
  }
  double lo = std::max(0.5 * step, best_tau - step), hi = std::min(tau_max, best_tau + step);
  constexpr double kGolden = 0.6180339887498949;
  double c1 = hi - kGolden * (hi - lo), c2 = lo + kGolden * (hi - lo);
  double f1 = score(c1), f2 = score(c2);
  for (int k = 0; k < 30; ++k) {
    if (f1 > f2) {
      hi = c2, c2 = c1, f2 = f1;
      c1 = hi - kGolden * (hi - lo);
      f1 = score(c1);
    } else {
      lo = c1, c1 = c2, f1 = f2;
      c2 = lo + kGolden * (hi - lo);
      f2 = score(c2);
    }
  }
  if (f1 > best) best = f1, best_tau = c1;
  if (f2 > best) best = f2, best_tau = c2;
  return best_tau;
}

// ---------------------------------------------------------------------------
// Brute-force oracles

/// State-vector simulation of the ideal protocol on C^(2^n) (x) C^d, one run per pure
/// component of the prepared state.
inline OutcomeDistribution circuit_oracle(const PhaseSimConfig& cfg, const HamiltonianModel& model, double theta) {
  detail::check_config(cfg, model);
  if (cfg.n > 6 || model.dim > 4) fail(ErrorCode::OracleTooLarge, "circuit oracle limited to n <= 6 and d <= 4");
  const Index d = model.dim;
  const Index big_n = Index{1} << cfg.n;
  const double tau = resolve_tau(cfg, model, theta);
  const RealVector xi = detail::shifted_energies(cfg, model, theta);
  detail::check_aliasing(tau, xi);
  const double shift = xi(0) - energies(model, theta)(0);
  const ComplexMatrix u_tau =
      expm_unitary(model.h(theta) + HermitianOperator::hermitian_part(shift * identity(d)), tau).matrix();

  // Prepared state V U_t rho0 U_t^dagger V^dagger as an ensemble of pure components.
  const ComplexMatrix w = cfg.V.matrix() * evolution(model, theta, cfg.t).matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ens(cfg.rho0.matrix());

  // Inverse QFT: |X> -> 2^{-n/2} sum_Q exp(-2 pi i X Q / 2^n) |Q>.
  ComplexMatrix qft_inv(big_n, big_n);
  for (Index q = 0; q < big_n; ++q)
    for (Index x = 0; x < big_n; ++x)
      qft_inv(q, x) = std::exp(-2.0 * kPi * kI * static_cast<double>((x * q) % big_n) / static_cast<double>(big_n)) /
                      std::sqrt(static_cast<double>(big_n));

  RealVector probs = RealVector::Zero(big_n);
  for (Index k = 0; k < d; ++k) {
    const double weight = ens.eigenvalues()(k);
    if (weight <= 1e-15) continue;
    const ComplexVector psi = w * ens.eigenvectors().col(k);
    // Row X holds the system amplitude attached to register value X.
    ComplexMatrix state(big_n, d);
    for (Index x = 0; x < big_n; ++x) state.row(x) = psi.transpose() / std::sqrt(static_cast<double>(big_n));
    ComplexMatrix power = u_tau;  // U_tau^(2^(l-1))
    for (int l = 1; l <= cfg.n; ++l) {
      for (Index x = 0; x < big_n; ++x)
        if ((x >> (l - 1)) & 1) state.row(x) = (power * state.row(x).transpose()).transpose();
      power = power * power;
    }
    const ComplexMatrix out = qft_inv * state;
    for (Index q = 0; q < big_n; ++q) probs(q) += weight * out.row(q).squaredNorm();
  }
  return OutcomeDistribution::make(std::move(probs), 1e-12, 1e-9);
}

struct ControllizationCheck {
  ComplexMatrix result;       // control (x) system state after m steps
  ComplexMatrix closed_form;  // a^{|x-y| m} e^{i (y-x) m phi} C_{U^m}[|x><y| (x) rho]
  double deviation = 0.0;     // max-norm difference
};

/// m steps of W = CSWAP (I (x) U (x) I) CSWAP on control (x) system (x) ancilla, the ancilla reset
/// to I/d before each step. The swap acts when the control is 0, so U reaches the system
/// only on the control-1 branch.
inline ControllizationCheck controllization_oracle(const UnitaryOperator& u, int x1, int y1, const DensityMatrix& rho_sys, int m) {
  require((x1 == 0 || x1 == 1) && (y1 == 0 || y1 == 1), ErrorCode::InvalidParameter, "control indices must be 0 or 1");
  require(m >= 1, ErrorCode::InvalidParameter, "m must be at least 1");
  require(u.dim() == rho_sys.dim(), ErrorCode::DimensionMismatch, "unitary and state dimensions differ");
  const Index d = u.dim();
  if (d > 6) fail(ErrorCode::OracleTooLarge, "controllization oracle limited to d <= 6");

  ComplexMatrix swap = ComplexMatrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) swap(j * d + i, i * d + j) = 1.0;
  const ComplexMatrix p0 = (ComplexMatrix(2, 2) << 1, 0, 0, 0).finished();
  const ComplexMatrix p1 = (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished();
  const ComplexMatrix cswap = tensor(p0, swap) + tensor(p1, identity(d * d));
  const ComplexMatrix gate = cswap * tensor(identity(2), tensor(u.matrix(), identity(d))) * cswap;

  ComplexMatrix ctrl = ComplexMatrix::Zero(2, 2);
  ctrl(x1, y1) = 1.0;
  ComplexMatrix state = tensor(ctrl, rho_sys.matrix());
  const ComplexMatrix ancilla = identity(d) / static_cast<double>(d);
  for (int step = 0; step < m; ++step) {
    const ComplexMatrix full = gate * tensor(state, ancilla) * gate.adjoint();
    state = partial_trace(full, 2 * d, d, Keep::A);
  }

  const ControllizationFactors f = controllization_factors(u, 1);
  ComplexMatrix um = identity(d);
  for (int step = 0; step < m; ++step) um = um * u.matrix();
  const ComplexMatrix left = x1 == 1 ? um : identity(d);
  const ComplexMatrix right = y1 == 1 ? ComplexMatrix(um.adjoint()) : identity(d);
  const cplx factor = std::pow(f.a, std::abs(x1 - y1) * m) * std::exp(kI * static_cast<double>((y1 - x1) * m) * f.phi);

  ControllizationCheck out;
  out.result = state;
  out.closed_form = factor * tensor(ctrl, left * rho_sys.matrix() * right);
  out.deviation = max_abs(out.result - out.closed_form);
  return out;
}

}  // namespace qmet
