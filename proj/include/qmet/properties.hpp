#pragma once

// Randomized property suites: inequalities and identities that must hold for
// every input, checked on seeded random draws.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qmet/cem.hpp"
#include "qmet/evolution.hpp"
#include "qmet/fisher.hpp"
#include "qmet/random.hpp"

namespace qmet {

struct PropertyResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  double worst = 0.0;  // largest violation margin seen (<= 0 is fine for inequalities)
  std::string detail;
};

namespace detail {

// theta -> exp(-i theta G) as a model, so that unitary_family gives rho_theta = e^{-i theta G} rho0 e^{i theta G}.
inline HamiltonianModel linear_model(const HermitianOperator& g) {
  HamiltonianModel m;
  m.name = "linear";
  m.dim = g.dim();
  m.h_of = [g](double th) { return th * g; };
  m.dh_of = [g](double) { return g; };
  return m;
}

inline Index pick_dim(Rng& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> u(lo, hi);
  return u(rng);
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace detail

/// Fixed-POVM Fisher information never exceeds the QFI.
inline PropertyResult check_braunstein_caves(int draws, std::uint64_t seed) {
  Rng rng(seed);
  PropertyResult r{"braunstein-caves", true, 0, -1e300, ""};
  for (int k = 0; k < draws; ++k) {
    const Index d = detail::pick_dim(rng, 2, 3);
    const auto model = detail::linear_model(random_hermitian(d, rng));
    const bool pure = k % 2 == 0;
    const DensityMatrix rho0 = pure ? DensityMatrix::from_pure(random_pure_state(d, rng)) : random_density(d, rng);
    const auto fam = unitary_family(model, 1.0, rho0);
    const Povm povm(random_povm(d, static_cast<int>(detail::pick_dim(rng, 2, 4)), rng));
    const double theta = detail::uniform(rng, -1.0, 1.0);
    const double fc = fisher_of_povm(fam, theta, povm).value;
    const double fq = qfi(fam, theta).value;
    r.worst = std::max(r.worst, fc - fq);
    r.passed = r.passed && fc <= fq + 1e-6;
    ++r.cases;
  }
  r.detail = "max(F_C - F_Q) = " + detail::sci(r.worst);
  return r;
}

/// Var_psi(O) <= sigma(O)^2 / 4.
inline PropertyResult check_popoviciu(int draws, std::uint64_t seed) {
  Rng rng(seed);
  PropertyResult r{"popoviciu", true, 0, -1e300, ""};
  for (int k = 0; k < draws; ++k) {
    const Index d = detail::pick_dim(rng, 2, 5);
    const HermitianOperator o = random_hermitian(d, rng);
    const PureState psi = random_pure_state(d, rng);
    const double gap = spectral_gap(o);
    const double margin = operator_variance(psi, o) - 0.25 * gap * gap;
    r.worst = std::max(r.worst, margin);
    r.passed = r.passed && margin <= 1e-10;
    ++r.cases;
  }
  r.detail = "max(Var - sigma^2/4) = " + detail::sci(r.worst);
  return r;
}

/// sigma(M1 + W M2 W^dagger) <= sigma(M1) + sigma(M2), reached by the aligned W.
inline PropertyResult check_gap_lemma(int draws, std::uint64_t seed, int trials = 20) {
  Rng rng(seed);
  PropertyResult r{"spectral-gap-lemma", true, 0, -1e300, ""};
  double worst_constructed = 0.0;
  for (int k = 0; k < draws; ++k) {
    const Index d = detail::pick_dim(rng, 2, 5);
    const HermitianOperator m1 = random_hermitian(d, rng), m2 = random_hermitian(d, rng);
    const GapLemmaResult g = max_gap_lemma_check(m1, m2, trials, rng());
    r.worst = std::max(r.worst, g.numeric_max - g.analytic);
    worst_constructed = std::max(worst_constructed, std::abs(g.constructed - g.analytic));
    r.passed = r.passed && g.numeric_max <= g.analytic + 1e-9 && std::abs(g.constructed - g.analytic) <= 1e-9;
    ++r.cases;
  }
  r.detail = "max(numeric - analytic) = " + detail::sci(r.worst) +
             ", max|constructed - analytic| = " + detail::sci(worst_constructed);
  return r;
}

/// F_Q(sum l_i rho_i) <= sum l_i F_Q(rho_i) for a common unitary encoding.
inline PropertyResult check_extended_convexity(int draws, std::uint64_t seed) {
  Rng rng(seed);
  PropertyResult r{"extended-convexity", true, 0, -1e300, ""};
  for (int k = 0; k < draws; ++k) {
    const Index d = detail::pick_dim(rng, 2, 4);
    const auto model = detail::linear_model(random_hermitian(d, rng));
    const int parts = static_cast<int>(detail::pick_dim(rng, 2, 3));
    std::vector<double> w;
    for (int i = 0; i < parts; ++i) w.push_back(detail::uniform(rng, 0.1, 1.0));
    double total = 0.0;
    for (double x : w) total += x;
    ComplexMatrix mix = ComplexMatrix::Zero(d, d);
    double bound = 0.0;
    const double theta = detail::uniform(rng, -1.0, 1.0);
    for (int i = 0; i < parts; ++i) {
      const PureState psi = random_pure_state(d, rng);
      mix += w[i] / total * psi.projector();
      bound += w[i] / total * unitary_qfi_pure(model, theta, 1.0, psi);
    }
    const double fq = qfi(unitary_family(model, 1.0, DensityMatrix(mix)), theta).value;
    r.worst = std::max(r.worst, fq - bound);
    r.passed = r.passed && fq <= bound + 1e-8;
    ++r.cases;
  }
  r.detail = "max(F_Q(mixture) - average F_Q) = " + detail::sci(r.worst);
  return r;
}

/// The arithmetic-mean monotone metric equals the SLD QFI; the harmonic one is the
/// largest and the arithmetic one the smallest of the three.
inline PropertyResult check_monotone_metrics(int draws, std::uint64_t seed) {
  Rng rng(seed);
  PropertyResult r{"monotone-metric", true, 0, 0.0, ""};
  int order_violations = 0;
  for (int k = 0; k < draws; ++k) {
    const Index d = detail::pick_dim(rng, 2, 3);
    const auto model = detail::linear_model(random_hermitian(d, rng));
    const auto fam = unitary_family(model, 1.0, random_density(d, rng));
    const double theta = detail::uniform(rng, -1.0, 1.0);
    const double ari = monotone_metric(MetricTag::Ari, fam, theta).value;
    const double lg = monotone_metric(MetricTag::Log, fam, theta).value;
    const double har = monotone_metric(MetricTag::Har, fam, theta).value;
    const double fq = qfi(fam, theta).value;
    r.worst = std::max(r.worst, std::abs(ari - fq));
    if (!(har >= lg - 1e-9 && lg >= ari - 1e-9)) ++order_violations;
    r.passed = r.passed && std::abs(ari - fq) <= 1e-7;
    ++r.cases;
  }
  r.passed = r.passed && order_violations == 0;
  r.detail = "max|ari - F_Q| = " + detail::sci(r.worst) + ", ordering violations = " + std::to_string(order_violations);
  return r;
}

inline std::vector<PropertyResult> run_property_suites(std::uint64_t seed = 20240601) {
  return {check_braunstein_caves(100, seed), check_popoviciu(200, seed + 1), check_gap_lemma(50, seed + 2),
          check_extended_convexity(50, seed + 3), check_monotone_metrics(50, seed + 4)};
}

}  // namespace qmet
