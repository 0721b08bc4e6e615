#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qmet/evolution.hpp"
#include "qmet/fisher.hpp"
#include "qmet/models.hpp"

using namespace qmet;

namespace {

// 4 Var_psi(g) for a state vector and a generator.
double four_var(const ComplexVector& psi, const ComplexMatrix& g) {
  const cplx m1 = psi.dot(g * psi);
  const cplx m2 = psi.dot(g * g * psi);
  return 4.0 * (m2.real() - m1.real() * m1.real());
}

// Generator i dU U^dagger by central differences of the Taylor-series exponential.
ComplexMatrix fd_generator(const std::function<ComplexMatrix(double)>& h, double th, double t, double step = 1e-5) {
  const ComplexMatrix u = oracle::expm_herm(h(th), t);
  const ComplexMatrix du = (oracle::expm_herm(h(th + step), t) - oracle::expm_herm(h(th - step), t)) / (2 * step);
  return kI * du * u.adjoint();
}

double gap_of(const ComplexMatrix& g) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

}  // namespace

TEST(Models, DirectionGeneratorMatchesClosedForm) {
  const auto model = make_qubit_direction(1.0);
  for (double th : {0.3, kPi / 3, 1.2, 2.5})
    for (double t : {0.2, 0.7, 1.9}) {
      EXPECT_LT(max_abs(evolution(model, th, t).matrix() - oracle::direction_evolution(th, 1.0, t)), 1e-12);
      EXPECT_LT(max_abs(evolution_generator(model, th, t).matrix() - oracle::direction_generator(th, 1.0, t)), 1e-12);
    }
}

TEST(Models, XComponentGeneratorMatchesClosedForm) {
  for (double w : {0.5, 1.0, 2.0}) {
    const auto model = make_qubit_xcomponent(w);
    for (double th : {-0.8, 0.4, 1.5})
      for (double t : {0.3, 1.1}) {
        EXPECT_LT(max_abs(evolution(model, th, t).matrix() - oracle::xcomponent_evolution(th, w, t)), 1e-12);
        EXPECT_LT(max_abs(evolution_generator(model, th, t).matrix() - oracle::xcomponent_generator(th, w, t)), 1e-10);
      }
  }
}

TEST(Models, GeneratorIsHermitianAndMatchesDifferences) {
  const auto nv = make_nv_spin1(1.0, 1.44 * kPi, 5e-5 * kPi);
  const ComplexMatrix g = evolution_generator(nv, 0.4, 0.8).matrix();
  EXPECT_LT(max_abs(g - g.adjoint()), 1e-12);
  const ComplexMatrix ref = fd_generator([&](double x) { return nv.h(x).matrix(); }, 0.4, 0.8);
  EXPECT_LT(max_abs(g - ref), 1e-7);
}

TEST(Models, DirectionQfiReference) {
  const auto model = make_qubit_direction(1.0);
  for (double th : {0.4, kPi / 3, 2.0})
    for (double t : {0.3, 1.0, 2.2}) {
      const ComplexVector up = ComplexVector::Unit(2, 0);
      const ComplexVector evolved = oracle::direction_evolution(th, 1.0, t) * up;
      const double expect = four_var(evolved, oracle::direction_generator(th, 1.0, t));
      EXPECT_NEAR(reference("direction.qfi")({{"theta", th}, {"omega_t", t}}), expect, 1e-12);
      EXPECT_NEAR(unitary_qfi_pure(model, th, t, PureState(up)), expect, 1e-11);
      EXPECT_NEAR(max_qfi(model, th, t), reference("direction.max_qfi")({{"omega_t", t}}), 1e-11);
    }
}

TEST(Models, DirectionQfiAtWorkedPoint) {
  // theta = pi/3, omega t = 1: 4 sin^2 1 - (3/4) sin^2 2.
  const double v = reference("direction.qfi")({{"theta", kPi / 3}, {"omega_t", 1.0}});
  EXPECT_NEAR(v, 4 * std::pow(std::sin(1.0), 2) - 0.75 * std::pow(std::sin(2.0), 2), 1e-14);
  EXPECT_NEAR(v, 2.2122, 5e-4);
}

TEST(Models, XComponentMaxQfiReference) {
  for (double w : {0.5, 1.0})
    for (double th : {0.3, 1.2})
      for (double t : {0.5, 2.0}) {
        const double gap = gap_of(oracle::xcomponent_generator(th, w, t));
        EXPECT_NEAR(reference("xcomponent.max_qfi")({{"theta", th}, {"omega", w}, {"t", t}}), gap * gap, 1e-10);
        EXPECT_NEAR(max_qfi(make_qubit_xcomponent(w), th, t), gap * gap, 1e-10);
      }
}

TEST(Models, NvMaxQfiReference) {
  const double mu = 1.0, e = 5e-5 * kPi;
  const auto nv = make_nv_spin1(mu, 1.44 * kPi, e);
  for (double th : {0.2, 0.9})
    for (double t : {0.5, 1.5}) {
      const double gap = gap_of(fd_generator([&](double x) { return nv.h(x).matrix(); }, th, t));
      const double ref = reference("nv.max_qfi")({{"theta", th}, {"mu", mu}, {"E", e}, {"t", t}});
      EXPECT_NEAR(ref, gap * gap, 1e-6 * (1 + ref));
      EXPECT_NEAR(max_qfi(nv, th, t), ref, 1e-8 * (1 + ref));
    }
}

TEST(Models, FieldModeQfi) {
  const auto field = make_field_mode(6);
  for (double p0 : {0.1, 0.5, 0.8})
    for (double t : {0.5, 3.0}) {
      ComplexVector psi = ComplexVector::Zero(7);
      psi(0) = std::sqrt(p0);
      psi(1) = std::sqrt(1 - p0);
      const double ref = reference("jc.qfi")({{"t", t}, {"alpha0_sq", p0}});
      EXPECT_NEAR(ref, 4 * t * t * p0 * (1 - p0), 1e-14);
      EXPECT_NEAR(unitary_qfi_pure(field, 0.7, t, PureState(psi)), ref, 1e-9);
    }
}

TEST(Models, JcAtomReadoutMatchesBruteForce) {
  // Atom starts in the ground state, field in sqrt(p0)|0> + sqrt(p1)|1>; measure the atom.
  const int n_max = 4;
  const double kappa = 1.0, p0 = 0.3;
  const Index nf = n_max + 1;
  auto build = [&](double w) {
    ComplexMatrix h = ComplexMatrix::Zero(2 * nf, 2 * nf);
    for (int atom = 0; atom < 2; ++atom)
      for (int n = 0; n <= n_max; ++n) h(atom * nf + n, atom * nf + n) = w * (n + 0.5) + w * atom;
    for (int n = 0; n < n_max; ++n) {
      const double c = kappa * std::sqrt(w) * std::sqrt(n + 1.0);
      h(0 * nf + n + 1, 1 * nf + n) = c;  // |g, n+1><e, n|
      h(1 * nf + n, 0 * nf + n + 1) = c;
    }
    return h;
  };
  const auto model = make_jaynes_cummings(kappa, n_max);
  ComplexVector psi = ComplexVector::Zero(2 * nf);
  psi(0) = std::sqrt(p0);
  psi(1) = std::sqrt(1 - p0);
  for (double w : {0.3, 1.1})
    for (double t : {0.7, 2.5}) {
      EXPECT_LT(max_abs(model.h(w).matrix() - build(w)), 1e-12);
      auto excited = [&](double x) {
        const ComplexVector out = oracle::expm_herm(build(x), t) * psi;
        return out.segment(nf, nf).squaredNorm();
      };
      const double h = 1e-5;
      const double pe = excited(w), dpe = (excited(w + h) - excited(w - h)) / (2 * h);
      const double fc = dpe * dpe / (pe * (1 - pe));
      const double ref = reference("jc.fc")({{"omega", w}, {"kappa", kappa}, {"t", t}, {"alpha1_sq", 1 - p0}});
      EXPECT_NEAR(ref, fc, 1e-5 * (1 + fc));
    }
}

TEST(Models, OscillatorReferencesAreConsistent) {
  for (double w : {0.5, 1.0, 2.0})
    for (double t : {0.4, 1.3, 5.0}) {
      const double fq = reference("oscillator.qfi")({{"mass", 2.0}, {"omega", w}, {"t", t}});
      const double fc = reference("oscillator.fc")({{"mass", 2.0}, {"omega", w}});
      EXPECT_NEAR(fc / fq, reference("oscillator.gamma")({{"omega", w}, {"t", t}}), 1e-12 * fc / fq);
    }
}

TEST(Models, RegistryAndFactory) {
  EXPECT_FALSE(reference_registry().empty());
  for (const auto& r : reference_registry()) EXPECT_FALSE(r.provenance.empty());
  try {
    reference("direction.nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownReference);
  }
  EXPECT_THROW(reference("direction.qfi")({{"theta", 1.0}}), Error);
  EXPECT_EQ(make_model("nv", {}).dim, 3);
  EXPECT_EQ(make_model("jc", {{"truncation", 5}}).dim, 12);
  EXPECT_THROW(make_model("bogus", {}), Error);
  EXPECT_THROW(make_jaynes_cummings(-1.0), Error);
}

TEST(Models, AnalyticDerivativesMatchDifferences) {
  const std::vector<std::pair<HamiltonianModel, double>> cases{{make_qubit_direction(1.3), 0.8},
                                                               {make_qubit_xcomponent(0.7), -0.4},
                                                               {make_nv_spin1(1.0, 1.44 * kPi, 5e-5 * kPi), 0.6},
                                                               {make_jaynes_cummings(0.5, 4), 1.2},
                                                               {make_field_mode(4), 0.9}};
  for (const auto& [m, th] : cases) {
    const double h = 1e-6;
    const ComplexMatrix fd = (m.h(th + h).matrix() - m.h(th - h).matrix()) / (2 * h);
    EXPECT_LT(max_abs(m.dh(th).matrix() - fd), 1e-7) << m.name;
  }
}
