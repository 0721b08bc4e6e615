#pragma once

// Parametrized Hamiltonian families theta -> H(theta) together with the
// closed-form reference functions used to cross-check the numerics.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmet/diff.hpp"
#include "qmet/errors.hpp"
#include "qmet/matcore.hpp"

namespace qmet {

using ParamMap = std::map<std::string, double>;

struct HamiltonianModel {
  std::string name;
  Index dim = 0;
  ParamMap params;
  std::function<HermitianOperator(double)> h_of;
  std::function<HermitianOperator(double)> dh_of;  // empty when no analytic derivative exists
  Interval theta_domain;

  HermitianOperator h(double theta) const { return h_of(theta); }
  bool has_derivative() const { return static_cast<bool>(dh_of); }
  HermitianOperator dh(double theta) const {
    require(has_derivative(), ErrorCode::InvalidParameter, "model '" + name + "' has no analytic derivative");
    return dh_of(theta);
  }
  double param(const std::string& key) const {
    auto it = params.find(key);
    require(it != params.end(), ErrorCode::InvalidParameter, "model '" + name + "' has no parameter '" + key + "'");
    return it->second;
  }
};

namespace spin1 {
// Spin matrices with the prefactors used by the NV-centre model: S_z = 2 diag(1, 0, -1),
// S_x and S_y carry sqrt(2).
inline ComplexMatrix sx() {
  return std::sqrt(2.0) * (ComplexMatrix(3, 3) << 0, 1, 0, 1, 0, 1, 0, 1, 0).finished();
}
inline ComplexMatrix sy() {
  return std::sqrt(2.0) * kI * (ComplexMatrix(3, 3) << 0, -1, 0, 1, 0, -1, 0, 1, 0).finished();
}
inline ComplexMatrix sz() { return 2.0 * (ComplexMatrix(3, 3) << 1, 0, 0, 0, 0, 0, 0, 0, -1).finished(); }
}  // namespace spin1

namespace ladder {
/// Annihilation operator on the Fock space truncated at n_max quanta.
inline ComplexMatrix annihilation(int n_max) {
  ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}
inline ComplexMatrix number(int n_max) {
  ComplexMatrix n = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int k = 0; k <= n_max; ++k) n(k, k) = static_cast<double>(k);
  return n;
}
}  // namespace ladder

/// H = omega (cos theta sigma_z + sin theta sigma_x): polar direction of a field of known strength.
inline HamiltonianModel make_qubit_direction(double omega) {
  require(omega > 0.0, ErrorCode::InvalidParameter, "omega must be positive");
  HamiltonianModel m;
  m.name = "direction";
  m.dim = 2;
  m.params = {{"omega", omega}};
  m.h_of = [omega](double th) {
    return HermitianOperator(omega * (std::cos(th) * pauli::z() + std::sin(th) * pauli::x()));
  };
  m.dh_of = [omega](double th) {
    return HermitianOperator(omega * (-std::sin(th) * pauli::z() + std::cos(th) * pauli::x()));
  };
  m.theta_domain = {0.0, kPi};
  return m;
}

/// H = -omega sigma_z + theta sigma_x: transverse field component.
inline HamiltonianModel make_qubit_xcomponent(double omega) {
  require(omega > 0.0, ErrorCode::InvalidParameter, "omega must be positive");
  HamiltonianModel m;
  m.name = "xcomponent";
  m.dim = 2;
  m.params = {{"omega", omega}};
  m.h_of = [omega](double th) { return HermitianOperator(-omega * pauli::z() + th * pauli::x()); };
  m.dh_of = [](double) { return HermitianOperator(pauli::x()); };
  return m;
}

/// H = mu theta S_z + D S_z^2 + E (S_x^2 - S_y^2): spin-1 (NV centre) probe of a weak axial field.
inline HamiltonianModel make_nv_spin1(double mu, double d, double e) {
  require(mu > 0.0 && d >= 0.0 && e >= 0.0, ErrorCode::InvalidParameter, "NV model needs mu > 0, D >= 0, E >= 0");
  const ComplexMatrix sz = spin1::sz();
  const ComplexMatrix fixed = d * sz * sz + e * (spin1::sx() * spin1::sx() - spin1::sy() * spin1::sy());
  HamiltonianModel m;
  m.name = "nv";
  m.dim = 3;
  m.params = {{"mu", mu}, {"D", d}, {"E", e}};
  m.h_of = [=](double th) { return HermitianOperator(mu * th * sz + fixed); };
  m.dh_of = [=](double) { return HermitianOperator(mu * sz); };
  m.theta_domain = {0.0, std::numeric_limits<double>::infinity()};
  return m;
}

/// Free bosonic mode H = omega (a^dagger a + 1/2), truncated at n_max quanta; theta is omega.
inline HamiltonianModel make_field_mode(int n_max = 8) {
  require(n_max >= 1, ErrorCode::InvalidParameter, "Fock truncation must be at least 1");
  const ComplexMatrix h0 = ladder::number(n_max) + 0.5 * identity(n_max + 1);
  HamiltonianModel m;
  m.name = "field";
  m.dim = n_max + 1;
  m.params = {{"truncation", static_cast<double>(n_max)}};
  m.h_of = [h0](double w) { return HermitianOperator(w * h0); };
  m.dh_of = [h0](double) { return HermitianOperator(h0); };
  m.theta_domain = {0.0, std::numeric_limits<double>::infinity()};
  return m;
}

/// Two-level atom (basis g, e) coupled to a truncated mode (basis |0>..|n_max>), atom (x) field ordering.
/// H(omega) = omega (a^dagger a + 1/2) + omega sigma_+ sigma_- + kappa sqrt(omega) (a^dagger sigma_- + a sigma_+).
/// The atom is resonant with the mode, so the free part commutes with the coupling and with
/// atom-only projectors.
inline HamiltonianModel make_jaynes_cummings(double kappa, int n_max = 8) {
  require(kappa >= 0.0, ErrorCode::InvalidParameter, "kappa must be non-negative");
  require(n_max >= 2, ErrorCode::InvalidParameter, "Fock truncation must be at least 2");
  const Index nf = n_max + 1;
  const ComplexMatrix a = ladder::annihilation(n_max);
  const ComplexMatrix sigma_minus = (ComplexMatrix(2, 2) << 0, 1, 0, 0).finished();  // |g><e|
  const ComplexMatrix sigma_plus = sigma_minus.adjoint();                           // |e><g|
  const ComplexMatrix free = tensor(identity(2), ladder::number(n_max) + 0.5 * identity(nf)) +
                             tensor(sigma_plus * sigma_minus, identity(nf));
  const ComplexMatrix coupling = tensor(sigma_minus, a.adjoint()) + tensor(sigma_plus, a);
  HamiltonianModel m;
  m.name = "jc";
  m.dim = 2 * nf;
  m.params = {{"kappa", kappa}, {"truncation", static_cast<double>(n_max)}};
  m.h_of = [=](double w) { return HermitianOperator(w * free + kappa * std::sqrt(w) * coupling); };
  m.dh_of = [=](double w) { return HermitianOperator(free + 0.5 * kappa / std::sqrt(w) * coupling); };
  m.theta_domain = {0.0, std::numeric_limits<double>::infinity()};
  return m;
}

/// Index of |atom, n> in the atom (x) field basis of make_jaynes_cummings.
inline Index jc_index(int atom, int n, int n_max) { return static_cast<Index>(atom) * (n_max + 1) + n; }

// ---------------------------------------------------------------------------
// Closed-form references

struct ClosedFormReference {
  std::string name;
  std::vector<std::string> arguments;
  std::function<double(const ParamMap&)> formula;
  std::string provenance;

  double operator()(const ParamMap& args) const {
    for (const auto& a : arguments)
      require(args.count(a) > 0, ErrorCode::InvalidParameter, "reference '" + name + "' needs argument '" + a + "'");
    return formula(args);
  }
};

namespace detail {

inline double sq(double x) { return x * x; }

inline std::vector<ClosedFormReference> build_references() {
  std::vector<ClosedFormReference> r;
  r.push_back({"direction.qfi", {"theta", "omega_t"},
               [](const ParamMap& a) {
                 const double wt = a.at("omega_t");
                 return 4.0 * sq(std::sin(wt)) - sq(std::sin(2.0 * wt)) * sq(std::sin(a.at("theta")));
               },
               "field direction qubit, |0> preparation: QFI"});
  r.push_back({"direction.max_qfi", {"omega_t"},
               [](const ParamMap& a) { return 4.0 * sq(std::sin(a.at("omega_t"))); },
               "field direction qubit: QFI maximized over preparations"});
  r.push_back({"direction.g", {"omega_t"},
               [](const ParamMap& a) { return sq(2.0 * std::abs(std::sin(a.at("omega_t"))) + 1.0); },
               "field direction qubit: controlled-energy-measurement bound"});
  r.push_back({"xcomponent.max_qfi", {"theta", "omega", "t"},
               [](const ParamMap& a) {
                 const double th = a.at("theta"), w = a.at("omega"), t = a.at("t");
                 const double om2 = w * w + th * th, om = std::sqrt(om2);
                 return 2.0 / (om2 * om2) * (2.0 * om2 * t * t * th * th - w * w * std::cos(2.0 * om * t) + w * w);
               },
               "transverse field component qubit: QFI maximized over preparations"});
  r.push_back({"xcomponent.g", {"theta", "omega", "t"},
               [](const ParamMap& a) {
                 const double th = a.at("theta"), w = a.at("omega"), t = a.at("t");
                 const double om2 = w * w + th * th, om = std::sqrt(om2);
                 const double inner = 2.0 * (2.0 * om2 * t * t * th * th - w * w * std::cos(2.0 * om * t) + w * w);
                 return sq(w / om2 + std::sqrt(std::max(0.0, inner)) / om2);
               },
               "transverse field component qubit: controlled-energy-measurement bound"});
  r.push_back({"xcomponent.sigma_diag", {"theta", "omega"},
               [](const ParamMap& a) {
                 const double th = a.at("theta"), w = a.at("omega");
                 return w / (w * w + th * th);
               },
               "transverse field component qubit: spectral gap of the diagonalizer generator"});
  r.push_back({"nv.max_qfi", {"theta", "mu", "E", "t"},
               [](const ParamMap& a) {
                 const double th = a.at("theta"), mu = a.at("mu"), e = a.at("E"), t = a.at("t");
                 const double chi2 = th * th * mu * mu + 4.0 * e * e, chi = std::sqrt(chi2);
                 return 8.0 * mu * mu * (2.0 * th * th * mu * mu * t * t * chi2 + e * e - e * e * std::cos(4.0 * chi * t)) /
                        (chi2 * chi2);
               },
               "spin-1 NV probe: QFI maximized over preparations"});
  r.push_back({"nv.g", {"theta", "mu", "E", "t"},
               [](const ParamMap& a) {
                 const double th = a.at("theta"), mu = a.at("mu"), e = a.at("E"), t = a.at("t");
                 const double chi2 = th * th * mu * mu + 4.0 * e * e, chi = std::sqrt(chi2);
                 const double inner = 2.0 * th * th * mu * mu * t * t * chi2 + e * e - e * e * std::cos(4.0 * chi * t);
                 return sq(2.0 * e * mu / chi2 + 2.0 * std::sqrt(2.0) * mu * std::sqrt(std::max(0.0, inner)) / chi2);
               },
               "spin-1 NV probe: controlled-energy-measurement bound"});
  r.push_back({"jc.qfi", {"t", "alpha0_sq"},
               [](const ParamMap& a) {
                 const double p0 = a.at("alpha0_sq"), t = a.at("t");
                 return 4.0 * t * t * p0 * (1.0 - p0);
               },
               "bosonic mode frequency, two-level Fock superposition: QFI"});
  r.push_back({"jc.fc", {"omega", "kappa", "t", "alpha1_sq"},
               [](const ParamMap& a) {
                 const double w = a.at("omega"), t = a.at("t"), p1 = a.at("alpha1_sq");
                 const double big = a.at("kappa") * std::sqrt(w);
                 const double c = std::cos(big * t), s = std::sin(big * t);
                 return sq(big * t / w) * p1 * c * c / (1.0 - p1 * s * s);
               },
               "bosonic mode frequency read out by a Jaynes-Cummings atom: Fisher information"});
  r.push_back({"jc.region", {"omega", "kappa", "t", "alpha0_sq"},
               [](const ParamMap& a) {
                 const double w = a.at("omega"), t = a.at("t"), p0 = a.at("alpha0_sq");
                 const double big = a.at("kappa") * std::sqrt(w);
                 const double tan2 = sq(std::tan(big * t));
                 const double ratio = big * big / (w * w);
                 const double bound = tan2 < 1e-12 ? 0.25 * ratio * (1.0 - 0.25 * ratio * tan2)
                                                   : (std::sqrt(1.0 + ratio * tan2) - 1.0) / (2.0 * tan2);
                 return p0 < bound ? 1.0 : 0.0;
               },
               "bosonic mode frequency: indicator of F_C/F_Q > 1 from the |alpha_0|^2 inequality"});
  r.push_back({"oscillator.qfi", {"mass", "omega", "t"},
               [](const ParamMap& a) {
                 const double w = a.at("omega");
                 return 8.0 * a.at("mass") / (w * w * w) * sq(std::sin(0.5 * w * a.at("t")));
               },
               "displaced oscillator in a uniform field: QFI for the field strength"});
  r.push_back({"oscillator.fc", {"mass", "omega"},
               [](const ParamMap& a) {
                 const double w = a.at("omega");
                 return 2.0 * a.at("mass") / (w * w * w);
               },
               "displaced oscillator in a uniform field: energy-measurement Fisher information"});
  r.push_back({"oscillator.gamma", {"omega", "t"},
               [](const ParamMap& a) { return 1.0 / (4.0 * sq(std::sin(0.5 * a.at("omega") * a.at("t")))); },
               "displaced oscillator: energy-measurement FI over QFI"});
  return r;
}

}  // namespace detail

inline const std::vector<ClosedFormReference>& reference_registry() {
  static const std::vector<ClosedFormReference> registry = detail::build_references();
  return registry;
}

inline const ClosedFormReference& reference(const std::string& name) {
  for (const auto& r : reference_registry())
    if (r.name == name) return r;
  fail(ErrorCode::UnknownReference, "no closed-form reference named '" + name + "'");
}

/// Model factory by name, used by the command-line front end.
inline HamiltonianModel make_model(const std::string& name, const ParamMap& p) {
  auto get = [&](const char* key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
  };
  if (name == "direction") return make_qubit_direction(get("omega", 1.0));
  if (name == "xcomponent") return make_qubit_xcomponent(get("omega", 1.0));
  if (name == "nv") return make_nv_spin1(get("mu", 1.0), get("D", 1.44 * kPi), get("E", 5e-5 * kPi));
  if (name == "jc") return make_jaynes_cummings(get("kappa", 0.5), static_cast<int>(get("truncation", 8)));
  if (name == "field") return make_field_mode(static_cast<int>(get("truncation", 8)));
  fail(ErrorCode::ConfigError, "unknown model '" + name + "'");
}

}  // namespace qmet
