#pragma once

// Numerical differentiation in the parameter theta.
//
// Central differences D(h) = [f(theta+h) - f(theta-h)] / 2h have an error
// series in even powers of h, so halving h and eliminating the leading terms
// (Richardson extrapolation) gains two orders per level:
//
//   T[i][0] = D(h / 2^i)
//   T[i][k] = T[i][k-1] + (T[i][k-1] - T[i-1][k-1]) / (4^k - 1)
//
// The reported derivative is T[L][L]; T[L][L-1] is kept as the "lower" estimate
// so that any quantity derived from the derivative can report how much it moves
// between the last two rungs of the ladder.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qmet/errors.hpp"
#include "qmet/matcore.hpp"

namespace qmet {

enum class DiffMethod { Analytic, CentralFd, RichardsonFd };

inline std::string to_string(DiffMethod m) {
  switch (m) {
    case DiffMethod::Analytic: return "analytic";
    case DiffMethod::CentralFd: return "central-fd";
    case DiffMethod::RichardsonFd: return "richardson-fd";
  }
  return "unknown";
}

inline DiffMethod parse_diff_method(const std::string& s) {
  if (s == "analytic") return DiffMethod::Analytic;
  if (s == "central" || s == "central-fd") return DiffMethod::CentralFd;
  if (s == "richardson" || s == "richardson-fd") return DiffMethod::RichardsonFd;
  fail(ErrorCode::ConfigError, "unknown differentiation method '" + s + "'");
}

struct DiffSpec {
  DiffMethod method = DiffMethod::RichardsonFd;
  double step = 0.0;  // 0 selects 1e-4 * (1 + |theta|)
  int levels = 2;

  double base_step(double theta) const { return step > 0.0 ? step : 1e-4 * (1.0 + std::abs(theta)); }
};

/// Open interval (lo, hi).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

struct Stencil {
  double theta = 0.0;
  std::vector<double> steps;  // h_0 > h_1 > ...
  std::vector<double> nodes;  // theta + h_0, theta - h_0, theta + h_1, theta - h_1, ...
};

template <class T>
struct DiffResult {
  T derivative;
  T lower;
  double step = 0.0;
  double error = 0.0;  // max|derivative - lower|
};

inline Stencil make_stencil(double theta, const DiffSpec& spec, const Interval& domain = {}) {
  require(spec.method != DiffMethod::Analytic, ErrorCode::InvalidParameter, "analytic differentiation has no stencil");
  require(spec.levels >= 0 && spec.levels <= 8, ErrorCode::InvalidParameter, "extrapolation levels must lie in [0, 8]");
  const double h = spec.base_step(theta);
  require(std::isfinite(h) && h > 0.0, ErrorCode::InvalidParameter, "differentiation step must be positive");
  if (!domain.contains(theta - h) || !domain.contains(theta + h))
    fail(ErrorCode::DomainBoundary, "theta = " + std::to_string(theta) + " +/- " + std::to_string(h) + " leaves the parameter domain");
  Stencil s;
  s.theta = theta;
  const int rungs = spec.method == DiffMethod::CentralFd ? 2 : spec.levels + 1;
  for (int i = 0; i < rungs; ++i) {
    const double hi = h / std::pow(2.0, i);
    s.steps.push_back(hi);
    s.nodes.push_back(theta + hi);
    s.nodes.push_back(theta - hi);
  }
  return s;
}

/// Combine function values at the stencil nodes into a derivative.
/// CentralFd reports D(h) with the error estimate 4/3 |D(h) - D(h/2)|.
template <class T>
DiffResult<T> combine(const Stencil& s, const std::vector<T>& values, DiffMethod method) {
  const std::size_t rungs = s.steps.size();
  require(values.size() == 2 * rungs, ErrorCode::DimensionMismatch, "stencil/value count mismatch");
  std::vector<T> central;
  central.reserve(rungs);
  for (std::size_t i = 0; i < rungs; ++i) central.push_back((values[2 * i] - values[2 * i + 1]) / (2.0 * s.steps[i]));

  DiffResult<T> r{central[0], central[0], s.steps[0], 0.0};
  if (method == DiffMethod::CentralFd) {
    r.lower = central[1];
    r.error = 4.0 / 3.0 * max_abs(central[0] - central[1]);
    return r;
  }
  std::vector<T> row = central;  // row[i] holds T[i][k] for the current k
  T prev_diag = row[0];
  for (std::size_t k = 1; k < rungs; ++k) {
    const double factor = std::pow(4.0, static_cast<double>(k)) - 1.0;
    std::vector<T> next;
    for (std::size_t i = k; i < rungs; ++i) next.push_back(row[i - k + 1] + (row[i - k + 1] - row[i - k]) / factor);
    prev_diag = row.back();
    row = std::move(next);
  }
  r.derivative = row.back();
  r.lower = rungs > 1 ? prev_diag : row.back();
  r.error = max_abs(r.derivative - r.lower);
  return r;
}

template <class F>
auto differentiate(F&& f, double theta, const DiffSpec& spec, const Interval& domain = {})
    -> DiffResult<decltype(f(theta))> {
  using T = decltype(f(theta));
  const Stencil s = make_stencil(theta, spec, domain);
  std::vector<T> values;
  values.reserve(s.nodes.size());
  for (double x : s.nodes) values.push_back(f(x));
  return combine(s, values, spec.method);
}

}  // namespace qmet
