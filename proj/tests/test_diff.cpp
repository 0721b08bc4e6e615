#include <gtest/gtest.h>

#include <cmath>

#include "qmet/diff.hpp"

using namespace qmet;

TEST(Diff, RichardsonOnSine) {
  const auto r = differentiate([](double x) { return std::sin(x); }, 0.8, DiffSpec{});
  EXPECT_NEAR(r.derivative, std::cos(0.8), 1e-10);
  EXPECT_LT(r.error, 1e-9);
  EXPECT_NEAR(r.step, 1e-4 * 1.8, 1e-18);
}

TEST(Diff, CentralHasSecondOrderError) {
  DiffSpec spec{DiffMethod::CentralFd, 1e-2, 0};
  const auto r = differentiate([](double x) { return std::exp(x); }, 0.0, spec);
  EXPECT_NEAR(r.derivative, 1.0 + 1e-4 / 6.0, 1e-9);
  // 4/3 |D(h) - D(h/2)| estimates the error of D(h).
  EXPECT_NEAR(r.error, 1e-4 / 6.0, 1e-7);
}

TEST(Diff, LevelsImproveAccuracy) {
  auto f = [](double x) { return std::exp(3.0 * x); };
  double previous = 1.0;
  for (int levels = 0; levels <= 3; ++levels) {
    const auto r = differentiate(f, 0.2, DiffSpec{DiffMethod::RichardsonFd, 0.05, levels});
    const double err = std::abs(r.derivative - 3.0 * std::exp(0.6));
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(Diff, DomainBoundary) {
  try {
    differentiate([](double x) { return x; }, 1e-5, DiffSpec{}, Interval{0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainBoundary);
  }
}

TEST(Diff, MethodNames) {
  EXPECT_EQ(parse_diff_method("central"), DiffMethod::CentralFd);
  EXPECT_EQ(parse_diff_method("richardson-fd"), DiffMethod::RichardsonFd);
  EXPECT_EQ(parse_diff_method("analytic"), DiffMethod::Analytic);
  EXPECT_THROW(parse_diff_method("spline"), Error);
}
