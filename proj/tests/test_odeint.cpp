#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sono/error.hpp"
#include "sono/odeint.hpp"

namespace sono {
namespace {

const Rhs kGrowth = [](ConstSpan z, double, MutSpan dz) {
  for (std::size_t i = 0; i < z.size(); ++i) dz[i] = z[i];
};
const Rhs kZero = [](ConstSpan, double, MutSpan dz) { std::fill(dz.begin(), dz.end(), 0.0); };
const Rhs kOscillator = [](ConstSpan z, double, MutSpan dz) {
  dz[0] = z[1];
  dz[1] = -z[0];
};

constexpr Method kAllMethods[] = {Method::Euler, Method::Rk4, Method::Ab4, Method::Abm4};

TEST(StackedRhs, ZeroFieldPassesVelocity) {
  const Mlp zero = Mlp::zeros(field_widths(2, 4));
  EXPECT_EQ(stacked_rhs(zero, Vector{1, 2, 3, 4}, 0.5), (Vector{3, 4, 0, 0}));
}

TEST(StackedRhs, NegativePositionField) {
  // S(x, v, t) = -x for d = 1
  const Mlp field({DenseLayer{Matrix(1, 3, {-1, 0, 0}), {0}}});
  EXPECT_EQ(stacked_rhs(field, Vector{1, 0}, 0.0), (Vector{0, -1}));
}

TEST(StackedRhs, FirstHalfIsVelocity) {
  Philox rng(3);
  const Mlp field = Mlp::glorot(field_widths(3, 5), rng);
  for (int i = 0; i < 20; ++i) {
    const Vector z = test::random_vector(rng, 6);
    const Vector dz = stacked_rhs(field, z, rng.uniform());
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(dz[k], z[3 + k]);
  }
}

TEST(Step, EulerOnGrowth) {
  EXPECT_NEAR(step(kGrowth, Vector{1.0}, 0.0, 0.1, Method::Euler)[0], 1.1, 1e-15);
}

TEST(Step, Rk4OnGrowthIsFourthOrderTaylor) {
  const double h = 0.1;
  const double taylor = 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
  EXPECT_NEAR(step(kGrowth, Vector{1.0}, 0.0, h, Method::Rk4)[0], taylor, 1e-15);
  EXPECT_NEAR(taylor, 1.10517083, 1e-8);
}

TEST(Step, ZeroFieldLeavesStateUnchanged) {
  const Vector z{0.3, -1.5, 2.0};
  for (Method m : kAllMethods) {
    RhsHistory history;
    for (int i = 0; i < 4; ++i) history.push(Vector(3, 0.0));
    EXPECT_EQ(step(kZero, z, 0.0, 0.25, m, &history), z) << method_name(m);
  }
}

TEST(Step, MultistepNeedsHistory) {
  RhsHistory history;
  history.push(Vector{1.0});
  for (Method m : {Method::Ab4, Method::Abm4}) {
    try {
      step(kGrowth, Vector{1.0}, 0.0, 0.1, m, &history);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
    }
    EXPECT_THROW(step(kGrowth, Vector{1.0}, 0.0, 0.1, m, nullptr), Error);
  }
}

TEST(Step, Ab4MatchesHandCoefficients) {
  // History of f = z at four points of an exact exponential.
  const double h = 0.1;
  RhsHistory history;
  for (int i = -3; i <= 0; ++i) history.push(Vector{std::exp(i * h)});
  const double expected =
      1.0 + h / 24 * (55 * 1.0 - 59 * std::exp(-h) + 37 * std::exp(-2 * h) - 9 * std::exp(-3 * h));
  const Vector next = step(kGrowth, Vector{1.0}, 0.0, h, Method::Ab4, &history);
  EXPECT_NEAR(next[0], expected, 1e-15);
  // The history now ends at f(z_next).
  EXPECT_EQ(history.at_lag(0)[0], next[0]);
  // Local truncation error 251/720 h^5 y^(5)
  EXPECT_NEAR(next[0], std::exp(h), 251.0 / 720.0 * std::pow(h, 5) * std::exp(h));
}

TEST(Integrate, HarmonicOscillatorQuarterPeriod) {
  const Vector z = integrate(kOscillator, Vector{1, 0}, {Method::Rk4, 100, 0.0, std::numbers::pi / 2});
  EXPECT_LE(std::abs(z[0]), 1e-8);
  EXPECT_LE(std::abs(z[1] + 1.0), 1e-8);
}

TEST(Integrate, ZeroFieldReturnsInitialState) {
  const Vector z0{1.0, -2.0, 0.5, 0.25};
  for (Method m : kAllMethods) EXPECT_EQ(integrate(kZero, z0, {m, 12, 0.0, 1.0}), z0);
}

TEST(Integrate, Rk4ErrorRatioNearSixteen) {
  const double e50 = std::abs(integrate(kGrowth, Vector{1}, {Method::Rk4, 50, 0, 1})[0] - std::numbers::e);
  const double e100 = std::abs(integrate(kGrowth, Vector{1}, {Method::Rk4, 100, 0, 1})[0] - std::numbers::e);
  EXPECT_NEAR(e50 / e100, 16.0, 16.0 * 0.3);
}

struct OrderCase {
  Method method;
  double lo, hi;
};

class ConvergenceOrder : public ::testing::TestWithParam<OrderCase> {};

TEST_P(ConvergenceOrder, WithinBand) {
  const auto [method, lo, hi] = GetParam();
  double prev = 0.0;
  for (int steps : {64, 128, 256}) {
    const double err =
        std::abs(integrate(kGrowth, Vector{1}, {method, steps, 0, 1})[0] - std::numbers::e);
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      EXPECT_GE(order, lo) << method_name(method) << " steps " << steps;
      EXPECT_LE(order, hi) << method_name(method) << " steps " << steps;
    }
    prev = err;
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, ConvergenceOrder,
                         ::testing::Values(OrderCase{Method::Euler, 0.8, 1.2},
                                           OrderCase{Method::Rk4, 3.5, 4.5},
                                           OrderCase{Method::Ab4, 3.5, 4.5},
                                           OrderCase{Method::Abm4, 3.5, 4.5}));

TEST(Integrate, TimeGridComposesForSingleStepMethods) {
  const Rhs forced = [](ConstSpan z, double t, MutSpan dz) {
    dz[0] = z[1];
    dz[1] = -std::sin(z[0]) + 0.3 * std::cos(2 * t);
  };
  const Vector z0{0.4, -0.2};
  for (Method m : {Method::Euler, Method::Rk4}) {
    for (int k : {5, 17, 50}) {
      const Vector whole = integrate(forced, z0, {m, 2 * k, 0.0, 2.0});
      const Vector half = integrate(forced, z0, {m, k, 0.0, 1.0});
      const Vector both = integrate(forced, half, {m, k, 1.0, 2.0});
      EXPECT_LE(test::max_abs_diff(whole, both), 1e-12) << method_name(m) << " k=" << k;
    }
  }
}

TEST(Integrate, Rk4OscillatorFullPeriodDrift) {
  const Vector z = integrate(kOscillator, Vector{1, 0}, {Method::Rk4, 1000, 0.0, 2 * std::numbers::pi});
  EXPECT_LE(std::abs(z[0] - 1.0), 1e-10);
}

TEST(Integrate, NonFiniteStateReportsStepIndex) {
  const Rhs blowup = [](ConstSpan z, double, MutSpan dz) { dz[0] = z[0] * z[0] * 1e200; };
  try {
    integrate(blowup, Vector{1.0}, {Method::Euler, 10, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteState);
    EXPECT_NE(std::string(e.what()).find("step 1 of 10"), std::string::npos) << e.what();
  }
}

TEST(SolverConfig, Validation) {
  EXPECT_THROW((SolverConfig{Method::Rk4, 0, 0, 1}).validate(), Error);
  EXPECT_THROW((SolverConfig{Method::Rk4, 1001, 0, 1}).validate(), Error);
  EXPECT_THROW((SolverConfig{Method::Ab4, 3, 0, 1}).validate(), Error);
  EXPECT_THROW((SolverConfig{Method::Rk4, 10, 1, 1}).validate(), Error);
  EXPECT_NO_THROW((SolverConfig{Method::Abm4, 4, 0, 1}).validate());
  EXPECT_NO_THROW((SolverConfig{Method::Euler, 1000, 0, 1}).validate());
  EXPECT_EQ(parse_method("abm4"), Method::Abm4);
  EXPECT_THROW(parse_method("rk45"), Error);
}

TEST(Integrate, BackwardSpanRetracesForward) {
  const Vector z0{0.7, 0.1};
  const Vector fwd = integrate_span(kOscillator, z0, 0.0, 1.0, 100, Method::Rk4);
  const Vector back = integrate_span(kOscillator, fwd, 1.0, 0.0, 100, Method::Rk4);
  EXPECT_LE(test::max_abs_diff(back, z0), 1e-9);
}

}  // namespace
}  // namespace sono
