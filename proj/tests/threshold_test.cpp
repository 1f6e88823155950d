#include <gtest/gtest.h>

#include <cmath>

#include "twochoice/threshold.hpp"

namespace twochoice {
namespace {

// Independent route to the nonzero fixed point: bisection on step(p) - p,
// which is positive just above 0.5 and negative at 1 for s = 3.5.
double largest_fixed_point(double s) {
  double lo = 0.5;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = 1.0 - std::exp(-mid * s) * (1.0 + mid * s) - mid;
    (g > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(RecurrenceStep, ZeroIsFixed) {
  for (double s : {0.1, 1.0, 3.35, 10.0}) EXPECT_EQ(recurrence_step(0.0, s), 0.0);
}

TEST(RecurrenceStep, ClosedFormAtOne) {
  // 1 - e^{-3.35} * 4.35
  EXPECT_NEAR(recurrence_step(1.0, 3.35), 0.8473830596613241, 1e-12);
  EXPECT_NEAR(recurrence_step(1.0, 3.35), 0.8474, 5e-5);
}

TEST(RecurrenceStep, SmallArgumentsStayAccurate) {
  // P[Poisson(x) >= 2] ~ x^2/2 - x^3/3 for tiny x.
  for (double x : {1e-3, 1e-6, 1e-10, 1e-15}) {
    const double expected = x * x / 2.0 - x * x * x / 3.0;
    EXPECT_NEAR(recurrence_step(x, 1.0) / expected, 1.0, 1e-6) << x;
  }
  // Either side of the series/closed-form switch agrees.
  EXPECT_NEAR(recurrence_step(0.5 - 1e-12, 1.0), recurrence_step(0.5, 1.0), 1e-11);
}

TEST(RecurrenceStep, MonotoneInP) {
  for (double s : {0.5, 2.0, 3.35, 3.5, 4.0}) {
    double prev = recurrence_step(0.0, s);
    for (int i = 1; i <= 10000; ++i) {
      const double next = recurrence_step(i / 10000.0, s);
      ASSERT_GE(next, prev) << "s=" << s << " i=" << i;
      prev = next;
    }
  }
}

TEST(RecurrenceStep, DomainErrors) {
  EXPECT_THROW(recurrence_step(-0.1, 1.0), std::domain_error);
  EXPECT_THROW(recurrence_step(1.1, 1.0), std::domain_error);
  EXPECT_THROW(recurrence_step(0.5, 0.0), std::domain_error);
  EXPECT_THROW(recurrence_step(std::nan(""), 1.0), std::domain_error);
}

TEST(IterateRecurrence, DecaysBelowThreshold) {
  const RecurrenceTrace trace = iterate_recurrence(2.0, {.target = 1e-9});
  EXPECT_EQ(trace.terminated_by, Termination::target_reached);
  EXPECT_EQ(trace.p.front(), 1.0);
  EXPECT_LT(trace.p.back(), 1e-9);
  for (std::size_t i = 1; i < trace.p.size(); ++i) EXPECT_LT(trace.p[i], trace.p[i - 1]);
}

TEST(IterateRecurrence, ConvergesNonzeroAboveThreshold) {
  const RecurrenceTrace trace = iterate_recurrence(3.5, {.target = 1e-9});
  EXPECT_EQ(trace.terminated_by, Termination::converged_nonzero);
  EXPECT_NEAR(trace.p.back(), largest_fixed_point(3.5), 1e-9);
  EXPECT_NEAR(trace.p.back(), 0.7085792874204655, 1e-9);
  EXPECT_GT(trace.p.back(), 0.5);
  EXPECT_LT(trace.p.back(), 0.8);
}

TEST(IterateRecurrence, HonoursMaxIters) {
  const RecurrenceTrace trace = iterate_recurrence(3.3, {.target = 1e-30, .max_iters = 5});
  EXPECT_EQ(trace.terminated_by, Termination::max_iters);
  EXPECT_EQ(trace.p.size(), 6u);
}

TEST(IterateRecurrence, TraceStaysInUnitInterval) {
  for (double s = 0.1; s <= 4.0; s += 0.1) {
    for (double p : iterate_recurrence(s).p) {
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
    }
  }
}

TEST(IterateRecurrence, DoublyExponentialCounts) {
  // Steps from p = 1 to below 1/n at s = 3.3, from a 60-digit evaluation of the
  // closed form: n = 2^8, 2^16, 2^32, 2^64.
  EXPECT_EQ(iterations_to_fall_below(3.3, std::ldexp(1.0, -8)), 39u);
  EXPECT_EQ(iterations_to_fall_below(3.3, std::ldexp(1.0, -16)), 40u);
  EXPECT_EQ(iterations_to_fall_below(3.3, std::ldexp(1.0, -32)), 41u);
  EXPECT_EQ(iterations_to_fall_below(3.3, std::ldexp(1.0, -64)), 42u);
}

TEST(IterateRecurrence, QuadraticRegime) {
  for (double s : {1.0, 2.0, 3.0, 3.3, 3.35}) {
    const RecurrenceTrace trace = iterate_recurrence(s, {.target = 1e-300, .max_iters = 100000});
    for (std::size_t i = 0; i + 1 < trace.p.size(); ++i) {
      const double p = trace.p[i];
      if (p >= 1.0 / (10.0 * s)) continue;
      ASSERT_LE(trace.p[i + 1], (p * s) * (p * s) * (1.0 + 1e-6)) << "s=" << s << " i=" << i;
    }
  }
}

TEST(PositivityScan, PositiveAtThreshold) {
  const PositivityResult at = positivity_scan(3.35);
  EXPECT_TRUE(at.positive);
  EXPECT_GT(at.min_value, 0.0);
  EXPECT_TRUE(positivity_scan(1.0).positive);
}

TEST(PositivityScan, ViolatedAbove) {
  const PositivityResult above = positivity_scan(3.5);
  EXPECT_FALSE(above.positive);
  EXPECT_GT(above.argmin, 0.0);
  EXPECT_LT(above.argmin, 1.0);
  EXPECT_LE(positivity_function(above.argmin, 3.5), 0.0);
}

TEST(PositivityScan, RejectsCoarseGrids) {
  EXPECT_THROW(positivity_scan(3.0, 999), std::invalid_argument);
  EXPECT_THROW(positivity_scan(-1.0), std::domain_error);
}

TEST(PositivityScan, MatchesDecayOnWideGrid) {
  for (int i = 1; i <= 40; ++i) {
    const double s = 0.1 * i;
    EXPECT_EQ(positivity_scan(s).positive, decays_to_zero(s)) << s;
  }
}

TEST(ThresholdBisect, DefaultBracket) {
  const double s = threshold_bisect();
  EXPECT_GE(s, 3.35);
  EXPECT_LE(s, 3.36);
  EXPECT_TRUE(decays_to_zero(s - 1e-3));
  EXPECT_FALSE(decays_to_zero(s + 1e-3));
}

TEST(ThresholdBisect, StableUnderRefinement) {
  const double coarse = threshold_bisect(3.0, 4.0, 1e-3);
  const double fine = threshold_bisect(3.0, 4.0, 1e-6);
  EXPECT_NEAR(coarse, fine, 1e-3);
}

TEST(ThresholdBisect, FarBelowAlwaysDecays) {
  for (double s = 0.05; s <= 1.0; s += 0.05) EXPECT_TRUE(decays_to_zero(s));
}

TEST(ThresholdBisect, ScanImpliesDecay) {
  for (int i = 0; i <= 40; ++i) {
    const double s = 3.0 + 0.01 * i;
    if (positivity_scan(s).positive) {
      EXPECT_EQ(iterate_recurrence(s).terminated_by, Termination::target_reached) << s;
    }
  }
}

TEST(ThresholdBisect, RejectsNonBracketingInput) {
  EXPECT_THROW(threshold_bisect(3.5, 4.0), std::invalid_argument);
  EXPECT_THROW(threshold_bisect(1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(threshold_bisect(4.0, 3.0), std::invalid_argument);
}

}  // namespace
}  // namespace twochoice
