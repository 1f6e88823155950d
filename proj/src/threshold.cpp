#include "twochoice/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twochoice {

namespace {

// e^{-x} * sum_{k>=2} x^k / k!, accurate where 1 - e^{-x}(1+x) cancels.
double poisson_tail_two(double x) {
  if (x >= 0.5) return 1.0 - std::exp(-x) * (1.0 + x);
  double term = x * x / 2.0;
  double sum = 0.0;
  for (int k = 2; k < 40 && term > sum * 1e-18; ++k) {
    sum += term;
    term *= x / (k + 1);
  }
  return std::exp(-x) * sum;
}

}  // namespace

double recurrence_step(double p, double s) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0, 1]");
  if (!(s > 0.0)) throw std::domain_error("s must be positive");
  return std::clamp(poisson_tail_two(p * s), 0.0, 1.0);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::target_reached: return "target_reached";
    case Termination::max_iters: return "max_iters";
    case Termination::converged_nonzero: return "converged_nonzero";
  }
  return "unknown";
}

RecurrenceTrace iterate_recurrence(double s, const RecurrenceOptions& options) {
  RecurrenceTrace trace;
  trace.s = s;
  trace.p.push_back(options.p0);
  if (options.p0 < options.target) {
    trace.terminated_by = Termination::target_reached;
    return trace;
  }
  for (std::size_t i = 0; i < options.max_iters; ++i) {
    const double prev = trace.p.back();
    const double next = recurrence_step(prev, s);
    trace.p.push_back(next);
    if (next < options.target) {
      trace.terminated_by = Termination::target_reached;
      return trace;
    }
    if (std::abs(next - prev) < options.stall_tolerance) {
      trace.terminated_by = Termination::converged_nonzero;
      return trace;
    }
  }
  trace.terminated_by = Termination::max_iters;
  return trace;
}

std::size_t iterations_to_fall_below(double s, double threshold, std::size_t max_iters) {
  double p = 1.0;
  for (std::size_t i = 0; i < max_iters; ++i) {
    if (p < threshold) return i;
    p = recurrence_step(p, s);
  }
  return max_iters;
}

bool decays_to_zero(double s) {
  double p = 1.0;
  for (int i = 0; i < 10000 && p > 1e-3; ++i) p = recurrence_step(p, s);
  return p <= 1e-3;
}

double positivity_function(double x, double s) {
  return 1.0 + x * s - std::exp(x * s) * (1.0 - x);
}

PositivityResult positivity_scan(double s, std::size_t grid_points) {
  if (!(s > 0.0)) throw std::domain_error("s must be positive");
  if (grid_points < 1000) throw std::invalid_argument("positivity scan needs >= 1000 points");
  PositivityResult result;
  result.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= grid_points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_points);
    const double f = positivity_function(x, s);
    if (f < result.min_value) {
      result.min_value = f;
      result.argmin = x;
    }
  }
  result.positive = result.min_value > 0.0;
  return result;
}

double threshold_bisect(double lo, double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("need lo < hi and tol > 0");
  if (!decays_to_zero(lo) || decays_to_zero(hi)) {
    throw std::invalid_argument("bisection endpoints do not bracket the threshold");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (decays_to_zero(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace twochoice
