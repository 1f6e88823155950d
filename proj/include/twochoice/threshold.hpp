#pragma once

#include <cstddef>
#include <vector>

namespace twochoice {

// Probability that a depth-(i+1) complete binary tree embeds in the
// Poisson(s) branching process, given p for depth i:
//   1 - e^{-ps} (1 + ps) = P[Poisson(ps) >= 2].
// Throws std::domain_error unless p in [0, 1] and s > 0.
double recurrence_step(double p, double s);

enum class Termination { target_reached, max_iters, converged_nonzero };

const char* to_string(Termination t);

struct RecurrenceTrace {
  double s = 0.0;
  std::vector<double> p;  // p[0] is the starting value
  Termination terminated_by = Termination::max_iters;
};

struct RecurrenceOptions {
  double p0 = 1.0;
  double target = 1e-9;
  std::size_t max_iters = 10000;
  double stall_tolerance = 1e-12;
};

// Iterates until p < target, until p stalls above the target, or max_iters.
RecurrenceTrace iterate_recurrence(double s, const RecurrenceOptions& options = {});

// Number of steps from p0 = 1 until p drops below `threshold`; max_iters if never.
std::size_t iterations_to_fall_below(double s, double threshold, std::size_t max_iters = 10000);

// After 10^4 steps from p0 = 1 the sequence is at most 10^-3.
bool decays_to_zero(double s);

struct PositivityResult {
  bool positive = false;
  double argmin = 0.0;
  double min_value = 0.0;
};

// f(x) = 1 + xs - e^{xs} (1 - x), sampled on x = i / grid_points, i = 1..grid_points.
double positivity_function(double x, double s);
PositivityResult positivity_scan(double s, std::size_t grid_points = 100000);

// Bisects the average degree at which the recurrence stops decaying.
// Throws std::invalid_argument if [lo, hi] does not bracket the change.
double threshold_bisect(double lo = 3.0, double hi = 4.0, double tol = 1e-3);

}  // namespace twochoice
