#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <variant>

namespace twochoice {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

// Backward breadth-first search for the nearest bucket with a free slot.
struct BfsPolicy {
  std::size_t max_nodes = kUnbounded;
  std::size_t max_depth = kUnbounded;

  // ceil(log2 log2 n) + 4 levels and 32 * ceil(log2 n) nodes.
  static BfsPolicy defaults_for(std::size_t buckets);
  static BfsPolicy unbounded() { return {}; }

  friend bool operator==(const BfsPolicy&, const BfsPolicy&) = default;
};

// Explore everything within `depth` levels and take the least-loaded bucket.
struct DepthLimitedPolicy {
  std::size_t depth = 0;
  std::size_t max_nodes = kUnbounded;

  friend bool operator==(const DepthLimitedPolicy&, const DepthLimitedPolicy&) = default;
};

// Evict a uniformly chosen victim and keep walking, at most `max_steps` evictions.
struct RandomWalkPolicy {
  std::size_t max_steps = 0;

  friend bool operator==(const RandomWalkPolicy&, const RandomWalkPolicy&) = default;
};

// Less-loaded candidate, no moves. Same as DepthLimitedPolicy{0}.
struct GreedyPolicy {
  friend bool operator==(const GreedyPolicy&, const GreedyPolicy&) = default;
};

using InsertPolicy = std::variant<BfsPolicy, DepthLimitedPolicy, RandomWalkPolicy, GreedyPolicy>;

// Throws std::invalid_argument when a field is out of range.
void validate(const InsertPolicy& policy);

// "bfs", "bfs:inf", "bfs:<depth>:<nodes>", "depth:<h>", "walk:<steps>", "greedy".
// `buckets` resolves the n-dependent BFS defaults.
InsertPolicy parse_policy(const std::string& text, std::size_t buckets);
std::string to_string(const InsertPolicy& policy);

}  // namespace twochoice
