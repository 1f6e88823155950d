#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "twochoice/bucket_table.hpp"

namespace twochoice {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Buckets as vertices, items as edges. Self-loops and parallel edges are
// allowed; an edge's index identifies its item.
class MultiGraph {
 public:
  explicit MultiGraph(std::size_t vertices, std::vector<Edge> edges = {});

  std::size_t vertex_count() const noexcept { return vertices_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  void add_edge(Edge e);

  friend bool operator==(const MultiGraph&, const MultiGraph&) = default;

 private:
  std::size_t vertices_;
  std::vector<Edge> edges_;
};

// toward_v[i] is true when edge i points at its v endpoint.
struct Orientation {
  std::vector<bool> toward_v;

  std::vector<std::size_t> in_degrees(const MultiGraph& g) const;
};

struct OrientedGraph {
  MultiGraph graph;
  Orientation orientation;
};

// One edge (b1, b2) per stored record, pointing at the bucket holding it.
OrientedGraph from_table(const BucketTable& table);

// Vertices of the k-core, ascending. A self-loop adds 2 to its vertex's degree.
std::vector<std::size_t> peel_k_core(const MultiGraph& g, std::size_t k);
// As above, but low-degree vertices are removed in the order given by `order`
// (a permutation of the vertices). The result does not depend on it.
std::vector<std::size_t> peel_k_core(const MultiGraph& g, std::size_t k,
                                     std::span<const std::size_t> order);

// Max flow on source -> edge (1) -> endpoints (1) -> sink (capacity). A
// self-loop uses one unit of its vertex. Empty when no orientation with every
// in-degree <= capacity exists.
std::optional<Orientation> orientation_feasible(const MultiGraph& g, std::size_t capacity);

// Exhaustive search over orientations; rejects graphs with more than 20 edges.
bool brute_force_feasible(const MultiGraph& g, std::size_t capacity);

// True iff some vertex subset induces more than `threshold` edges per vertex.
bool max_subgraph_density_exceeds(const MultiGraph& g, std::size_t threshold = 2);

bool orientation_respects(const MultiGraph& g, const Orientation& o, std::size_t capacity);

// Text format: "n m" on the first line, then m lines "u v".
MultiGraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const MultiGraph& g);

}  // namespace twochoice
