#include "twochoice/graph_oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace twochoice {

MultiGraph::MultiGraph(std::size_t vertices, std::vector<Edge> edges)
    : vertices_(vertices), edges_() {
  edges_.reserve(edges.size());
  for (const Edge& e : edges) add_edge(e);
}

void MultiGraph::add_edge(Edge e) {
  if (e.u >= vertices_ || e.v >= vertices_) {
    throw std::invalid_argument("edge endpoint outside the vertex range");
  }
  edges_.push_back(e);
}

std::vector<std::size_t> Orientation::in_degrees(const MultiGraph& g) const {
  if (toward_v.size() != g.edge_count()) {
    throw std::invalid_argument("orientation does not match the graph's edge count");
  }
  std::vector<std::size_t> degree(g.vertex_count(), 0);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ++degree[toward_v[i] ? edges[i].v : edges[i].u];
  }
  return degree;
}

bool orientation_respects(const MultiGraph& g, const Orientation& o, std::size_t capacity) {
  if (o.toward_v.size() != g.edge_count()) return false;
  const auto degree = o.in_degrees(g);
  return std::all_of(degree.begin(), degree.end(), [&](std::size_t d) { return d <= capacity; });
}

OrientedGraph from_table(const BucketTable& table) {
  OrientedGraph out{MultiGraph(table.bucket_count()), Orientation{}};
  for (std::size_t b = 0; b < table.bucket_count(); ++b) {
    for (const ItemRecord& record : table.bucket(b)) {
      out.graph.add_edge({record.pair.first, record.pair.second});
      out.orientation.toward_v.push_back(!record.pair.is_self_loop() && record.pair.second == b);
    }
  }
  return out;
}

// --- k-core -----------------------------------------------------------------

std::vector<std::size_t> peel_k_core(const MultiGraph& g, std::size_t k,
                                     std::span<const std::size_t> order) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t n = g.vertex_count();
  if (order.size() != n) throw std::invalid_argument("peel order must list every vertex");

  std::vector<std::size_t> degree(n, 0);
  std::vector<std::vector<std::size_t>> incident(n);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    degree[edges[i].u] += 1;
    degree[edges[i].v] += 1;
    incident[edges[i].u].push_back(i);
    if (edges[i].v != edges[i].u) incident[edges[i].v].push_back(i);
  }

  std::vector<bool> queued(n, false);
  std::vector<bool> edge_gone(edges.size(), false);
  std::vector<bool> listed(n, false);
  std::vector<std::size_t> pending;
  for (std::size_t x : order) {
    if (x >= n || listed[x]) throw std::invalid_argument("peel order must be a permutation");
    listed[x] = true;
    if (degree[x] < k) {
      queued[x] = true;
      pending.push_back(x);
    }
  }
  for (std::size_t head = 0; head < pending.size(); ++head) {
    const std::size_t x = pending[head];
    for (std::size_t e : incident[x]) {
      if (edge_gone[e]) continue;
      edge_gone[e] = true;
      const std::size_t other = edges[e].u == x ? edges[e].v : edges[e].u;
      if (other == x) continue;
      --degree[other];
      if (!queued[other] && degree[other] < k) {
        queued[other] = true;
        pending.push_back(other);
      }
    }
  }

  std::vector<std::size_t> core;
  for (std::size_t x = 0; x < n; ++x) {
    if (!queued[x]) core.push_back(x);
  }
  return core;
}

std::vector<std::size_t> peel_k_core(const MultiGraph& g, std::size_t k) {
  std::vector<std::size_t> order(g.vertex_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return peel_k_core(g, k, order);
}

// --- max flow ---------------------------------------------------------------

namespace {

// Dinic's algorithm with an iterative blocking-flow search.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adjacency_(nodes) {}

  // Returns the arc's index within adjacency_[from].
  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
    adjacency_[from].push_back({to, adjacency_[to].size(), capacity});
    adjacency_[to].push_back({from, adjacency_[from].size() - 1, 0});
    return adjacency_[from].size() - 1;
  }

  std::int64_t residual(std::size_t from, std::size_t arc) const {
    return adjacency_[from][arc].capacity;
  }

  std::int64_t max_flow(std::size_t source, std::size_t sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      while (std::int64_t pushed = augment(source, sink)) total += pushed;
    }
    return total;
  }

 private:
  struct Arc {
    std::size_t to;
    std::size_t reverse;
    std::int64_t capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    level_.assign(adjacency_.size(), -1);
    cursor_.assign(adjacency_.size(), 0);
    std::vector<std::size_t> queue{source};
    level_[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      for (const Arc& a : adjacency_[u]) {
        if (a.capacity > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          queue.push_back(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  // Finds one source-sink path in the level graph and saturates it.
  std::int64_t augment(std::size_t source, std::size_t sink) {
    std::vector<std::size_t> path_nodes;
    std::size_t u = source;
    while (u != sink) {
      auto& arcs = adjacency_[u];
      std::size_t& at = cursor_[u];
      while (at < arcs.size() &&
             (arcs[at].capacity <= 0 || level_[arcs[at].to] != level_[u] + 1)) {
        ++at;
      }
      if (at == arcs.size()) {
        if (u == source) return 0;
        level_[u] = -1;
        u = path_nodes.back();
        path_nodes.pop_back();
        ++cursor_[u];
        continue;
      }
      path_nodes.push_back(u);
      u = arcs[at].to;
    }

    std::int64_t bottleneck = std::numeric_limits<std::int64_t>::max();
    for (std::size_t x : path_nodes) {
      bottleneck = std::min(bottleneck, adjacency_[x][cursor_[x]].capacity);
    }
    for (std::size_t x : path_nodes) {
      Arc& a = adjacency_[x][cursor_[x]];
      a.capacity -= bottleneck;
      adjacency_[a.to][a.reverse].capacity += bottleneck;
    }
    return bottleneck;
  }

  std::vector<std::vector<Arc>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

bool brute_force_assign(std::span<const Edge> edges, std::size_t next,
                        std::vector<std::size_t>& degree, std::size_t capacity) {
  if (next == edges.size()) return true;
  for (std::size_t endpoint : {edges[next].u, edges[next].v}) {
    if (degree[endpoint] < capacity) {
      ++degree[endpoint];
      const bool ok = brute_force_assign(edges, next + 1, degree, capacity);
      --degree[endpoint];
      if (ok) return true;
    }
    if (edges[next].u == edges[next].v) break;
  }
  return false;
}

}  // namespace

std::optional<Orientation> orientation_feasible(const MultiGraph& g, std::size_t capacity) {
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  const std::size_t m = g.edge_count();
  const std::size_t n = g.vertex_count();
  const std::size_t source = 0;
  const std::size_t sink = m + n + 1;
  auto edge_node = [](std::size_t i) { return 1 + i; };
  auto vertex_node = [m](std::size_t x) { return 1 + m + x; };

  FlowNetwork network(m + n + 2);
  std::vector<std::size_t> arc_to_v(m);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < m; ++i) {
    network.add_arc(source, edge_node(i), 1);
    network.add_arc(edge_node(i), vertex_node(edges[i].u), 1);
    arc_to_v[i] = edges[i].v == edges[i].u
                      ? std::numeric_limits<std::size_t>::max()
                      : network.add_arc(edge_node(i), vertex_node(edges[i].v), 1);
  }
  for (std::size_t x = 0; x < n; ++x) {
    network.add_arc(vertex_node(x), sink, static_cast<std::int64_t>(capacity));
  }

  if (network.max_flow(source, sink) != static_cast<std::int64_t>(m)) return std::nullopt;

  Orientation orientation;
  orientation.toward_v.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    orientation.toward_v[i] = arc_to_v[i] != std::numeric_limits<std::size_t>::max() &&
                              network.residual(edge_node(i), arc_to_v[i]) == 0;
  }
  return orientation;
}

bool brute_force_feasible(const MultiGraph& g, std::size_t capacity) {
  if (g.edge_count() > 20) throw std::invalid_argument("brute force limited to 20 edges");
  std::vector<std::size_t> degree(g.vertex_count(), 0);
  return brute_force_assign(g.edges(), 0, degree, capacity);
}

bool max_subgraph_density_exceeds(const MultiGraph& g, std::size_t threshold) {
  if (threshold == 0) return g.edge_count() > 0;
  return !orientation_feasible(g, threshold).has_value();
}

// --- text format ------------------------------------------------------------

MultiGraph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("edge list: missing \"n m\" header");
  MultiGraph g(n);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v)) {
      throw std::runtime_error("edge list: expected " + std::to_string(m) + " edges, got " +
                               std::to_string(i));
    }
    g.add_edge(e);
  }
  return g;
}

void write_edge_list(std::ostream& out, const MultiGraph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace twochoice
