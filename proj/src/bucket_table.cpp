#include "twochoice/bucket_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace twochoice {

namespace {

std::size_t ceil_log2(std::size_t x) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < x) ++bits;
  return bits;
}

struct SearchNode {
  std::size_t bucket;
  std::size_t depth;
  std::size_t parent;  // index into the node list; self for a start node
  std::size_t parent_slot;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t parse_count(const std::string& text) {
  if (text == "inf") return kUnbounded;
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("bad count in policy: " + text);
  return value;
}

std::string format_count(std::size_t value) {
  return value == kUnbounded ? std::string("inf") : std::to_string(value);
}

}  // namespace

// --- policies ---------------------------------------------------------------

BfsPolicy BfsPolicy::defaults_for(std::size_t buckets) {
  const std::size_t log_n = std::max<std::size_t>(1, ceil_log2(buckets));
  const auto loglog = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(log_n))));
  return BfsPolicy{32 * log_n, loglog + 4};
}

void validate(const InsertPolicy& policy) {
  if (const auto* bfs = std::get_if<BfsPolicy>(&policy)) {
    if (bfs->max_nodes < 1) throw std::invalid_argument("bfs policy needs max_nodes >= 1");
  }
  if (const auto* limited = std::get_if<DepthLimitedPolicy>(&policy)) {
    if (limited->max_nodes < 1) throw std::invalid_argument("depth policy needs max_nodes >= 1");
  }
}

InsertPolicy parse_policy(const std::string& text, std::size_t buckets) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("empty policy");

  const std::string& name = parts[0];
  InsertPolicy policy;
  if (name == "bfs") {
    if (parts.size() == 1) {
      policy = BfsPolicy::defaults_for(buckets);
    } else if (parts.size() == 2 && parts[1] == "inf") {
      policy = BfsPolicy::unbounded();
    } else if (parts.size() == 3) {
      policy = BfsPolicy{parse_count(parts[2]), parse_count(parts[1])};
    } else {
      throw std::invalid_argument("bfs policy expects bfs, bfs:inf or bfs:<depth>:<nodes>");
    }
  } else if (name == "depth" && (parts.size() == 2 || parts.size() == 3)) {
    DepthLimitedPolicy limited{parse_count(parts[1])};
    if (parts.size() == 3) limited.max_nodes = parse_count(parts[2]);
    policy = limited;
  } else if (name == "walk" && parts.size() == 2) {
    policy = RandomWalkPolicy{parse_count(parts[1])};
  } else if (name == "greedy" && parts.size() == 1) {
    policy = GreedyPolicy{};
  } else {
    throw std::invalid_argument("unknown policy: " + text);
  }
  validate(policy);
  return policy;
}

std::string to_string(const InsertPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const BfsPolicy& p) {
            if (p == BfsPolicy::unbounded()) return std::string("bfs:inf");
            return "bfs:" + format_count(p.max_depth) + ":" + format_count(p.max_nodes);
          },
          [](const DepthLimitedPolicy& p) {
            std::string out = "depth:" + format_count(p.depth);
            if (p.max_nodes != kUnbounded) out += ":" + format_count(p.max_nodes);
            return out;
          },
          [](const RandomWalkPolicy& p) { return "walk:" + format_count(p.max_steps); },
          [](const GreedyPolicy&) { return std::string("greedy"); },
      },
      policy);
}

const char* to_string(InsertOutcome outcome) {
  switch (outcome) {
    case InsertOutcome::placed: return "placed";
    case InsertOutcome::table_full_failure: return "table_full_failure";
    case InsertOutcome::duplicate_key_updated: return "duplicate_key_updated";
  }
  return "unknown";
}

// --- scripted hashing -------------------------------------------------------

std::string scripted_key(std::uint64_t id, BucketPair pair) {
  return std::to_string(id) + "/" + std::to_string(pair.first) + "/" + std::to_string(pair.second);
}

PairHasher scripted_hasher() {
  return [](std::string_view key, std::size_t buckets) {
    const auto first_sep = key.find('/');
    const auto second_sep = key.find('/', first_sep + 1);
    if (first_sep == std::string_view::npos || second_sep == std::string_view::npos) {
      throw std::invalid_argument("not a scripted key: " + std::string(key));
    }
    auto read = [&](std::size_t from, std::size_t to) {
      std::size_t value = 0;
      auto [ptr, ec] = std::from_chars(key.data() + from, key.data() + to, value);
      if (ec != std::errc{} || ptr != key.data() + to) {
        throw std::invalid_argument("not a scripted key: " + std::string(key));
      }
      return value;
    };
    BucketPair pair{read(first_sep + 1, second_sep), read(second_sep + 1, key.size())};
    if (pair.first >= buckets || pair.second >= buckets) {
      throw std::invalid_argument("scripted key out of range: " + std::string(key));
    }
    return pair;
  };
}

// --- table ------------------------------------------------------------------

BucketTable::BucketTable(TableConfig config, PairHasher hasher)
    : capacity_(config.capacity),
      seeds_(config.seeds),
      hasher_(std::move(hasher)),
      buckets_(config.buckets),
      walk_rng_(config.seeds.first ^ (config.seeds.second * 0x9e3779b97f4a7c15ULL)) {
  if (config.buckets < 1) throw std::invalid_argument("bucket count must be >= 1");
  if (config.capacity < 1) throw std::invalid_argument("bucket capacity must be >= 1");
}

BucketPair BucketTable::pair_for(std::string_view key) const {
  if (hasher_) return hasher_(key, buckets_.size());
  return hash_pair(key, seeds_, buckets_.size());
}

std::optional<std::size_t> BucketTable::find_slot(std::size_t bucket, std::string_view key) const {
  const auto& records = buckets_[bucket];
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].key == key) return i;
  }
  return std::nullopt;
}

std::optional<std::string> BucketTable::lookup(std::string_view key, LookupStats* stats) const {
  const BucketPair pair = pair_for(key);
  // Both buckets are always read, as a memory-parallel lookup would.
  const auto in_first = find_slot(pair.first, key);
  if (stats) ++stats->bucket_reads;
  std::optional<std::size_t> in_second;
  if (!pair.is_self_loop()) {
    in_second = find_slot(pair.second, key);
    if (stats) ++stats->bucket_reads;
  }
  if (in_first) return buckets_[pair.first][*in_first].value;
  if (in_second) return buckets_[pair.second][*in_second].value;
  return std::nullopt;
}

InsertReceipt BucketTable::insert(std::string key, std::string value, const InsertPolicy& policy) {
  validate(policy);
  const BucketPair pair = pair_for(key);
  for (std::size_t bucket : {pair.first, pair.second}) {
    if (auto slot = find_slot(bucket, key)) {
      buckets_[bucket][*slot].value = std::move(value);
      return InsertReceipt{InsertOutcome::duplicate_key_updated};
    }
  }

  ItemRecord record{std::move(key), std::move(value), pair};
  return std::visit(
      Overloaded{
          [&](const BfsPolicy& p) {
            return place_via_search(std::move(record),
                                    find_eviction_path_bfs(pair.first, pair.second, p.max_depth,
                                                           p.max_nodes));
          },
          [&](const DepthLimitedPolicy& p) {
            return place_via_search(std::move(record),
                                    find_min_load_path(pair.first, pair.second, p.depth,
                                                       p.max_nodes));
          },
          [&](const GreedyPolicy&) {
            return place_via_search(std::move(record),
                                    find_min_load_path(pair.first, pair.second, 0, kUnbounded));
          },
          [&](const RandomWalkPolicy& p) {
            return insert_random_walk(std::move(record), p.max_steps);
          },
      },
      policy);
}

InsertReceipt BucketTable::place_via_search(ItemRecord record, const SearchResult& search) {
  InsertReceipt receipt;
  receipt.nodes_explored = search.stats.nodes_explored;
  receipt.depth = search.stats.depth;
  receipt.cycle_edges_seen = search.stats.cycle_edges_seen;
  receipt.stuck = search.stats.stuck;
  if (!search.path) {
    receipt.outcome = InsertOutcome::table_full_failure;
    return receipt;
  }
  receipt.moves = apply_move_path(*search.path);
  const std::size_t start = search.path->start();
  if (buckets_[start].size() >= capacity_) {
    throw InvariantViolation("move path did not free a slot in its start bucket");
  }
  buckets_[start].push_back(std::move(record));
  ++count_;
  receipt.outcome = InsertOutcome::placed;
  return receipt;
}

SearchResult BucketTable::find_eviction_path_bfs(std::size_t start1, std::size_t start2,
                                                 std::size_t max_depth,
                                                 std::size_t max_nodes) const {
  return backward_search(start1, start2, max_depth, max_nodes, SearchMode::first_free);
}

SearchResult BucketTable::find_min_load_path(std::size_t start1, std::size_t start2,
                                             std::size_t depth, std::size_t max_nodes) const {
  return backward_search(start1, start2, depth, max_nodes, SearchMode::min_load);
}

SearchResult BucketTable::backward_search(std::size_t start1, std::size_t start2,
                                          std::size_t max_depth, std::size_t max_nodes,
                                          SearchMode mode) const {
  if (start1 >= buckets_.size() || start2 >= buckets_.size()) {
    throw std::out_of_range("search start outside the table");
  }
  if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");

  std::vector<SearchNode> nodes;
  std::unordered_set<std::size_t> seen;
  nodes.push_back({start1, 0, 0, 0});
  seen.insert(start1);
  if (start2 != start1) {
    nodes.push_back({start2, 0, 1, 0});
    seen.insert(start2);
  }

  SearchResult result;
  SearchStats& stats = result.stats;
  std::optional<std::size_t> chosen;
  std::size_t best_load = kUnbounded;
  bool truncated = false;  // some successor was cut by the depth or node cap

  std::size_t head = 0;
  for (; head < nodes.size(); ++head) {
    if (stats.nodes_explored == max_nodes) {
      truncated = true;
      break;
    }
    const SearchNode node = nodes[head];
    ++stats.nodes_explored;
    stats.depth = std::max(stats.depth, node.depth);

    const auto& records = buckets_[node.bucket];
    if (mode == SearchMode::first_free) {
      if (records.size() < capacity_) {
        chosen = head;
        break;
      }
    } else if (records.size() < best_load) {
      best_load = records.size();
      chosen = head;
      if (best_load == 0) break;
    }

    if (node.depth >= max_depth) {
      if (!records.empty()) truncated = true;
      continue;
    }
    for (std::size_t slot = 0; slot < records.size(); ++slot) {
      const std::size_t next = records[slot].pair.alternate(node.bucket);
      if (!seen.insert(next).second) {
        ++stats.cycle_edges_seen;
        continue;
      }
      nodes.push_back({next, node.depth + 1, head, slot});
    }
  }

  if (chosen && buckets_[nodes[*chosen].bucket].size() >= capacity_) chosen.reset();
  if (!chosen) {
    stats.stuck = !truncated && head >= nodes.size();
    return result;
  }

  EvictionPath path;
  path.terminal = nodes[*chosen].bucket;
  for (std::size_t at = *chosen; nodes[at].depth > 0; at = nodes[at].parent) {
    const SearchNode& parent = nodes[nodes[at].parent];
    path.hops.push_back({parent.bucket, nodes[at].parent_slot});
  }
  std::reverse(path.hops.begin(), path.hops.end());
  result.path = std::move(path);
  return result;
}

std::size_t BucketTable::apply_move_path(const EvictionPath& path) {
  const std::size_t n = buckets_.size();
  if (path.terminal >= n) throw StalePathError("path terminal outside the table");
  if (buckets_[path.terminal].size() >= capacity_) {
    throw StalePathError("path terminal bucket is full");
  }
  std::unordered_set<std::size_t> on_path{path.terminal};
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const PathHop& hop = path.hops[i];
    const std::size_t next = i + 1 < path.hops.size() ? path.hops[i + 1].bucket : path.terminal;
    if (hop.bucket >= n || hop.slot >= buckets_[hop.bucket].size()) {
      throw StalePathError("path hop refers to an empty slot");
    }
    if (buckets_[hop.bucket][hop.slot].pair.alternate(hop.bucket) != next) {
      throw StalePathError("path hop record cannot move to the next bucket");
    }
    if (!on_path.insert(hop.bucket).second) throw StalePathError("path revisits a bucket");
  }

  for (std::size_t i = path.hops.size(); i-- > 0;) {
    const PathHop& hop = path.hops[i];
    const std::size_t next = i + 1 < path.hops.size() ? path.hops[i + 1].bucket : path.terminal;
    auto& from = buckets_[hop.bucket];
    auto& to = buckets_[next];
    if (to.size() >= capacity_) throw InvariantViolation("move would overflow a bucket");
    to.push_back(std::move(from[hop.slot]));
    from.erase(from.begin() + static_cast<std::ptrdiff_t>(hop.slot));
  }
  return path.hops.size();
}

InsertReceipt BucketTable::insert_random_walk(ItemRecord record, std::size_t max_steps) {
  InsertReceipt receipt;
  const BucketPair pair = record.pair;
  const std::size_t load1 = buckets_[pair.first].size();
  const std::size_t load2 = buckets_[pair.second].size();
  receipt.nodes_explored = pair.is_self_loop() ? 1 : 2;
  const std::size_t best = load2 < load1 ? pair.second : pair.first;
  if (buckets_[best].size() < capacity_) {
    buckets_[best].push_back(std::move(record));
    ++count_;
    return receipt;
  }

  struct Eviction {
    std::size_t bucket;
    std::size_t slot;
    std::string victim_key;
  };
  std::vector<Eviction> undo;
  std::unordered_set<std::size_t> visited{pair.first, pair.second};
  const std::string new_key = record.key;

  std::size_t current = pair.first;
  if (!pair.is_self_loop() && std::uniform_int_distribution<int>(0, 1)(walk_rng_) == 1) {
    current = pair.second;
  }
  ItemRecord walker = std::move(record);
  std::size_t absorber = 0;
  bool absorbed = false;
  while (undo.size() < max_steps) {
    auto& records = buckets_[current];
    const std::size_t slot =
        std::uniform_int_distribution<std::size_t>(0, records.size() - 1)(walk_rng_);
    std::swap(walker, records[slot]);
    undo.push_back({current, slot, walker.key});
    const std::size_t next = walker.pair.alternate(current);
    ++receipt.nodes_explored;
    if (!visited.insert(next).second) ++receipt.cycle_edges_seen;
    if (buckets_[next].size() < capacity_) {
      buckets_[next].push_back(std::move(walker));
      absorber = next;
      absorbed = true;
      break;
    }
    current = next;
  }
  receipt.depth = undo.size();

  if (!absorbed) {
    // Each logged slot gets back the record evicted from it, newest first.
    for (std::size_t i = undo.size(); i-- > 0;) {
      std::swap(walker, buckets_[undo[i].bucket][undo[i].slot]);
    }
    receipt.outcome = InsertOutcome::table_full_failure;
    return receipt;
  }
  ++count_;

  // A record evicted twice may end where it began; count net relocations.
  std::unordered_map<std::string_view, std::pair<std::size_t, std::size_t>> origin_and_end;
  for (std::size_t i = 0; i < undo.size(); ++i) {
    if (undo[i].victim_key == new_key) continue;
    const std::size_t landed = i + 1 < undo.size() ? undo[i + 1].bucket : absorber;
    auto [it, fresh] = origin_and_end.try_emplace(undo[i].victim_key, undo[i].bucket, landed);
    if (!fresh) it->second.second = landed;
  }
  for (const auto& [key, span] : origin_and_end) {
    if (span.first != span.second) ++receipt.moves;
  }
  return receipt;
}

bool BucketTable::remove(std::string_view key) {
  const BucketPair pair = pair_for(key);
  for (std::size_t bucket : {pair.first, pair.second}) {
    if (auto slot = find_slot(bucket, key)) {
      auto& records = buckets_[bucket];
      records.erase(records.begin() + static_cast<std::ptrdiff_t>(*slot));
      --count_;
      return true;
    }
  }
  return false;
}

std::size_t BucketTable::max_load() const {
  std::size_t best = 0;
  for (const auto& records : buckets_) best = std::max(best, records.size());
  return best;
}

std::map<std::size_t, std::size_t> BucketTable::load_histogram() const {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& records : buckets_) ++histogram[records.size()];
  return histogram;
}

void BucketTable::check_invariants() const {
  std::size_t total = 0;
  std::unordered_set<std::string_view> keys;
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const auto& records = buckets_[b];
    if (records.size() > capacity_) {
      throw InvariantViolation("bucket " + std::to_string(b) + " exceeds capacity");
    }
    for (const ItemRecord& record : records) {
      if (record.pair != pair_for(record.key)) {
        throw InvariantViolation("record pair does not match its key hash in bucket " +
                                 std::to_string(b));
      }
      if (record.pair.first != b && record.pair.second != b) {
        throw InvariantViolation("record stored outside its candidate buckets at " +
                                 std::to_string(b));
      }
      if (!keys.insert(record.key).second) throw InvariantViolation("duplicate key stored");
    }
    total += records.size();
  }
  if (total != count_) throw InvariantViolation("count does not match bucket occupancy");
}

void BucketTable::place_exact(std::size_t bucket, ItemRecord record) {
  if (bucket >= buckets_.size()) throw std::invalid_argument("bucket index out of range");
  if (record.pair != pair_for(record.key)) {
    throw std::invalid_argument("record pair does not match the table's hash");
  }
  if (record.pair.first != bucket && record.pair.second != bucket) {
    throw std::invalid_argument("record cannot be stored outside its candidate buckets");
  }
  if (buckets_[bucket].size() >= capacity_) throw std::invalid_argument("bucket is full");
  if (contains(record.key)) throw std::invalid_argument("duplicate key");
  buckets_[bucket].push_back(std::move(record));
  ++count_;
}

bool BucketTable::rehash(const HashSeeds& new_seeds) {
  BucketTable rebuilt(TableConfig{buckets_.size(), capacity_, new_seeds}, hasher_);
  for (const auto& records : buckets_) {
    for (const ItemRecord& record : records) {
      const auto receipt = rebuilt.insert(record.key, record.value, BfsPolicy::unbounded());
      if (receipt.outcome != InsertOutcome::placed) return false;
    }
  }
  *this = std::move(rebuilt);
  return true;
}

}  // namespace twochoice
