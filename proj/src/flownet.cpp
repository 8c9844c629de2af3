#include "frap/flownet.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "frap/rta.hpp"

namespace frap {

FlowNetwork::FlowNetwork() {
  nodes_.push_back(FlowNode{.kind = NodeKind::source});
  nodes_.push_back(FlowNode{.kind = NodeKind::sink});
}

std::size_t FlowNetwork::add_node(FlowNode node) {
  nodes_.push_back(node);
  return nodes_.size() - 1;
}

std::size_t FlowNetwork::add_edge(std::size_t from, std::size_t to, std::int64_t capacity, Duration cost) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw std::out_of_range("edge endpoint out of range");
  edges_.push_back(FlowEdge{from, to, capacity, cost, 0});
  return edges_.size() - 1;
}

std::size_t FlowNetwork::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const FlowNode& n) { return n.kind == kind; }));
}

std::optional<std::size_t> FlowNetwork::find(NodeKind kind, std::size_t ref) const {
  for (std::size_t v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].kind == kind && nodes_[v].ref == ref) return v;
  return std::nullopt;
}

std::optional<std::size_t> FlowNetwork::find_item(ResourceIndex k, std::size_t index) const {
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const auto& n = nodes_[v];
    if (n.kind == NodeKind::item && n.ref == k && index >= n.first && index < n.first + n.count) return v;
  }
  return std::nullopt;
}

std::vector<std::size_t> FlowNetwork::out_edges(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].from == node) out.push_back(e);
  return out;
}

std::vector<std::size_t> FlowNetwork::in_edges(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].to == node) out.push_back(e);
  return out;
}

std::string FlowNetwork::dump() const {
  static constexpr const char* kNames[] = {"source", "sink", "arrival", "resource", "preemptor", "item"};
  std::ostringstream os;
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const auto& n = nodes_[v];
    os << "node " << v << ' ' << kNames[static_cast<int>(n.kind)] << ' ' << n.ref;
    if (n.kind == NodeKind::item) os << ' ' << n.first << ' ' << n.count << ' ' << n.value.ns();
    os << '\n';
  }
  for (const auto& e : edges_) os << "edge " << e.from << ' ' << e.to << ' ' << e.capacity << ' ' << e.cost.ns() << '\n';
  return os.str();
}

namespace {

// Item node lookup keyed by (resource, first index of the node).
class ItemNodes {
 public:
  ItemNodes(FlowNetwork& net, const BlockingCandidates& c, bool merge) : merge_(merge) {
    for (const auto& [k, runs] : c.items) {
      for (const auto& run : runs) {
        if (merge_) {
          const auto v = net.add_node(FlowNode{NodeKind::item, k, run.first, run.count, run.value});
          net.add_edge(v, FlowNetwork::kSink, static_cast<std::int64_t>(run.count), Duration{});
          index_[{k, run.first}] = {v, run.count};
        } else {
          for (std::size_t n = run.first; n <= run.last(); ++n) {
            const auto v = net.add_node(FlowNode{NodeKind::item, k, n, 1, run.value});
            net.add_edge(v, FlowNetwork::kSink, 1, Duration{});
            index_[{k, n}] = {v, 1};
          }
        }
      }
    }
  }

  // Edges from `from` to the node(s) covering `run`. A merged node accepts
  // up to min(cap, run length) units.
  void connect(FlowNetwork& net, std::size_t from, const ItemRun& run, std::int64_t cap) const {
    if (merge_) {
      auto it = index_.find({run.resource, run.first});
      if (it == index_.end() || it->second.second != run.count)
        throw std::invalid_argument("candidate run does not match the item pool");
      net.add_edge(from, it->second.first, std::min<std::int64_t>(cap, static_cast<std::int64_t>(run.count)),
                   run.value);
      return;
    }
    for (std::size_t n = run.first; n <= run.last(); ++n) {
      auto it = index_.find({run.resource, n});
      if (it == index_.end()) throw std::invalid_argument("candidate item missing from the item pool");
      net.add_edge(from, it->second.first, 1, run.value);
    }
  }

 private:
  bool merge_;
  std::map<std::pair<ResourceIndex, std::size_t>, std::pair<std::size_t, std::size_t>> index_;
};

}  // namespace

FlowNetwork build_network(const BlockingCandidates& candidates, const PreemptionCounts& nop,
                          NetworkOptions options) {
  FlowNetwork net;
  ItemNodes items(net, candidates, options.merge_runs);

  if (!candidates.arrival.empty()) {
    const auto vb = net.add_node(FlowNode{.kind = NodeKind::arrival});
    net.add_edge(FlowNetwork::kSource, vb, 1, Duration{});
    for (const auto& a : candidates.arrival) {
      const auto vk = net.add_node(FlowNode{.kind = NodeKind::resource, .ref = a.resource});
      net.add_edge(vb, vk, 1, a.cs_len);
      net.add_edge(vk, FlowNetwork::kSink, 1, Duration{});
      for (const auto& run : a.remote) items.connect(net, vk, run, 1);
    }
  }

  for (const auto& [h, runs] : candidates.additional) {
    if (runs.empty()) continue;
    auto it = nop.find(h);
    if (it == nop.end()) throw std::invalid_argument("missing preemption count for task " + std::to_string(h));
    const auto vh = net.add_node(FlowNode{.kind = NodeKind::preemptor, .ref = h});
    net.add_edge(FlowNetwork::kSource, vh, it->second, Duration{});
    for (const auto& run : runs) items.connect(net, vh, run, std::numeric_limits<std::int64_t>::max());
  }
  return net;
}

FlowResult solve_max_cost_max_flow(FlowNetwork& network) {
  // Residual arcs: 2e is the forward arc of edge e, 2e+1 its reverse.
  auto& edges = network.edges();
  const std::size_t n = network.nodes().size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].from].push_back(2 * e);
    adj[edges[e].to].push_back(2 * e + 1);
  }
  auto head = [&](std::size_t arc) { return arc % 2 ? edges[arc / 2].from : edges[arc / 2].to; };
  auto residual = [&](std::size_t arc) {
    const auto& e = edges[arc / 2];
    return arc % 2 ? e.flow : e.capacity - e.flow;
  };
  // Negated cost: cheapest path == most blocking.
  auto weight = [&](std::size_t arc) {
    const auto c = edges[arc / 2].cost.ns();
    return arc % 2 ? c : -c;
  };

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  FlowResult result;
  std::vector<std::int64_t> dist(n);
  std::vector<std::size_t> via(n);
  std::vector<bool> queued(n);
  std::int64_t last_gain = std::numeric_limits<std::int64_t>::max();

  for (;;) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(queued.begin(), queued.end(), false);
    dist[FlowNetwork::kSource] = 0;
    std::deque<std::size_t> queue{FlowNetwork::kSource};
    queued[FlowNetwork::kSource] = true;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      queued[u] = false;
      for (auto arc : adj[u]) {
        if (residual(arc) <= 0) continue;
        const auto v = head(arc);
        const auto d = dist[u] + weight(arc);
        if (d < dist[v]) {
          dist[v] = d;
          via[v] = arc;
          if (!queued[v]) {
            queued[v] = true;
            queue.push_back(v);
          }
        }
      }
    }
    if (dist[FlowNetwork::kSink] == kInf) break;

    std::int64_t push = kInf;
    for (auto v = FlowNetwork::kSink; v != FlowNetwork::kSource;) {
      const auto arc = via[v];
      push = std::min(push, residual(arc));
      v = arc % 2 ? edges[arc / 2].to : edges[arc / 2].from;
    }
    const std::int64_t gain = -dist[FlowNetwork::kSink];  // blocking added per unit
    if (gain < 0 || gain > last_gain) {
      throw FlowInvariantError("augmenting path with gain " + std::to_string(gain) + " after " +
                               std::to_string(last_gain) + "; network:\n" + network.dump());
    }
    last_gain = gain;
    for (auto v = FlowNetwork::kSink; v != FlowNetwork::kSource;) {
      const auto arc = via[v];
      auto& e = edges[arc / 2];
      if (arc % 2) {
        e.flow -= push;
        v = e.to;
      } else {
        e.flow += push;
        v = e.from;
      }
    }
    result.flow += push;
    result.cost += push * Duration(gain);
  }
  return result;
}

namespace {

struct UnitItem {
  ResourceIndex resource;
  std::size_t index;
  Duration value;
};

std::vector<UnitItem> expand(std::span<const ItemRun> runs) {
  std::vector<UnitItem> out;
  for (const auto& r : runs)
    for (std::size_t n = r.first; n <= r.last(); ++n) out.push_back(UnitItem{r.resource, n, r.value});
  return out;
}

// Best total of assigning items[pos..] to preemptors with remaining budgets.
class AdditionalSearch {
 public:
  AdditionalSearch(std::vector<Duration> values, std::vector<std::vector<std::size_t>> eligible,
                   std::vector<std::int64_t> budget)
      : values_(std::move(values)), eligible_(std::move(eligible)), budget_(std::move(budget)) {}

  std::int64_t best(const std::vector<bool>& taken) {
    taken_ = taken;
    memo_.clear();
    return go(0, budget_);
  }

 private:
  std::int64_t go(std::size_t pos, std::vector<std::int64_t>& budget) {
    if (pos == values_.size()) return 0;
    std::vector<std::int64_t> key = budget;
    key.push_back(static_cast<std::int64_t>(pos));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::int64_t best = go(pos + 1, budget);
    if (!taken_[pos]) {
      for (auto h : eligible_[pos]) {
        if (budget[h] == 0) continue;
        --budget[h];
        best = std::max(best, values_[pos].ns() + go(pos + 1, budget));
        ++budget[h];
      }
    }
    memo_[key] = best;
    return best;
  }

  std::vector<Duration> values_;
  std::vector<std::vector<std::size_t>> eligible_;
  std::vector<std::int64_t> budget_;
  std::vector<bool> taken_;
  std::map<std::vector<std::int64_t>, std::int64_t> memo_;
};

}  // namespace

Duration brute_force_bw(const BlockingCandidates& candidates, const PreemptionCounts& nop, std::size_t item_limit) {
  // Unit items are the union of everything any effect may claim.
  std::vector<UnitItem> items;
  auto id_of = [&items](ResourceIndex k, std::size_t n) -> std::size_t {
    for (std::size_t u = 0; u < items.size(); ++u)
      if (items[u].resource == k && items[u].index == n) return u;
    return items.size();
  };
  auto admit = [&](std::span<const ItemRun> runs) {
    for (const auto& u : expand(runs))
      if (id_of(u.resource, u.index) == items.size()) items.push_back(u);
  };
  for (const auto& [k, runs] : candidates.items) admit(runs);
  for (const auto& a : candidates.arrival) admit(a.remote);
  for (const auto& [h, runs] : candidates.additional) admit(runs);
  if (items.size() > item_limit)
    throw std::invalid_argument("brute force limited to " + std::to_string(item_limit) + " items, got " +
                                std::to_string(items.size()));

  std::vector<std::int64_t> budget;
  std::vector<std::vector<std::size_t>> eligible(items.size());
  for (const auto& [h, runs] : candidates.additional) {
    auto it = nop.find(h);
    const std::int64_t cap = it == nop.end() ? 0 : it->second;
    const std::size_t slot = budget.size();
    budget.push_back(std::min<std::int64_t>(cap, static_cast<std::int64_t>(items.size())));
    for (const auto& u : expand(runs)) eligible[id_of(u.resource, u.index)].push_back(slot);
  }
  std::vector<Duration> values;
  for (const auto& u : items) values.push_back(u.value);
  AdditionalSearch search(values, eligible, budget);

  std::vector<bool> taken(items.size(), false);
  std::int64_t best = search.best(taken);  // no arrival blocking
  for (const auto& a : candidates.arrival) {
    best = std::max(best, a.cs_len.ns() + search.best(taken));
    for (const auto& u : expand(a.remote)) {
      const auto id = id_of(u.resource, u.index);
      taken[id] = true;
      best = std::max(best, a.cs_len.ns() + u.value.ns() + search.best(taken));
      taken[id] = false;
    }
  }
  return Duration(best);
}

namespace {

void remove_from(std::vector<ItemRun>& runs, ResourceIndex k, std::size_t index) {
  std::vector<ItemRun> out;
  for (const auto& r : runs) {
    if (r.resource != k || index < r.first || index > r.last()) {
      out.push_back(r);
      continue;
    }
    if (index > r.first) out.push_back(ItemRun{k, r.first, index - r.first, r.value});
    if (index < r.last()) out.push_back(ItemRun{k, index + 1, r.last() - index, r.value});
  }
  runs = std::move(out);
}

void remove_item(BlockingCandidates& c, ResourceIndex k, std::size_t index) {
  for (auto& [r, runs] : c.items) remove_from(runs, k, index);
  for (auto& a : c.arrival) remove_from(a.remote, k, index);
  for (auto& [h, runs] : c.additional) remove_from(runs, k, index);
}

struct ArrivalChoice {
  Duration value;
  std::optional<std::pair<ResourceIndex, std::size_t>> item;
};

// Largest single arrival entry; ties favour the lower resource, then the
// lower queue index.
std::optional<ArrivalChoice> best_arrival(const BlockingCandidates& c) {
  std::optional<ArrivalChoice> best;
  auto consider = [&best](ArrivalChoice choice) {
    if (!best || choice.value > best->value) best = choice;
  };
  std::vector<ArrivalCandidate> ordered = c.arrival;
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.resource < b.resource; });
  for (const auto& a : ordered) {
    consider({a.cs_len, std::nullopt});
    for (const auto& r : a.remote) consider({a.cs_len + r.value, std::make_pair(r.resource, r.first)});
  }
  return best;
}

}  // namespace

Duration sequential_bound(const BlockingCandidates& candidates, const PreemptionCounts& nop, BoundOrder order) {
  BlockingCandidates work = candidates;
  Duration total;
  if (order == BoundOrder::arrival_first) {
    if (auto b = best_arrival(work)) {
      total += b->value;
      if (b->item) remove_item(work, b->item->first, b->item->second);
    }
    work.arrival.clear();
    auto net = build_network(work, nop, {.merge_runs = false});
    total += solve_max_cost_max_flow(net).cost;
    return total;
  }

  BlockingCandidates additional_only = work;
  additional_only.arrival.clear();
  auto net = build_network(additional_only, nop, {.merge_runs = false});
  total += solve_max_cost_max_flow(net).cost;
  for (const auto& e : net.edges()) {
    const auto& from = net.nodes()[e.from];
    if (e.to == FlowNetwork::kSink && from.kind == NodeKind::item && e.flow > 0) remove_item(work, from.ref, from.first);
  }
  if (auto b = best_arrival(work)) total += b->value;
  return total;
}

PreemptionCounts preemption_counts(const System& system, TaskIndex i, Duration r_i) {
  PreemptionCounts out;
  for (TaskIndex h : system.lhp(i)) out[h] = nop(system, i, h, r_i);
  return out;
}

Duration bound_bw(const System& system, const SpinAssignment& assignment, TaskIndex i,
                  std::span<const BlockingQueue> queues, Duration r_i) {
  const auto candidates = blocking_candidates(system, assignment, i, queues);
  if (candidates.arrival.empty() && candidates.additional.empty()) return Duration{};
  auto net = build_network(candidates, preemption_counts(system, i, r_i));
  return solve_max_cost_max_flow(net).cost;
}

}  // namespace frap
