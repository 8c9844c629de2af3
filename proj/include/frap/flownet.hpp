#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frap/blocking.hpp"

namespace frap {

/// Preemption count NoP_i^h granted to each higher-priority effect node.
using PreemptionCounts = std::map<TaskIndex, std::int64_t>;

enum class NodeKind { source, sink, arrival, resource, preemptor, item };

struct FlowNode {
  NodeKind kind = NodeKind::source;
  std::size_t ref = 0;  // resource index (resource/item) or task index (preemptor)
  /// Item nodes: covered index range [first, first + count) of the queue.
  std::size_t first = 0;
  std::size_t count = 0;
  Duration value{};
};

struct FlowEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t capacity = 0;
  Duration cost{};
  std::int64_t flow = 0;
};

/// Directed network for the joint arrival/additional blocking bound.
/// Node 0 is the source and node 1 the sink.
class FlowNetwork {
 public:
  static constexpr std::size_t kSource = 0;
  static constexpr std::size_t kSink = 1;

  FlowNetwork();

  std::size_t add_node(FlowNode node);
  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t capacity, Duration cost);

  const std::vector<FlowNode>& nodes() const { return nodes_; }
  const std::vector<FlowEdge>& edges() const { return edges_; }
  std::vector<FlowEdge>& edges() { return edges_; }

  std::size_t count(NodeKind kind) const;
  std::optional<std::size_t> find(NodeKind kind, std::size_t ref) const;
  /// Item node covering (resource, index), if any.
  std::optional<std::size_t> find_item(ResourceIndex k, std::size_t index) const;
  std::vector<std::size_t> out_edges(std::size_t node) const;
  std::vector<std::size_t> in_edges(std::size_t node) const;

  /// Line format: `node ID KIND REF` per node, then `edge FROM TO CAP COST`
  /// per edge, costs in ns.
  std::string dump() const;

 private:
  std::vector<FlowNode> nodes_;
  std::vector<FlowEdge> edges_;
};

struct NetworkOptions {
  /// One node per run of equal-valued queue entries instead of one per entry.
  /// Both shapes admit the same optimal cost; merged networks stay small when
  /// remote request counts are large.
  bool merge_runs = true;
};

/// Source feeds the arrival node (capacity 1) and each preemptor node
/// (capacity NoP). Arrival node feeds one node per arrival resource at cost
/// c^k; those drain to the sink or continue into one remote item. Every item
/// node drains to the sink with unit capacity, so a shared item is counted at
/// most once.
FlowNetwork build_network(const BlockingCandidates& candidates, const PreemptionCounts& nop,
                          NetworkOptions options = {});

struct FlowResult {
  std::int64_t flow = 0;
  Duration cost{};
};

/// Thrown when an augmenting path would lower the accumulated cost. Carries
/// the network dump.
class FlowInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Maximum flow of maximum total cost. Successive shortest augmenting paths
/// on negated costs with a label-correcting path search. Edge flows are
/// written back into `network`.
FlowResult solve_max_cost_max_flow(FlowNetwork& network);

/// Candidate structures larger than this are rejected by brute_force_bw.
inline constexpr std::size_t kBruteForceItemLimit = 16;

/// Exhaustive maximum of B + W: at most one arrival choice, at most NoP items
/// per preemptor, each item used once. Independent of the flow solver.
/// Throws std::invalid_argument above `item_limit` items.
Duration brute_force_bw(const BlockingCandidates& candidates, const PreemptionCounts& nop,
                        std::size_t item_limit = kBruteForceItemLimit);

enum class BoundOrder { arrival_first, additional_first };

/// Two-stage bound that maximises one effect, removes the items it used,
/// then maximises the other. Can underestimate the joint worst case.
Duration sequential_bound(const BlockingCandidates& candidates, const PreemptionCounts& nop, BoundOrder order);

/// NoP_i^h = ceil(R_i / T_h) for every local higher-priority task.
PreemptionCounts preemption_counts(const System& system, TaskIndex i, Duration r_i);

/// Joint B_i + W_i bound for the task at window r_i.
Duration bound_bw(const System& system, const SpinAssignment& assignment, TaskIndex i,
                  std::span<const BlockingQueue> queues, Duration r_i);

}  // namespace frap
