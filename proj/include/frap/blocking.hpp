#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "frap/model.hpp"

namespace frap {

/// zeta_i^k: requests for k issued by the task and its local higher-priority
/// tasks during a window of length r_i.
std::int64_t zeta(const System& system, TaskIndex i, ResourceIndex k, Duration r_i);

/// xi_{i,m}^k: requests for k from tasks on remote processor m during the
/// window, including the back-to-back carry-in of each remote task.
/// `response` holds the current response-time estimate of every task.
std::int64_t xi(const System& system, TaskIndex i, ProcessorIndex m, ResourceIndex k, Duration r_i,
                std::span<const Duration> response);

/// zeta per resource and xi per (resource, processor) for one task.
/// xi[k][A_i] is always 0.
struct RequestCounts {
  std::vector<std::int64_t> zeta;
  std::vector<std::vector<std::int64_t>> xi;
};

RequestCounts request_counts(const System& system, TaskIndex i, Duration r_i,
                             std::span<const Duration> response);

/// Execution times of the remote requests for one resource on one processor.
struct RequestQueue {
  ProcessorIndex processor = 0;
  ResourceIndex resource = 0;
  std::vector<Duration> items;
};

RequestQueue make_request_queue(const System& system, ProcessorIndex m, ResourceIndex k, std::int64_t count);

/// Positional sum of the remote request queues for one resource. Item n
/// (1-based) is the worst-case remote delay of the n-th request issued from
/// the task's processor. Items with index < alpha are absorbed by the spin
/// delay; the rest are the unaccounted items.
struct BlockingQueue {
  ResourceIndex resource = 0;
  std::vector<Duration> items;
  std::size_t alpha = 1;

  std::size_t size() const { return items.size(); }
  /// 1-based access.
  Duration at(std::size_t n) const { return items.at(n - 1); }
  bool has_unaccounted() const { return alpha <= items.size(); }
};

BlockingQueue sum_request_queues(ResourceIndex k, std::span<const RequestQueue> queues, std::int64_t zeta);

/// One blocking queue per system resource, indexed by resource.
std::vector<BlockingQueue> build_blocking_queues(const System& system, TaskIndex i, const RequestCounts& counts);

/// A run of consecutive unaccounted blocking-queue entries of one resource
/// that share the same value. Each entry's identity is (resource, index);
/// equal-valued entries are still distinct items.
struct ItemRun {
  ResourceIndex resource = 0;
  std::size_t first = 0;  // 1-based index of the first entry
  std::size_t count = 1;
  Duration value{};

  std::size_t last() const { return first + count - 1; }
  bool operator==(const ItemRun&) const = default;
};

/// Split the unaccounted range of a queue into maximal equal-value runs.
std::vector<ItemRun> unaccounted_runs(const BlockingQueue& queue);

/// Arrival-blocking candidates contributed by one resource: the local
/// critical section alone, or the critical section plus one remote item.
struct ArrivalCandidate {
  ResourceIndex resource = 0;
  Duration cs_len{};
  std::vector<ItemRun> remote;  // empty unless remote delay can propagate
};

/// Candidate items for arrival blocking and for the additional blocking
/// caused by each local higher-priority task.
struct BlockingCandidates {
  std::vector<ArrivalCandidate> arrival;
  std::map<TaskIndex, std::vector<ItemRun>> additional;
  /// Every unaccounted item of the resources that appear above.
  std::map<ResourceIndex, std::vector<ItemRun>> items;

  /// Flattened arrival list as (resource, blocking value), one entry per item.
  std::vector<std::pair<ResourceIndex, Duration>> arrival_values() const;
  /// Number of distinct unaccounted items.
  std::size_t item_count() const;
};

/// Expand runs to per-item values, in index order.
std::vector<Duration> expand_values(std::span<const ItemRun> runs);

/// Whether a lower-priority local request for k can carry remote blocking
/// into the task's arrival: k is global and some local lower-priority
/// requester spins at or above the task's base priority.
bool propagates_remote(const System& system, const SpinAssignment& assignment, TaskIndex i, ResourceIndex k);

/// F^b: resources of lower-priority local tasks that can block the task on
/// arrival (local with ceiling >= P_i, or global). Ascending resource index.
std::vector<ResourceIndex> arrival_candidate_resources(const System& system, const SpinAssignment& assignment,
                                                       TaskIndex i);

std::vector<ArrivalCandidate> arrival_candidates(const System& system, const SpinAssignment& assignment,
                                                 TaskIndex i, std::span<const BlockingQueue> queues);

/// F^w(i, h): resources whose spinning by the task or a local higher-priority
/// task can be preempted by h.
std::vector<ResourceIndex> additional_candidate_resources(const System& system, const SpinAssignment& assignment,
                                                          TaskIndex i, TaskIndex h);

/// Per higher-priority task h: unaccounted items of every resource in F^w(i, h).
/// Tasks with no items are absent.
std::map<TaskIndex, std::vector<ItemRun>> additional_candidates(const System& system,
                                                                     const SpinAssignment& assignment, TaskIndex i,
                                                                     std::span<const BlockingQueue> queues);

BlockingCandidates blocking_candidates(const System& system, const SpinAssignment& assignment, TaskIndex i,
                                       std::span<const BlockingQueue> queues);

}  // namespace frap
