#include "frap/blocking.hpp"

#include <algorithm>
#include <set>

namespace frap {

std::int64_t zeta(const System& system, TaskIndex i, ResourceIndex k, Duration r_i) {
  std::int64_t count = system.task(i).requests_for(k);
  for (TaskIndex h : system.lhp(i)) {
    const Task& hp = system.task(h);
    const std::int64_t n = hp.requests_for(k);
    if (n > 0) count += ceil_div(r_i, hp.period) * n;
  }
  return count;
}

std::int64_t xi(const System& system, TaskIndex i, ProcessorIndex m, ResourceIndex k, Duration r_i,
                std::span<const Duration> response) {
  std::int64_t count = 0;
  for (TaskIndex j : system.tasks_on(m)) {
    if (j == i) continue;
    const Task& remote = system.task(j);
    const std::int64_t n = remote.requests_for(k);
    if (n > 0) count += ceil_div(r_i + response[j], remote.period) * n;
  }
  return count;
}

RequestCounts request_counts(const System& system, TaskIndex i, Duration r_i, std::span<const Duration> response) {
  const std::size_t resources = system.resources().size();
  const ProcessorIndex home = system.task(i).processor;
  RequestCounts counts;
  counts.zeta.assign(resources, 0);
  counts.xi.assign(resources, std::vector<std::int64_t>(system.processor_count(), 0));
  for (ResourceIndex k = 0; k < resources; ++k) {
    counts.zeta[k] = zeta(system, i, k, r_i);
    if (!system.is_global(k)) continue;
    for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
      if (m != home) counts.xi[k][m] = xi(system, i, m, k, r_i, response);
    }
  }
  return counts;
}

RequestQueue make_request_queue(const System& system, ProcessorIndex m, ResourceIndex k, std::int64_t count) {
  RequestQueue q{m, k, {}};
  q.items.assign(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)), system.resource(k).cs_len);
  return q;
}

BlockingQueue sum_request_queues(ResourceIndex k, std::span<const RequestQueue> queues, std::int64_t zeta) {
  BlockingQueue out;
  out.resource = k;
  std::size_t longest = 0;
  for (const auto& q : queues) longest = std::max(longest, q.items.size());
  out.items.assign(longest, Duration{});
  for (const auto& q : queues)
    for (std::size_t n = 0; n < q.items.size(); ++n) out.items[n] += q.items[n];
  const auto absorbed = std::min<std::int64_t>(zeta, static_cast<std::int64_t>(longest));
  out.alpha = static_cast<std::size_t>(absorbed) + 1;
  return out;
}

std::vector<BlockingQueue> build_blocking_queues(const System& system, TaskIndex i, const RequestCounts& counts) {
  const ProcessorIndex home = system.task(i).processor;
  std::vector<BlockingQueue> out;
  out.reserve(system.resources().size());
  std::vector<RequestQueue> remote;
  for (ResourceIndex k = 0; k < system.resources().size(); ++k) {
    remote.clear();
    for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
      if (m == home || counts.xi[k][m] == 0) continue;
      remote.push_back(make_request_queue(system, m, k, counts.xi[k][m]));
    }
    out.push_back(sum_request_queues(k, remote, counts.zeta[k]));
  }
  return out;
}

std::vector<ItemRun> unaccounted_runs(const BlockingQueue& queue) {
  std::vector<ItemRun> runs;
  for (std::size_t n = queue.alpha; n <= queue.size(); ++n) {
    const Duration v = queue.at(n);
    if (!runs.empty() && runs.back().value == v) {
      ++runs.back().count;
    } else {
      runs.push_back(ItemRun{queue.resource, n, 1, v});
    }
  }
  return runs;
}

std::vector<Duration> expand_values(std::span<const ItemRun> runs) {
  std::vector<Duration> out;
  for (const auto& r : runs) out.insert(out.end(), r.count, r.value);
  return out;
}

std::vector<std::pair<ResourceIndex, Duration>> BlockingCandidates::arrival_values() const {
  std::vector<std::pair<ResourceIndex, Duration>> out;
  for (const auto& a : arrival) {
    out.emplace_back(a.resource, a.cs_len);
    for (const auto& run : a.remote)
      for (std::size_t c = 0; c < run.count; ++c) out.emplace_back(a.resource, a.cs_len + run.value);
  }
  return out;
}

std::size_t BlockingCandidates::item_count() const {
  std::size_t n = 0;
  for (const auto& [k, runs] : items)
    for (const auto& r : runs) n += r.count;
  return n;
}

namespace {

bool local_ceiling_blocks(const System& system, TaskIndex i, ResourceIndex k) {
  if (system.is_global(k)) return false;
  const Task& t = system.task(i);
  const auto ceil = system.ceiling(k, t.processor);
  return ceil && *ceil >= t.priority;
}

}  // namespace

bool propagates_remote(const System& system, const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) {
  if (!system.is_global(k)) return false;
  const Priority p = system.task(i).priority;
  for (TaskIndex l : system.llp(i)) {
    if (system.task(l).requests_for(k) == 0) continue;
    if (assignment.at(l, k) >= p) return true;
  }
  return false;
}

std::vector<ResourceIndex> arrival_candidate_resources(const System& system, const SpinAssignment&, TaskIndex i) {
  std::set<ResourceIndex> out;
  for (TaskIndex l : system.llp(i)) {
    for (const auto& [k, n] : system.task(l).requests) {
      if (system.is_global(k) || local_ceiling_blocks(system, i, k)) out.insert(k);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<ArrivalCandidate> arrival_candidates(const System& system, const SpinAssignment& assignment,
                                                 TaskIndex i, std::span<const BlockingQueue> queues) {
  std::vector<ArrivalCandidate> out;
  for (ResourceIndex k : arrival_candidate_resources(system, assignment, i)) {
    ArrivalCandidate c{k, system.resource(k).cs_len, {}};
    if (propagates_remote(system, assignment, i, k)) c.remote = unaccounted_runs(queues[k]);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ResourceIndex> additional_candidate_resources(const System& system, const SpinAssignment& assignment,
                                                          TaskIndex i, TaskIndex h) {
  const Priority preemptor = system.task(h).priority;
  std::set<ResourceIndex> out;
  auto consider = [&](TaskIndex x) {
    for (const auto& [k, n] : system.task(x).requests)
      if (preemptor > assignment.at(x, k)) out.insert(k);
  };
  consider(i);
  for (TaskIndex x : system.lhp(i)) consider(x);
  return {out.begin(), out.end()};
}

std::map<TaskIndex, std::vector<ItemRun>> additional_candidates(const System& system,
                                                                const SpinAssignment& assignment, TaskIndex i,
                                                                std::span<const BlockingQueue> queues) {
  std::map<TaskIndex, std::vector<ItemRun>> out;
  for (TaskIndex h : system.lhp(i)) {
    std::vector<ItemRun> runs;
    for (ResourceIndex k : additional_candidate_resources(system, assignment, i, h)) {
      auto more = unaccounted_runs(queues[k]);
      runs.insert(runs.end(), more.begin(), more.end());
    }
    if (!runs.empty()) out.emplace(h, std::move(runs));
  }
  return out;
}

BlockingCandidates blocking_candidates(const System& system, const SpinAssignment& assignment, TaskIndex i,
                                       std::span<const BlockingQueue> queues) {
  BlockingCandidates c;
  c.arrival = arrival_candidates(system, assignment, i, queues);
  c.additional = additional_candidates(system, assignment, i, queues);

  std::set<ResourceIndex> involved;
  for (const auto& a : c.arrival) involved.insert(a.resource);
  for (TaskIndex h : system.lhp(i))
    for (ResourceIndex k : additional_candidate_resources(system, assignment, i, h)) involved.insert(k);
  for (ResourceIndex k : involved) {
    auto runs = unaccounted_runs(queues[k]);
    if (!runs.empty()) c.items.emplace(k, std::move(runs));
  }
  return c;
}

}  // namespace frap
