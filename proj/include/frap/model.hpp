#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frap/duration.hpp"

namespace frap {

using TaskIndex = std::size_t;
using ResourceIndex = std::size_t;
using ProcessorIndex = std::size_t;
/// Larger value = higher priority.
using Priority = int;

struct Resource {
  std::string id;
  Duration cs_len{};  // c^k
};

struct Task {
  std::string id;
  Duration pure_wcet{};  // C_i, excludes critical sections
  Duration period{};
  Duration deadline{};
  Priority priority = 0;
  ProcessorIndex processor = 0;
  /// resource -> requests per release (N_i^k). Keys are F(task).
  std::map<ResourceIndex, std::int64_t> requests;

  std::int64_t requests_for(ResourceIndex k) const {
    auto it = requests.find(k);
    return it == requests.end() ? 0 : it->second;
  }
};

/// Immutable analysis input: processors, tasks, resources and the request
/// matrix. Derived relations (local task sets, lhp/llp, scope, C̄) are computed
/// once at construction. Construction never rejects data; use validate().
class System {
 public:
  System() = default;
  System(std::size_t processor_count, std::vector<Task> tasks, std::vector<Resource> resources);

  std::size_t processor_count() const { return processor_count_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Resource>& resources() const { return resources_; }
  const Task& task(TaskIndex i) const { return tasks_.at(i); }
  const Resource& resource(ResourceIndex k) const { return resources_.at(k); }

  std::optional<TaskIndex> find_task(const std::string& id) const;
  std::optional<ResourceIndex> find_resource(const std::string& id) const;
  /// Throws std::out_of_range for unknown ids.
  TaskIndex task_index(const std::string& id) const;
  ResourceIndex resource_index(const std::string& id) const;

  /// Tasks on processor m, highest priority first.
  const std::vector<TaskIndex>& tasks_on(ProcessorIndex m) const;
  /// Local higher-priority tasks of i, highest first.
  const std::vector<TaskIndex>& lhp(TaskIndex i) const { return lhp_.at(i); }
  /// Local lower-priority tasks of i, highest first.
  const std::vector<TaskIndex>& llp(TaskIndex i) const { return llp_.at(i); }
  /// Tasks that request resource k.
  const std::vector<TaskIndex>& requesters(ResourceIndex k) const { return requesters_.at(k); }

  /// Highest base priority among tasks on processor m requesting k.
  std::optional<Priority> ceiling(ResourceIndex k, ProcessorIndex m) const;
  /// Requested from at least two distinct processors.
  bool is_global(ResourceIndex k) const { return global_.at(k); }
  /// C̄_i = C_i + sum_k N_i^k c^k.
  Duration total_wcet(TaskIndex i) const { return total_wcet_.at(i); }
  /// P̂: the highest base priority in the system.
  Priority max_priority() const { return max_priority_; }

 private:
  std::size_t processor_count_ = 0;
  std::vector<Task> tasks_;
  std::vector<Resource> resources_;

  std::vector<std::vector<TaskIndex>> by_processor_;
  std::vector<std::vector<TaskIndex>> lhp_;
  std::vector<std::vector<TaskIndex>> llp_;
  std::vector<std::vector<TaskIndex>> requesters_;
  std::vector<bool> global_;
  std::vector<Duration> total_wcet_;
  Priority max_priority_ = 0;
};

/// Spin priority P_i^k per (task, resource) pair with r^k in F(task).
class SpinAssignment {
 public:
  SpinAssignment() = default;
  explicit SpinAssignment(std::size_t task_count) : table_(task_count) {}

  std::size_t task_count() const { return table_.size(); }
  void set(TaskIndex i, ResourceIndex k, Priority p);
  std::optional<Priority> get(TaskIndex i, ResourceIndex k) const;
  /// Throws std::out_of_range if the pair is not assigned.
  Priority at(TaskIndex i, ResourceIndex k) const;
  const std::map<ResourceIndex, Priority>& of(TaskIndex i) const { return table_.at(i); }

  bool operator==(const SpinAssignment&) const = default;

 private:
  std::vector<std::map<ResourceIndex, Priority>> table_;
};

/// Returns one human-readable line per broken model invariant; empty when
/// the system is well formed.
std::vector<std::string> validate(const System& system);

/// Model violations plus assignment coverage and P_i <= P_i^k <= P̂.
std::vector<std::string> validate(const System& system, const SpinAssignment& assignment);

}  // namespace frap
