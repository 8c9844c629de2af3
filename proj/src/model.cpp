#include "frap/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace frap {

System::System(std::size_t processor_count, std::vector<Task> tasks, std::vector<Resource> resources)
    : processor_count_(processor_count), tasks_(std::move(tasks)), resources_(std::move(resources)) {
  const std::size_t n = tasks_.size();
  by_processor_.assign(processor_count_, {});
  lhp_.assign(n, {});
  llp_.assign(n, {});
  requesters_.assign(resources_.size(), {});
  global_.assign(resources_.size(), false);
  total_wcet_.assign(n, Duration{});

  auto higher_first = [this](TaskIndex a, TaskIndex b) {
    if (tasks_[a].priority != tasks_[b].priority) return tasks_[a].priority > tasks_[b].priority;
    return a < b;
  };

  for (TaskIndex i = 0; i < n; ++i) {
    const Task& t = tasks_[i];
    if (t.processor < processor_count_) by_processor_[t.processor].push_back(i);
    max_priority_ = i == 0 ? t.priority : std::max(max_priority_, t.priority);

    Duration total = t.pure_wcet;
    for (const auto& [k, count] : t.requests) {
      if (k >= resources_.size()) continue;
      total += count * resources_[k].cs_len;
      requesters_[k].push_back(i);
    }
    total_wcet_[i] = total;
  }
  for (auto& local : by_processor_) std::sort(local.begin(), local.end(), higher_first);

  for (TaskIndex i = 0; i < n; ++i) {
    if (tasks_[i].processor >= processor_count_) continue;
    for (TaskIndex j : by_processor_[tasks_[i].processor]) {
      if (j == i) continue;
      if (tasks_[j].priority > tasks_[i].priority) lhp_[i].push_back(j);
      else if (tasks_[j].priority < tasks_[i].priority) llp_[i].push_back(j);
    }
  }

  for (ResourceIndex k = 0; k < resources_.size(); ++k) {
    std::set<ProcessorIndex> procs;
    for (TaskIndex i : requesters_[k]) procs.insert(tasks_[i].processor);
    global_[k] = procs.size() >= 2;
  }
}

std::optional<TaskIndex> System::find_task(const std::string& id) const {
  for (TaskIndex i = 0; i < tasks_.size(); ++i)
    if (tasks_[i].id == id) return i;
  return std::nullopt;
}

std::optional<ResourceIndex> System::find_resource(const std::string& id) const {
  for (ResourceIndex k = 0; k < resources_.size(); ++k)
    if (resources_[k].id == id) return k;
  return std::nullopt;
}

TaskIndex System::task_index(const std::string& id) const {
  if (auto i = find_task(id)) return *i;
  throw std::out_of_range("unknown task id '" + id + "'");
}

ResourceIndex System::resource_index(const std::string& id) const {
  if (auto k = find_resource(id)) return *k;
  throw std::out_of_range("unknown resource id '" + id + "'");
}

const std::vector<TaskIndex>& System::tasks_on(ProcessorIndex m) const {
  return by_processor_.at(m);
}

std::optional<Priority> System::ceiling(ResourceIndex k, ProcessorIndex m) const {
  std::optional<Priority> best;
  for (TaskIndex i : requesters_.at(k)) {
    if (tasks_[i].processor != m) continue;
    if (!best || tasks_[i].priority > *best) best = tasks_[i].priority;
  }
  return best;
}

void SpinAssignment::set(TaskIndex i, ResourceIndex k, Priority p) {
  if (i >= table_.size()) table_.resize(i + 1);
  table_[i][k] = p;
}

std::optional<Priority> SpinAssignment::get(TaskIndex i, ResourceIndex k) const {
  if (i >= table_.size()) return std::nullopt;
  auto it = table_[i].find(k);
  if (it == table_[i].end()) return std::nullopt;
  return it->second;
}

Priority SpinAssignment::at(TaskIndex i, ResourceIndex k) const {
  if (auto p = get(i, k)) return *p;
  throw std::out_of_range("no spin priority for task " + std::to_string(i) + ", resource " +
                          std::to_string(k));
}

std::vector<std::string> validate(const System& system) {
  std::vector<std::string> out;
  auto report = [&out](const std::string& s) { out.push_back(s); };

  if (system.processor_count() == 0) report("processors: must be positive");

  std::set<std::string> seen_resources;
  for (const Resource& r : system.resources()) {
    if (!seen_resources.insert(r.id).second) report("resource " + r.id + ": duplicate id");
    if (r.cs_len <= Duration{}) report("resource " + r.id + ": cs_len must be > 0");
  }

  std::set<std::string> seen_tasks;
  for (TaskIndex i = 0; i < system.tasks().size(); ++i) {
    const Task& t = system.task(i);
    const std::string who = "task " + t.id + ": ";
    if (!seen_tasks.insert(t.id).second) report(who + "duplicate id");
    if (t.processor >= system.processor_count())
      report(who + "processor " + std::to_string(t.processor) + " out of range");
    if (t.priority <= 0) report(who + "priority must be a positive integer");
    if (t.pure_wcet < Duration{}) report(who + "wcet_pure must be >= 0");
    if (t.period <= Duration{}) report(who + "period must be > 0");
    if (t.deadline <= Duration{}) report(who + "deadline must be > 0");
    if (t.deadline > t.period) report(who + "deadline exceeds period (constrained deadlines required)");
    for (const auto& [k, count] : t.requests) {
      if (k >= system.resources().size())
        report(who + "requests unknown resource index " + std::to_string(k));
      else if (count <= 0)
        report(who + "request count for " + system.resource(k).id + " must be positive");
    }
  }

  // Priorities must be unique among tasks sharing a processor.
  for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
    std::map<Priority, std::vector<std::string>> by_prio;
    for (TaskIndex i : system.tasks_on(m)) by_prio[system.task(i).priority].push_back(system.task(i).id);
    for (const auto& [p, ids] : by_prio) {
      if (ids.size() < 2) continue;
      std::ostringstream os;
      os << "priority " << p << " shared on processor " << m << " by tasks";
      for (const auto& id : ids) os << ' ' << id;
      report(os.str());
    }
  }
  return out;
}

std::vector<std::string> validate(const System& system, const SpinAssignment& assignment) {
  std::vector<std::string> out = validate(system);
  const Priority top = system.max_priority();
  for (TaskIndex i = 0; i < system.tasks().size(); ++i) {
    const Task& t = system.task(i);
    for (const auto& [k, count] : t.requests) {
      if (k >= system.resources().size()) continue;
      auto p = assignment.get(i, k);
      const std::string pair = "spin priority (" + t.id + ", " + system.resource(k).id + ")";
      if (!p) {
        out.push_back(pair + ": missing");
      } else if (*p < t.priority || *p > top) {
        out.push_back(pair + " = " + std::to_string(*p) + " outside [" + std::to_string(t.priority) +
                      ", " + std::to_string(top) + "]");
      }
    }
    if (i < assignment.task_count()) {
      for (const auto& [k, p] : assignment.of(i)) {
        if (!t.requests.contains(k))
          out.push_back("spin priority for task " + t.id + " on a resource it does not request");
      }
    }
  }
  return out;
}

}  // namespace frap
