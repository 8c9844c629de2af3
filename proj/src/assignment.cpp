#include "frap/assignment.hpp"

#include <algorithm>
#include <set>

#include "frap/blocking.hpp"
#include "frap/rta.hpp"

namespace frap {
namespace {

Rate positive_part(Rate r) { return r > 0 ? r : Rate(0); }

Rate per_ns(std::int64_t count, Duration period) { return Rate(count, period.ns()); }

}  // namespace

FrequencyModel::FrequencyModel(const System& system) : system_(&system) {
  const std::size_t n = system.tasks().size();
  const std::size_t resources = system.resources().size();
  inv_period_.reserve(n);
  for (const auto& t : system.tasks()) inv_period_.push_back(per_ns(1, t.period));

  remote_own_.assign(system.processor_count(), std::vector<Rate>(resources, Rate(0)));
  remote_count_.assign(system.processor_count(), std::vector<std::int64_t>(resources, 0));
  users_.assign(resources, {});
  for (TaskIndex j = 0; j < n; ++j) {
    const Task& t = system.task(j);
    for (const auto& [k, count] : t.requests) {
      remote_own_[t.processor][k] += per_ns(count, t.period);
      remote_count_[t.processor][k] += count;
    }
  }
  for (ResourceIndex k = 0; k < resources; ++k)
    for (ProcessorIndex m = 0; m < system.processor_count(); ++m)
      if (remote_count_[m][k] > 0) users_[k].push_back(m);

  local_.assign(n, std::vector<Rate>(resources, Rate(0)));
  for (TaskIndex i = 0; i < n; ++i) {
    auto add = [&](TaskIndex x) {
      for (const auto& [k, count] : system.task(x).requests) local_[i][k] += per_ns(count, system.task(x).period);
    };
    add(i);
    for (TaskIndex h : system.lhp(i)) add(h);
  }
}

const Rate& FrequencyModel::local_rate(TaskIndex i, ResourceIndex k) const { return local_.at(i).at(k); }

Rate FrequencyModel::remote_rate(TaskIndex i, ProcessorIndex m, ResourceIndex k) const {
  return remote_own_.at(m).at(k) + remote_count_[m][k] * inv_period_.at(i);
}

Rate FrequencyModel::preemption_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const {
  // Lowest spin priority used on k by the task or its local higher-priority tasks.
  std::optional<Priority> lowest;
  auto consider = [&](TaskIndex x) {
    if (system_->task(x).requests_for(k) == 0) return;
    const Priority p = assignment.at(x, k);
    if (!lowest || p < *lowest) lowest = p;
  };
  consider(i);
  for (TaskIndex h : system_->lhp(i)) consider(h);
  Rate total(0);
  if (!lowest) return total;
  for (TaskIndex h : system_->lhp(i))
    if (system_->task(h).priority > *lowest) total += inv_period_[h];
  return total;
}

Rate FrequencyModel::spin_rate(TaskIndex i, ResourceIndex k) const {
  const ProcessorIndex home = system_->task(i).processor;
  const Rate& local = local_rate(i, k);
  Rate total(0);
  if (local == 0) return total;
  for (ProcessorIndex m : users_[k])
    if (m != home) total += std::min(local, remote_rate(i, m, k));
  return total;
}

Rate FrequencyModel::additional_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const {
  const Rate preempt = preemption_rate(assignment, i, k);
  Rate total(0);
  if (preempt == 0) return total;
  const ProcessorIndex home = system_->task(i).processor;
  for (ProcessorIndex m : users_[k])
    if (m != home) total += std::min(preempt, positive_part(remote_rate(i, m, k) - local_rate(i, k)));
  return total;
}

Rate FrequencyModel::arrival_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const {
  Rate total = inv_period_[i];
  if (!propagates_remote(*system_, assignment, i, k)) return total;
  const Rate preempt = preemption_rate(assignment, i, k);
  const ProcessorIndex home = system_->task(i).processor;
  for (ProcessorIndex m : users_[k]) {
    if (m == home) continue;
    total += std::min(inv_period_[i], positive_part(remote_rate(i, m, k) - local_rate(i, k) - preempt));
  }
  return total;
}

Rate FrequencyModel::blocking_estimate(const SpinAssignment& assignment, TaskIndex i) const {
  Rate spin(0);
  Rate additional(0);
  for (ResourceIndex k = 0; k < system_->resources().size(); ++k) {
    const std::int64_t cs = system_->resource(k).cs_len.ns();
    spin += spin_rate(i, k) * cs;
    additional += additional_rate(assignment, i, k) * cs;
  }
  Rate arrival(0);
  for (ResourceIndex k : arrival_candidate_resources(*system_, assignment, i))
    arrival = std::max(arrival, arrival_rate(assignment, i, k) * system_->resource(k).cs_len.ns());
  return (spin + additional + arrival) * system_->task(i).period.ns();
}

bool local_rate_dominates(const FrequencyModel& model, TaskIndex i, ResourceIndex k) {
  const System& system = model.system();
  const ProcessorIndex home = system.task(i).processor;
  for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
    if (m == home) continue;
    if (model.local_rate(i, k) < model.remote_rate(i, m, k)) return false;
  }
  return true;
}

bool local_rate_dominates(const System& system, TaskIndex i, ResourceIndex k) {
  return local_rate_dominates(FrequencyModel(system), i, k);
}

SpinAssignment preset(const System& system, Preset which) {
  SpinAssignment a(system.tasks().size());
  const Priority top = system.max_priority();
  std::optional<FrequencyModel> model;
  if (which == Preset::frap_initial) model.emplace(system);
  for (TaskIndex i = 0; i < system.tasks().size(); ++i) {
    const Priority base = system.task(i).priority;
    for (const auto& [k, n] : system.task(i).requests) {
      switch (which) {
        case Preset::msrp: a.set(i, k, top); break;
        case Preset::pwlp: a.set(i, k, base); break;
        case Preset::frap_initial: a.set(i, k, local_rate_dominates(*model, i, k) ? base : top); break;
      }
    }
  }
  return a;
}

Rate psi(const FrequencyModel& model, const SpinAssignment& assignment, TaskIndex i) {
  return model.blocking_estimate(assignment, i);
}

Duration slack(const System& system, TaskIndex i) {
  const Task& t = system.task(i);
  Duration left = t.deadline - system.total_wcet(i);
  for (TaskIndex h : system.lhp(i)) left -= ceil_div(t.period, system.task(h).period) * system.total_wcet(h);
  return std::max(left, Duration{});
}

std::optional<ResourceIndex> maxk_arrival(const FrequencyModel& model, const SpinAssignment& assignment,
                                          TaskIndex i) {
  std::optional<ResourceIndex> best;
  Rate best_value(0);
  for (ResourceIndex k : arrival_candidate_resources(model.system(), assignment, i)) {
    const Rate v = model.arrival_rate(assignment, i, k) * model.system().resource(k).cs_len.ns();
    if (!best || v > best_value) {
      best = k;
      best_value = v;
    }
  }
  return best;
}

SpinAssignment assign(const System& system, AssignMode mode) {
  SpinAssignment a = preset(system, Preset::frap_initial);
  const FrequencyModel model(system);

  auto overloaded = [&](TaskIndex i) {
    if (mode == AssignMode::approx) return psi(model, a, i) > Rate(slack(system, i).ns());
    const auto report = analyze(system, a, {.stop_on_miss = false});
    return report.tasks[i].response > system.task(i).deadline;
  };

  for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
    for (TaskIndex i : system.tasks_on(m)) {
      const Priority p = system.task(i).priority;
      std::set<ResourceIndex> targets;
      for (TaskIndex l : system.llp(i))
        for (const auto& [k, n] : system.task(l).requests)
          if (system.is_global(k) && a.at(l, k) >= p) targets.insert(k);

      while (!targets.empty() && overloaded(i)) {
        const auto k = maxk_arrival(model, a, i);
        if (!k || !targets.contains(*k)) break;
        for (TaskIndex l : system.llp(i))
          if (system.task(l).requests_for(*k) > 0) a.set(l, *k, std::min(a.at(l, *k), p - 1));
        targets.erase(*k);
      }
    }
  }
  return a;
}

}  // namespace frap
