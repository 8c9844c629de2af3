#include "frap/rta.hpp"

#include <algorithm>

#include "frap/flownet.hpp"

namespace frap {

std::int64_t nop(const System& system, TaskIndex, TaskIndex h, Duration r_i) {
  return ceil_div(r_i, system.task(h).period);
}

Duration spin_delay(const System& system, TaskIndex i, const RequestCounts& counts) {
  const ProcessorIndex home = system.task(i).processor;
  Duration total;
  for (ResourceIndex k = 0; k < system.resources().size(); ++k) {
    std::int64_t remote = 0;
    for (ProcessorIndex m = 0; m < system.processor_count(); ++m) {
      if (m != home) remote += std::min(counts.zeta[k], counts.xi[k][m]);
    }
    total += remote * system.resource(k).cs_len;
  }
  return total;
}

Duration interference(const System& system, TaskIndex i, Duration r_i) {
  Duration total;
  for (TaskIndex h : system.lhp(i)) total += ceil_div(r_i, system.task(h).period) * system.total_wcet(h);
  return total;
}

ResponseTerms evaluate_task(const System& system, const SpinAssignment& assignment, TaskIndex i, Duration r_i,
                            std::span<const Duration> response) {
  const RequestCounts counts = request_counts(system, i, r_i, response);
  const auto queues = build_blocking_queues(system, i, counts);
  return ResponseTerms{
      .total_wcet = system.total_wcet(i),
      .spin_delay = spin_delay(system, i, counts),
      .blocking = bound_bw(system, assignment, i, queues, r_i),
      .interference = interference(system, i, r_i),
  };
}

AnalysisReport analyze(const System& system, const SpinAssignment& assignment, const AnalysisOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = system.tasks().size();
  AnalysisReport report;
  report.tasks.resize(n);

  auto finish = [&](bool verdict) {
    report.verdict = verdict;
    report.elapsed = std::chrono::steady_clock::now() - started;
    return report;
  };

  std::vector<Duration> response(n);
  bool trivially_late = false;
  for (TaskIndex i = 0; i < n; ++i) {
    auto& rec = report.tasks[i];
    rec.total_wcet = system.total_wcet(i);
    rec.response = rec.total_wcet;
    response[i] = rec.total_wcet;
    if (rec.total_wcet > system.task(i).deadline) trivially_late = true;
  }
  if (trivially_late) return finish(false);

  std::vector<bool> missed(n, false);
  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    std::vector<Duration> next = response;
    for (TaskIndex i = 0; i < n; ++i) {
      if (missed[i]) continue;
      const Duration deadline = system.task(i).deadline;
      Duration r = response[i];
      for (;;) {
        const ResponseTerms terms = evaluate_task(system, assignment, i, r, response);
        const Duration updated = terms.response();
        auto& rec = report.tasks[i];
        rec.response = updated;
        rec.spin_delay = terms.spin_delay;
        rec.blocking = terms.blocking;
        rec.interference = terms.interference;
        if (updated > deadline) {
          missed[i] = true;
          rec.schedulable = false;
          rec.converged = false;
          break;
        }
        if (updated == r) break;
        r = updated;
      }
      next[i] = report.tasks[i].response;
      if (missed[i] && options.stop_on_miss) {
        report.iterations = round;
        if (options.record_history) report.history.push_back(next);
        return finish(false);
      }
    }
    report.iterations = round;
    if (options.record_history) report.history.push_back(next);
    const bool stable = next == response;
    response = std::move(next);
    if (stable) {
      bool all_met = true;
      for (TaskIndex i = 0; i < n; ++i) {
        report.tasks[i].converged = !missed[i];
        report.tasks[i].schedulable = !missed[i];
        all_met = all_met && !missed[i];
      }
      return finish(all_met);
    }
  }
  report.diverged = true;
  return finish(false);
}

bool schedulable(const System& system, const SpinAssignment& assignment) {
  return analyze(system, assignment).verdict;
}

}  // namespace frap
