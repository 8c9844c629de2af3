#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "frap/blocking.hpp"
#include "frap/model.hpp"

namespace frap {

/// NoP_i^h: preemptions h can inflict during a window of length r_i.
std::int64_t nop(const System& system, TaskIndex i, TaskIndex h, Duration r_i);

/// E_i: sum over resources and remote processors of min(zeta, xi) * c^k.
Duration spin_delay(const System& system, TaskIndex i, const RequestCounts& counts);

/// I_i: sum over local higher-priority tasks of ceil(r_i / T_h) * C̄_h.
Duration interference(const System& system, TaskIndex i, Duration r_i);

/// Response-time terms of one task evaluated at window r_i.
struct ResponseTerms {
  Duration total_wcet{};
  Duration spin_delay{};
  Duration blocking{};  // B_i + W_i
  Duration interference{};

  Duration response() const { return total_wcet + spin_delay + blocking + interference; }
};

ResponseTerms evaluate_task(const System& system, const SpinAssignment& assignment, TaskIndex i, Duration r_i,
                            std::span<const Duration> response);

struct TaskRecord {
  Duration response{};
  Duration spin_delay{};
  Duration blocking{};  // B_i + W_i
  Duration interference{};
  Duration total_wcet{};
  bool schedulable = false;
  bool converged = false;
};

struct AnalysisReport {
  std::vector<TaskRecord> tasks;
  std::size_t iterations = 0;  // completed rounds
  std::chrono::duration<double, std::milli> elapsed{};
  bool verdict = false;
  /// The round cap was hit before a fixed point.
  bool diverged = false;
  /// R of every task after each round; filled when requested.
  std::vector<std::vector<Duration>> history;
};

struct AnalysisOptions {
  std::size_t max_rounds = 1000;
  /// Stop at the first deadline miss. When false, a task that misses keeps
  /// its first over-deadline response time and the others continue.
  bool stop_on_miss = true;
  bool record_history = false;
};

/// Iterative response-time analysis. Every task starts at R_i = C̄_i; each
/// round recomputes every task's response time to its own fixed point with the
/// other tasks' values taken from the previous round, until a round changes
/// nothing.
AnalysisReport analyze(const System& system, const SpinAssignment& assignment, const AnalysisOptions& options = {});

bool schedulable(const System& system, const SpinAssignment& assignment);

}  // namespace frap
