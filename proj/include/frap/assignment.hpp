#pragma once

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "frap/model.hpp"

namespace frap {

/// Requests per nanosecond, kept exact.
using Rate = boost::multiprecision::cpp_rational;

enum class Preset { frap_initial, msrp, pwlp };
enum class AssignMode { approx, exact };

/// MSRP spins at P̂, PWLP at the base priority, frap_initial applies the
/// frequency test of local_rate_dominates pair by pair.
SpinAssignment preset(const System& system, Preset which);

/// Access-frequency view of a system used by the spin priority search. All
/// rates are relative to one analysed task i: remote rates include the
/// back-to-back term N_j / T_i.
class FrequencyModel {
 public:
  explicit FrequencyModel(const System& system);

  const System& system() const { return *system_; }

  /// phi^k(i ∪ lhp(i)).
  const Rate& local_rate(TaskIndex i, ResourceIndex k) const;
  /// phi^k(Γ_m) = sum_j N_j^k / T_j + N_j^k / T_i.
  Rate remote_rate(TaskIndex i, ProcessorIndex m, ResourceIndex k) const;
  /// sum of 1 / T_h over Γ_i^k, the local tasks able to preempt spinning on k
  /// by the task or its local higher-priority tasks.
  Rate preemption_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const;

  Rate spin_rate(TaskIndex i, ResourceIndex k) const;                                        // ẽ
  Rate additional_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const;  // w̃
  Rate arrival_rate(const SpinAssignment& assignment, TaskIndex i, ResourceIndex k) const;     // b̃

  /// Ψ(τ_i): estimated blocking per release, in nanoseconds.
  Rate blocking_estimate(const SpinAssignment& assignment, TaskIndex i) const;

 private:
  const System* system_;
  std::vector<Rate> inv_period_;                         // 1 / T per task
  std::vector<std::vector<Rate>> local_;                 // [task][resource]
  std::vector<std::vector<Rate>> remote_own_;            // [proc][resource]: sum N_j / T_j
  std::vector<std::vector<std::int64_t>> remote_count_;  // [proc][resource]: sum N_j
  std::vector<std::vector<ProcessorIndex>> users_;       // [resource]: processors requesting it
};

/// Frequency form of "zeta >= xi on every remote processor".
bool local_rate_dominates(const FrequencyModel& model, TaskIndex i, ResourceIndex k);
bool local_rate_dominates(const System& system, TaskIndex i, ResourceIndex k);

/// Ψ(τ_i) for the current assignment.
Rate psi(const FrequencyModel& model, const SpinAssignment& assignment, TaskIndex i);

/// S_i = max(0, D_i - C̄_i - sum_lhp ceil(T_i / T_h) C̄_h).
Duration slack(const System& system, TaskIndex i);

/// Arrival-candidate resource with the largest b̃ * c^k; lowest index on ties.
std::optional<ResourceIndex> maxk_arrival(const FrequencyModel& model, const SpinAssignment& assignment,
                                          TaskIndex i);

/// Spin priority assignment: initialise each pair at P_i or P̂, then walk each
/// processor's tasks from the highest priority down, lowering the spin
/// priority of lower-priority local requesters of the dominant arrival
/// resource to P_i - 1 while the task looks overloaded.
/// approx: overload is Ψ(τ_i) > S_i. exact: overload is R_i > D_i by analysis.
SpinAssignment assign(const System& system, AssignMode mode = AssignMode::approx);

}  // namespace frap
