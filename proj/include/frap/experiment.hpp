#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "frap/assignment.hpp"
#include "frap/blocking.hpp"
#include "frap/flownet.hpp"
#include "frap/taskgen.hpp"

namespace frap {

enum class Protocol { frap, msrp, pwlp };
enum class SweepParam { N, M, A, L, rsf, K };

std::string to_string(Protocol p);
std::string to_string(SweepParam p);
std::optional<Protocol> parse_protocol(const std::string& name);
std::optional<SweepParam> parse_sweep_param(const std::string& name);

/// Spin priorities a protocol analyses a system with.
SpinAssignment spin_priorities_for(const System& system, Protocol protocol, AssignMode mode = AssignMode::approx);

struct ExperimentSpec {
  SweepParam param = SweepParam::N;
  /// For L the value is the upper end of the critical-section range in µs.
  std::vector<double> values;
  GenConfig baseline;
  std::size_t systems_per_point = 200;
  std::vector<Protocol> protocols{Protocol::frap, Protocol::msrp, Protocol::pwlp};
  std::uint64_t seed = 1;
  AssignMode mode = AssignMode::approx;
  /// 0 picks the hardware concurrency.
  std::size_t workers = 0;
};

std::vector<std::string> validate(const ExperimentSpec& spec);

/// Baseline with the swept field set to `value`.
GenConfig apply_sweep(const GenConfig& baseline, SweepParam param, double value);

/// Seed of system `index` at sweep point `point`. Shared by every protocol.
std::uint64_t system_seed(std::uint64_t spec_seed, std::size_t point, std::size_t index);

struct ResultRow {
  std::string param;
  double value = 0;
  Protocol protocol = Protocol::frap;
  std::size_t total = 0;
  std::size_t schedulable = 0;
  double ratio = 0;
  double mean_ms = 0;
  double p95_ms = 0;
};

std::string csv_header();
std::string csv_row(const ResultRow& row);

/// Runs every sweep point; `on_row` sees each row as soon as its point is
/// complete. Setting `cancel` stops after the current point. Throws
/// std::invalid_argument on an invalid spec.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const std::function<void(const ResultRow&)>& on_row = {},
                                      const std::atomic<bool>* cancel = nullptr);

struct OracleCase {
  BlockingCandidates candidates;
  PreemptionCounts nop;
};

/// Random candidate structure with at most `max_items` pooled items and at
/// most `max_preemptors` higher-priority tasks. Runs agree with the pool.
OracleCase random_oracle_case(std::mt19937_64& rng, std::size_t max_items, std::size_t max_preemptors = 4);

using BwSolver = std::function<Duration(const BlockingCandidates&, const PreemptionCounts&)>;

/// B + W from the flow network.
Duration flow_bw(const BlockingCandidates& candidates, const PreemptionCounts& nop, NetworkOptions options = {});

struct OracleTally {
  std::size_t total = 0;
  std::size_t equal = 0;
  std::optional<std::size_t> first_failure;
  /// Text of the first counterexample: expected and actual values followed by
  /// the network dump.
  std::string counterexample;
};

/// Compares `solver` (the flow solver by default) against brute_force_bw on
/// `count` random cases. The first counterexample is also written to
/// `dump_path` when one is given.
OracleTally run_oracle_check(std::size_t count, std::size_t max_items, std::uint64_t seed,
                             const BwSolver& solver = {}, const std::filesystem::path& dump_path = {});

}  // namespace frap
