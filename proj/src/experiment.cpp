#include "frap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "frap/rta.hpp"

namespace frap {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::frap: return "frap";
    case Protocol::msrp: return "msrp";
    case Protocol::pwlp: return "pwlp";
  }
  return "?";
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::N: return "N";
    case SweepParam::M: return "M";
    case SweepParam::A: return "A";
    case SweepParam::L: return "L";
    case SweepParam::rsf: return "rsf";
    case SweepParam::K: return "K";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(const std::string& name) {
  for (auto p : {Protocol::frap, Protocol::msrp, Protocol::pwlp})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
  for (auto p : {SweepParam::N, SweepParam::M, SweepParam::A, SweepParam::L, SweepParam::rsf, SweepParam::K})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

SpinAssignment spin_priorities_for(const System& system, Protocol protocol, AssignMode mode) {
  switch (protocol) {
    case Protocol::msrp: return preset(system, Preset::msrp);
    case Protocol::pwlp: return preset(system, Preset::pwlp);
    case Protocol::frap: break;
  }
  return assign(system, mode);
}

GenConfig apply_sweep(const GenConfig& baseline, SweepParam param, double value) {
  GenConfig c = baseline;
  const auto whole = static_cast<std::int64_t>(std::llround(value));
  switch (param) {
    case SweepParam::N: c.tasks_per_proc = static_cast<std::size_t>(std::max<std::int64_t>(whole, 0)); break;
    case SweepParam::M: c.processors = static_cast<std::size_t>(std::max<std::int64_t>(whole, 0)); break;
    case SweepParam::A: c.accesses_max = whole; break;
    case SweepParam::L: c.cs_hi = Duration(std::llround(value * 1000.0)); break;
    case SweepParam::rsf: c.rsf = value; break;
    case SweepParam::K: c.resource_count = static_cast<std::size_t>(std::max<std::int64_t>(whole, 0)); break;
  }
  return c;
}

std::vector<std::string> validate(const ExperimentSpec& spec) {
  std::vector<std::string> out;
  if (spec.values.empty()) out.emplace_back("no sweep values");
  if (spec.protocols.empty()) out.emplace_back("no protocols");
  if (spec.systems_per_point == 0) out.emplace_back("systems_per_point must be positive");
  const bool integral = spec.param != SweepParam::rsf && spec.param != SweepParam::L;
  for (double v : spec.values) {
    std::ostringstream where;
    where << to_string(spec.param) << '=' << v << ": ";
    if (integral && (v < 0 || v != std::floor(v))) {
      out.push_back(where.str() + "must be a non-negative integer");
      continue;
    }
    const GenConfig c = apply_sweep(spec.baseline, spec.param, v);
    for (const auto& e : validate(c)) out.push_back(where.str() + e);
    if (!within_reference_bounds(c)) out.push_back(where.str() + "outside the supported generator ranges");
  }
  return out;
}

std::uint64_t system_seed(std::uint64_t spec_seed, std::size_t point, std::size_t index) {
  return splitmix64(splitmix64(spec_seed ^ splitmix64(point)) + index);
}

std::string csv_header() { return "param,value,protocol,total,schedulable,ratio,mean_ms,p95_ms"; }

std::string csv_row(const ResultRow& r) {
  std::ostringstream os;
  os << r.param << ',' << r.value << ',' << to_string(r.protocol) << ',' << r.total << ',' << r.schedulable << ','
     << r.ratio << ',' << r.mean_ms << ',' << r.p95_ms;
  return os.str();
}

namespace {

struct Outcome {
  bool schedulable = false;
  double ms = 0;
};

// Runs job(index) for index in [0, count) across `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t j; (j = next++) < count;) {
      try {
        job(j);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const std::function<void(const ResultRow&)>& on_row,
                                      const std::atomic<bool>* cancel) {
  if (auto errors = validate(spec); !errors.empty()) throw std::invalid_argument("experiment: " + errors.front());
  const std::size_t workers =
      spec.workers ? spec.workers : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t np = spec.protocols.size();

  std::vector<ResultRow> rows;
  for (std::size_t point = 0; point < spec.values.size(); ++point) {
    if (cancel && cancel->load()) break;
    const GenConfig base = apply_sweep(spec.baseline, spec.param, spec.values[point]);
    std::vector<Outcome> outcomes(spec.systems_per_point * np);
    parallel_for(spec.systems_per_point, workers, [&](std::size_t s) {
      GenConfig c = base;
      c.seed = system_seed(spec.seed, point, s);
      const System system = generate(c).system;
      for (std::size_t p = 0; p < np; ++p) {
        const SpinAssignment a = spin_priorities_for(system, spec.protocols[p], spec.mode);
        const AnalysisReport report = analyze(system, a);
        outcomes[s * np + p] = Outcome{report.verdict, report.elapsed.count()};
      }
    });

    for (std::size_t p = 0; p < np; ++p) {
      ResultRow row{to_string(spec.param), spec.values[point], spec.protocols[p]};
      std::vector<double> times;
      for (std::size_t s = 0; s < spec.systems_per_point; ++s) {
        const Outcome& o = outcomes[s * np + p];
        row.schedulable += o.schedulable ? 1 : 0;
        times.push_back(o.ms);
      }
      row.total = spec.systems_per_point;
      row.ratio = static_cast<double>(row.schedulable) / static_cast<double>(row.total);
      row.mean_ms = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
      row.p95_ms = percentile95(std::move(times));
      if (on_row) on_row(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

OracleCase random_oracle_case(std::mt19937_64& rng, std::size_t max_items, std::size_t max_preemptors) {
  auto uniform = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  auto coin = [&] { return uniform(0, 1) == 1; };

  OracleCase out;
  const auto resources = static_cast<std::size_t>(uniform(1, 4));
  std::vector<std::size_t> per_resource(resources, 0);
  for (auto n = uniform(0, static_cast<std::int64_t>(max_items)); n > 0; --n)
    ++per_resource[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(resources) - 1))];

  // Pool: per resource, a non-increasing queue tail with repeated values.
  for (ResourceIndex k = 0; k < resources; ++k) {
    const std::size_t n = per_resource[k];
    if (n == 0) continue;
    std::vector<std::int64_t> values(n);
    for (auto& v : values) v = uniform(1, 6) * 5;
    std::sort(values.rbegin(), values.rend());
    std::size_t index = static_cast<std::size_t>(uniform(1, 3));
    std::vector<ItemRun> runs;
    for (std::int64_t v : values) {
      if (!runs.empty() && runs.back().value.ns() == v) {
        ++runs.back().count;
      } else {
        runs.push_back(ItemRun{k, index, 1, Duration(v)});
      }
      ++index;
    }
    out.candidates.items[k] = std::move(runs);
  }

  for (ResourceIndex k = 0; k < resources; ++k) {
    if (!coin()) continue;
    ArrivalCandidate a{k, Duration(uniform(1, 8) * 5), {}};
    auto pooled = out.candidates.items.find(k);
    if (pooled != out.candidates.items.end() && coin()) a.remote = pooled->second;
    out.candidates.arrival.push_back(std::move(a));
  }

  const auto preemptors = static_cast<std::size_t>(uniform(1, static_cast<std::int64_t>(std::max<std::size_t>(max_preemptors, 1))));
  for (TaskIndex h = 0; h < preemptors; ++h) {
    std::vector<ItemRun> runs;
    for (const auto& [k, pool] : out.candidates.items)
      if (coin()) runs.insert(runs.end(), pool.begin(), pool.end());
    if (runs.empty()) continue;
    out.candidates.additional[h] = std::move(runs);
    out.nop[h] = uniform(1, 3);
  }
  return out;
}

Duration flow_bw(const BlockingCandidates& candidates, const PreemptionCounts& nop, NetworkOptions options) {
  auto net = build_network(candidates, nop, options);
  return solve_max_cost_max_flow(net).cost;
}

OracleTally run_oracle_check(std::size_t count, std::size_t max_items, std::uint64_t seed, const BwSolver& solver,
                             const std::filesystem::path& dump_path) {
  const BwSolver solve = solver ? solver : [](const BlockingCandidates& c, const PreemptionCounts& n) {
    return flow_bw(c, n);
  };
  std::mt19937_64 rng(seed);
  OracleTally tally;
  for (std::size_t j = 0; j < count; ++j) {
    const OracleCase oc = random_oracle_case(rng, max_items);
    const Duration expected = brute_force_bw(oc.candidates, oc.nop, std::max(max_items, kBruteForceItemLimit));
    const Duration actual = solve(oc.candidates, oc.nop);
    ++tally.total;
    if (actual == expected) {
      ++tally.equal;
      continue;
    }
    if (tally.first_failure) continue;
    tally.first_failure = j;
    std::ostringstream os;
    os << "case " << j << " expected " << expected.ns() << " actual " << actual.ns() << '\n';
    os << build_network(oc.candidates, oc.nop).dump();
    tally.counterexample = os.str();
    if (!dump_path.empty()) {
      std::ofstream out(dump_path);
      if (!out) throw std::runtime_error("cannot write " + dump_path.string());
      out << tally.counterexample;
    }
  }
  return tally;
}

}  // namespace frap
