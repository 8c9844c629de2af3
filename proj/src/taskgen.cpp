#include "frap/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace frap {
namespace {

constexpr std::size_t kAccessRedraws = 100;
constexpr std::int64_t kPeriodLo = 1'000'000;       // 1 ms
constexpr std::int64_t kPeriodHi = 1'000'000'000;   // 1000 ms

Duration critical_time(const std::map<ResourceIndex, std::int64_t>& requests, const std::vector<Resource>& res) {
  Duration total;
  for (const auto& [k, n] : requests) total += n * res[k].cs_len;
  return total;
}

std::map<ResourceIndex, std::int64_t> draw_requests(std::mt19937_64& rng, std::size_t resource_count,
                                                    std::int64_t accesses_max) {
  std::uniform_int_distribution<std::size_t> how_many(1, resource_count);
  std::vector<ResourceIndex> pool(resource_count);
  std::iota(pool.begin(), pool.end(), ResourceIndex{0});
  std::vector<ResourceIndex> picked;
  std::sample(pool.begin(), pool.end(), std::back_inserter(picked), how_many(rng), rng);
  std::uniform_int_distribution<std::int64_t> accesses(1, accesses_max);
  std::map<ResourceIndex, std::int64_t> out;
  for (ResourceIndex k : picked) out[k] = accesses(rng);
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> validate(const GenConfig& c) {
  std::vector<std::string> out;
  if (c.processors == 0) out.emplace_back("processors must be positive");
  if (c.tasks_per_proc == 0) out.emplace_back("tasks_per_proc must be positive");
  if (c.accesses_max < 1) out.emplace_back("accesses_max must be at least 1");
  if (c.cs_lo.ns() <= 0) out.emplace_back("cs_lo must be positive");
  if (c.cs_lo > c.cs_hi) out.emplace_back("cs_lo must not exceed cs_hi");
  if (!(c.rsf >= 0.0 && c.rsf <= 1.0)) out.emplace_back("rsf must be in [0,1]");
  if (!(c.util_factor > 0.0 && c.util_factor < 1.0)) out.emplace_back("util_factor must be in (0,1)");
  return out;
}

bool within_reference_bounds(const GenConfig& c) {
  return c.processors >= 2 && c.processors <= 20 && c.tasks_per_proc >= 1 && c.tasks_per_proc <= 8 &&
         c.accesses_max >= 1 && c.accesses_max <= 30 && c.rsf >= 0.1 && c.rsf <= 0.5;
}

std::vector<double> uunifast_discard(std::size_t n, double total, std::mt19937_64& rng, std::size_t* discarded,
                                     std::size_t max_attempts) {
  if (n == 0) return {};
  if (total <= 0.0 || total > static_cast<double>(n)) throw std::invalid_argument("uunifast_discard: total out of range");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    double remaining = total;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double next = remaining * std::pow(unit(rng), 1.0 / static_cast<double>(n - j - 1));
      out[j] = remaining - next;
      remaining = next;
    }
    out[n - 1] = remaining;
    if (std::all_of(out.begin(), out.end(), [](double u) { return u > 0.0 && u < 1.0; })) return out;
    if (n == 1 && total == 1.0) break;
    if (discarded) ++*discarded;
  }
  throw std::runtime_error("uunifast_discard: retry cap exceeded");
}

std::vector<double> uunifast_discard(std::size_t n, double total, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return uunifast_discard(n, total, rng);
}

GenReport generate(const GenConfig& config) {
  if (auto errors = validate(config); !errors.empty()) throw std::invalid_argument("generate: " + errors.front());
  GenReport report;
  std::mt19937_64 rng(config.seed);
  const std::size_t n = config.processors * config.tasks_per_proc;

  const double total_util = config.util_factor * static_cast<double>(n);
  const auto util = uunifast_discard(n, total_util, rng, &report.discarded);

  std::uniform_real_distribution<double> log_period(std::log(static_cast<double>(kPeriodLo)),
                                                    std::log(static_cast<double>(kPeriodHi)));
  std::vector<Task> tasks(n);
  std::vector<Duration> total_wcet(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto period = static_cast<std::int64_t>(std::llround(std::exp(log_period(rng))));
    period = std::clamp(period, kPeriodLo, kPeriodHi);
    tasks[j].id = "t" + std::to_string(j + 1);
    tasks[j].period = Duration(period);
    tasks[j].deadline = tasks[j].period;
    total_wcet[j] = Duration(std::llround(util[j] * static_cast<double>(period)));
  }

  // Deadline-monotonic; earlier generation index wins ties. Values n..1.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tasks[a].deadline < tasks[b].deadline; });
  for (std::size_t rank = 0; rank < n; ++rank) tasks[order[rank]].priority = static_cast<Priority>(n - rank);

  // Worst-fit decreasing on utilization.
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return util[a] > util[b]; });
  std::vector<double> load(config.processors, 0.0);
  for (std::size_t j : order) {
    const auto m = static_cast<ProcessorIndex>(std::min_element(load.begin(), load.end()) - load.begin());
    tasks[j].processor = m;
    load[m] += util[j];
  }

  std::vector<Resource> resources;
  std::uniform_int_distribution<std::int64_t> cs(config.cs_lo.ns(), config.cs_hi.ns());
  for (std::size_t k = 0; k < config.resource_count; ++k)
    resources.push_back(Resource{"r" + std::to_string(k + 1), Duration(cs(rng))});

  std::size_t users = 0;
  if (!resources.empty()) {
    users = static_cast<std::size_t>(std::ceil(config.rsf * static_cast<double>(n) - 1e-9));
    users = std::min(users, n);
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), users, rng);

  for (std::size_t j : chosen) {
    auto requests = draw_requests(rng, resources.size(), config.accesses_max);
    for (std::size_t redraw = 0; critical_time(requests, resources) > total_wcet[j] && redraw < kAccessRedraws;
         ++redraw) {
      requests = draw_requests(rng, resources.size(), config.accesses_max);
      ++report.retries;
    }
    while (critical_time(requests, resources) > total_wcet[j]) {
      bool shrunk = false;
      for (auto& [k, count] : requests) {
        if (count > 1) {
          count = std::max<std::int64_t>(1, count / 2);
          shrunk = true;
        }
      }
      if (shrunk) continue;
      // Every count is 1: drop the longest critical section.
      auto longest = std::max_element(requests.begin(), requests.end(), [&](const auto& a, const auto& b) {
        return resources[a.first].cs_len < resources[b.first].cs_len;
      });
      requests.erase(longest);
    }
    tasks[j].requests = std::move(requests);
  }

  for (std::size_t j = 0; j < n; ++j) tasks[j].pure_wcet = total_wcet[j] - critical_time(tasks[j].requests, resources);

  report.system = System(config.processors, std::move(tasks), std::move(resources));
  return report;
}

}  // namespace frap
