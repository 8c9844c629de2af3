#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "frap/model.hpp"

namespace frap {

struct GenConfig {
  std::size_t processors = 12;
  std::size_t tasks_per_proc = 5;
  std::int64_t accesses_max = 5;
  Duration cs_lo = Duration::from_us(1);
  Duration cs_hi = Duration::from_us(100);
  double rsf = 0.4;
  std::size_t resource_count = 12;
  /// Total utilization is this times processors times tasks_per_proc.
  double util_factor = 0.1;
  std::uint64_t seed = 1;
};

/// Hard errors that make generation impossible.
std::vector<std::string> validate(const GenConfig& config);

/// Whether every field lies inside the ranges used by the reference setup:
/// M in [2,20], N in [1,8], A in [1,30], rsf in [0.1,0.5].
bool within_reference_bounds(const GenConfig& config);

struct GenReport {
  System system;
  std::size_t retries = 0;    // access redraws
  std::size_t discarded = 0;  // rejected utilization vectors
  std::string rng = "mt19937_64";
};

/// Utilizations for n tasks summing to `total`, each in (0, 1). Vectors with
/// an out-of-range entry are redrawn whole. Throws std::runtime_error after
/// `max_attempts` rejections.
std::vector<double> uunifast_discard(std::size_t n, double total, std::mt19937_64& rng,
                                     std::size_t* discarded = nullptr, std::size_t max_attempts = 100000);
std::vector<double> uunifast_discard(std::size_t n, double total, std::uint64_t seed);

/// Deterministic in the config, including the seed. Throws
/// std::invalid_argument when validate(config) is not empty.
GenReport generate(const GenConfig& config);

/// Stateless 64-bit mixer used to derive independent per-system seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace frap
