#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace frap {

/// Integer nanosecond time quantity. Every time value in the model (WCETs,
/// periods, critical sections, response times, blocking) uses this type so
/// fixed-point comparisons are exact.
class Duration {
 public:
  constexpr Duration() = default;
  constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}

  static constexpr Duration from_us(std::int64_t us) { return Duration(us * 1000); }
  static constexpr Duration from_ms(std::int64_t ms) { return Duration(ms * 1000000); }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double us() const { return static_cast<double>(ns_) / 1e3; }

  constexpr auto operator<=>(const Duration&) const = default;

  constexpr Duration& operator+=(Duration o) {
    ns_ += o.ns_;
    return *this;
  }
  constexpr Duration& operator-=(Duration o) {
    ns_ -= o.ns_;
    return *this;
  }

  friend constexpr Duration operator+(Duration a, Duration b) { return Duration(a.ns_ + b.ns_); }
  friend constexpr Duration operator-(Duration a, Duration b) { return Duration(a.ns_ - b.ns_); }
  friend constexpr Duration operator*(std::int64_t n, Duration d) { return Duration(n * d.ns_); }
  friend constexpr Duration operator*(Duration d, std::int64_t n) { return Duration(n * d.ns_); }

  friend std::ostream& operator<<(std::ostream& os, Duration d) { return os << d.ns_ << "ns"; }

 private:
  std::int64_t ns_ = 0;
};

/// ceil(a / b) for a >= 0, b > 0, without floating point.
constexpr std::int64_t ceil_div(Duration a, Duration b) {
  return (a.ns() + b.ns() - 1) / b.ns();
}

}  // namespace frap
