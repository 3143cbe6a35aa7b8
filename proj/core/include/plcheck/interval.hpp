#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace plcheck {

/// Closed integer interval [lo, hi] measured in days. `hi == kInfinity`
/// stands for an open upper bound. lo > hi is representable and denotes the
/// empty interval.
struct Interval {
  static constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();

  std::int64_t lo = 0;
  std::int64_t hi = kInfinity;

  constexpr bool empty() const noexcept { return lo > hi; }
  constexpr bool unbounded() const noexcept { return hi == kInfinity; }
  constexpr bool contains(std::int64_t v) const noexcept { return lo <= v && v <= hi; }

  /// Closed containment; the empty interval is contained in everything.
  constexpr bool within(const Interval& outer) const noexcept {
    return empty() || (outer.lo <= lo && hi <= outer.hi);
  }

  static constexpr Interval all() noexcept { return {0, kInfinity}; }

  auto operator<=>(const Interval&) const = default;
};

constexpr Interval intersect_intervals(const Interval& a, const Interval& b) noexcept {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Renders as `[365d, 1825d]`, `[0d, *]`.
std::string to_string(const Interval& iv);

}  // namespace plcheck
