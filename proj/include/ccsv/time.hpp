#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ccsv {

/// A UTC instant with millisecond resolution.
class Instant {
 public:
  constexpr Instant() = default;
  static constexpr Instant from_epoch_millis(std::int64_t ms) { return Instant(ms); }
  static constexpr Instant from_epoch_seconds(std::int64_t s) { return Instant(s * 1000); }

  constexpr std::int64_t epoch_millis() const { return millis_; }

  /// ISO 8601 UTC, "YYYY-MM-DDTHH:MM:SSZ" with ".mmm" only when non-zero.
  std::string to_iso8601() const;

  friend constexpr auto operator<=>(Instant, Instant) = default;

 private:
  constexpr explicit Instant(std::int64_t ms) : millis_(ms) {}
  std::int64_t millis_ = 0;
};

/// Parses "YYYY-MM-DDTHH:MM:SS[.fraction][Z|+HH:MM|-HH:MM]". A missing zone
/// designator is read as UTC.
std::optional<Instant> parse_iso8601(std::string_view text);

/// Parses an ISO 8601 timestamp or a signed integer count of epoch seconds.
std::optional<Instant> parse_timestamp_cell(std::string_view text);

}  // namespace ccsv
