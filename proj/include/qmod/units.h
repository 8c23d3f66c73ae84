#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qmod {

// Simulation clock unit. All durations at API boundaries are integer nanoseconds.
using Nanos = std::int64_t;

inline constexpr Nanos kNanosPerMicro = 1'000;
inline constexpr Nanos kNanosPerMilli = 1'000'000;
inline constexpr Nanos kNanosPerSecond = 1'000'000'000;

// Parses "2.5us", "100ns", "1ms", "3s" (optional whitespace before the unit).
// The value must land on a whole nanosecond; "0.5ns" is rejected, not rounded.
// Throws ConfigError on malformed input.
Nanos parse_duration(std::string_view text);

// Canonical text form used when re-serializing configs: "<n>ns".
std::string format_duration(Nanos ns);

// Half-up rounding used wherever an analytic real crosses into the integer clock.
Nanos round_half_up(double ns);

}  // namespace qmod
