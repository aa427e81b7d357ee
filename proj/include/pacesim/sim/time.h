#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace pacesim {

// Simulation clock: integer nanoseconds since the start of a run.
using SimTime = std::chrono::nanoseconds;

using namespace std::chrono_literals;

inline constexpr SimTime kZeroTime{0};
inline constexpr SimTime kInfiniteTime{INT64_MAX};

inline constexpr double toSeconds(SimTime t) {
  return static_cast<double>(t.count()) * 1e-9;
}

inline constexpr double toMillis(SimTime t) {
  return static_cast<double>(t.count()) * 1e-6;
}

inline SimTime fromSeconds(double seconds) {
  return SimTime{std::llround(seconds * 1e9)};
}

// Time to put `bytes` on a link of `bitsPerSecond`, rounded to the nearest ns.
inline SimTime serializationTime(std::uint64_t bytes, double bitsPerSecond) {
  return SimTime{std::llround(static_cast<double>(bytes) * 8e9 / bitsPerSecond)};
}

// Per-packet pacing interval for a rate in bytes per second, rounded to the
// nearest ns. At 40 Mbit/s a 1500 B packet maps to exactly 300000 ns, so a
// 100 MiB transfer accumulates no drift; for rates where the quotient is not
// integral the error is below 0.5 ns per packet.
inline SimTime pacingInterval(std::uint64_t bytes, double bytesPerSecond) {
  return SimTime{std::llround(static_cast<double>(bytes) * 1e9 / bytesPerSecond)};
}

} // namespace pacesim
