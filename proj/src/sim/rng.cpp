#include "pacesim/sim/rng.h"

#include <algorithm>
#include <cmath>

namespace pacesim {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view name)
    : seed_(seed), engine_(splitmix64(seed ^ fnv1a(name))) {}

SimTime JitterModel::sample(RngStream& rng) const {
  if (!enabled()) {
    return kZeroTime;
  }
  const double ns = static_cast<double>(mean.count()) +
      static_cast<double>(stddev.count()) * rng.standardNormal();
  return SimTime{std::max<std::int64_t>(0, std::llround(ns))};
}

} // namespace pacesim
