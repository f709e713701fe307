#include "fograph/rng.hpp"

#include <cmath>
#include <numbers>

namespace fograph {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t RngStream::derive_seed(std::uint64_t root_seed, std::string_view component,
                                     std::string_view id) {
  std::uint64_t s = splitmix64(root_seed ^ fnv1a(component));
  return splitmix64(s ^ fnv1a(id));
}

RngStream::RngStream(std::uint64_t root_seed, std::string_view component, std::string_view id)
    : engine_(derive_seed(root_seed, component, id)) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::next_int(std::int64_t lo, std::int64_t hi) {
  if (lo >= hi) {
    return lo;
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

double RngStream::next_gaussian(double mean, double stddev) {
  double u1;
  do {
    u1 = next_unit();
  } while (u1 <= 0.0);
  const double u2 = next_unit();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

}  // namespace fograph
