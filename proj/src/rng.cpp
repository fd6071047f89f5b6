#include "cda/rng.hpp"

#include <cmath>
#include <numbers>

namespace cda {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::named(std::uint64_t master_seed, std::string_view name,
                           std::uint64_t index) {
  // FNV-1a over the name keeps stream ids stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return RngStream(mix64(mix64(master_seed) ^ mix64(h) ^ mix64(index + 0x51ed27ULL)));
}

std::uint64_t RngStream::next_u64() {
  return mix64(key_ ^ mix64(counter_++));
}

double RngStream::next_uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(next_uniform()));
  const double theta = 2.0 * std::numbers::pi * next_uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace cda
