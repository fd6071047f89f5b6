#pragma once

#include <cstdint>
#include <string_view>

namespace cda {

/// Counter-based normal generator. The n-th draw of a stream is a pure
/// function of (key, n), so streams can be created anywhere and replayed
/// exactly; no state is shared between streams.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t key) : key_(key) {}

  /// Stream derived from a master seed, a stream name, and an index
  /// (e.g. the ensemble member number).
  static RngStream named(std::uint64_t master_seed, std::string_view name,
                         std::uint64_t index = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double next_uniform();
  /// Standard normal via Box-Muller; pairs are cached.
  double next_normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace cda
