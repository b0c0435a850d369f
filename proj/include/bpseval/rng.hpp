#pragma once

#include <cstdint>
#include <random>

namespace bpseval {

// Field tags for dedicated substreams. A stream is identified by
// (base seed, index, tag) so changing one field's consumption never shifts
// another field's draws.
enum class StreamTag : std::uint64_t {
  Arrival = 1,
  ControlFlow = 2,
  Duration = 3,
  MlpInit = 10,
  MlpShuffle = 11,
  Reference = 20,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index, StreamTag tag) {
  return mix64(mix64(mix64(base) ^ index) ^ static_cast<std::uint64_t>(tag));
}

/// mt19937_64 wrapper yielding uniforms strictly inside (0, 1); bit-identical on
/// every platform because it avoids the implementation-defined std distributions.
class Stream {
public:
  Stream(std::uint64_t base, std::uint64_t index, StreamTag tag) : engine_(stream_seed(base, index, tag)) {}

  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

private:
  std::mt19937_64 engine_;
};

}  // namespace bpseval
