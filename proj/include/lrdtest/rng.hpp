#pragma once

#include <cstdint>
#include <random>

namespace lrd {

using Rng = std::mt19937_64;

// Independent stream keyed by (master seed, stream index). Streams never
// depend on scheduling, so results are identical for any thread count.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6c7264u};
  return Rng(seq);
}

// Child seed for a nested component (e.g. one Monte Carlo replication).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_stream(seed, stream);
  return rng();
}

}  // namespace lrd
