#pragma once

#include <cstdint>
#include <random>

namespace covertime {

using RandomStream = std::mt19937_64;

// One independent stream per (seed, replicate index). The pair is mixed with
// splitmix64 before seeding so neighbouring indices give unrelated states.
RandomStream make_stream(std::uint64_t seed, std::uint64_t index);

// Uniform on (0, 1]; never returns 0, so log(u) is finite.
inline double uniform_open_closed(RandomStream& rng) {
  return 1.0 - std::generate_canonical<double, 53>(rng);
}

}  // namespace covertime
