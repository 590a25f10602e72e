#pragma once

#include <cstdint>
#include <random>

namespace esncert {

using Engine = std::mt19937_64;

// Stream domains keep seeds derived for different purposes disjoint.
enum class StreamDomain : std::uint64_t {
  kCampaign = 0x43414d50,  // per-order campaign base seeds
  kTest = 0x54455354,      // per-order violation-test base seeds
  kInstance = 0x494e5354,  // one stream per trained network
  kExcitation = 0x4d505253,
  kNoise = 0x4e4f4953,
};

/// Counter-based split: mixes (base, domain, index) through splitmix64 so
/// that every instance gets its own stream without sequential generation.
std::uint64_t derive_seed(std::uint64_t base, StreamDomain domain, std::uint64_t index);

/// Seeds a 64-bit Mersenne twister from the full 64-bit seed.
Engine make_engine(std::uint64_t seed);

}  // namespace esncert
