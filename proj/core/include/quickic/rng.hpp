#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace quickic {

/// A 64-bit seed paired with a stream label naming the consumer, so that
/// independent consumers of one trial seed draw decorrelated sequences.
/// Identical (seed, stream) reproduce identical datasets on one platform;
/// cross-platform bit-exactness is not guaranteed (std distributions are
/// implementation-defined).
struct TrialSeed {
  std::uint64_t seed = 0;
  std::string stream;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a salt (or a hashed stream label) into a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream);

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream);
std::mt19937_64 make_rng(const TrialSeed& ts);

}  // namespace quickic
