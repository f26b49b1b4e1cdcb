#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace swf {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the substream identified by (label, index) under a master seed.
// Distinct labels give statistically independent streams, so one generation
// stage can change its draws without perturbing any other stage.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view label,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

}  // namespace swf
