#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fdlsd {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named sub-stream ("datagen", "sd",
/// "batches", "init", ...) so each component can be replayed in isolation.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::string_view stream, std::uint64_t index = 0) {
    return Rng{derive_seed(base, stream, index)};
}

/// Unbiased integer in [0, n). Independent of the standard library's
/// distribution implementations, so selections are portable.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform real in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Standard normal via Box-Muller on uniform_unit.
double standard_normal(Rng& rng);

}  // namespace fdlsd
