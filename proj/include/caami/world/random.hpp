#pragma once

#include <cstdint>
#include <random>

namespace caami {

using Rng = std::mt19937_64;

/// Independent, reproducible random stream for one purpose within a trial.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    return Rng(seq);
}

namespace stream {
inline constexpr std::uint64_t placement = 1;
inline constexpr std::uint64_t sensor_noise = 2;
inline constexpr std::uint64_t operator_steering = 3;
inline constexpr std::uint64_t head_jitter = 4;
}  // namespace stream

}  // namespace caami
