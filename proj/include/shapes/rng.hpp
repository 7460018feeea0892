#pragma once

#include <cstdint>
#include <random>

namespace shapes {

/// Purpose of a random stream. Streams for different purposes never share
/// a seed sequence even when their indices coincide.
enum class StreamKind : std::uint32_t {
  pso = 0x50534f31,
  noise = 0x4e4f4953,
  bootstrap = 0x424f4f54,
  test = 0x54455354,
};

using Rng = std::mt19937_64;

/// Generator for stream `index` of the given kind; `sub` distinguishes
/// further (e.g. the model a PSO run belongs to).
inline Rng make_stream(StreamKind kind, std::uint64_t index, std::uint64_t sub = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), static_cast<std::uint32_t>(sub),
                    static_cast<std::uint32_t>(sub >> 32)};
  return Rng(seq);
}

}  // namespace shapes
