#pragma once

#include <cstdint>
#include <random>

namespace qcaw {

using Rng = std::mt19937_64;

/// Stream tags used when deriving child seeds. Root seed -> run seed -> per-step
/// shot stream or per-trajectory stream.
enum class StreamTag : std::uint64_t {
  run = 0x52554eULL,
  shots = 0x53484f54ULL,
  trajectory = 0x5452414aULL,
};

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from (parent, tag, index). Pure, platform independent.
std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t parent, StreamTag tag, std::uint64_t index) {
  return Rng(derive_seed(parent, tag, index));
}

}  // namespace qcaw
