#pragma once

#include <cmath>
#include <cstdint>

namespace triax {

/// Deterministic PCG32 engine (XSH-RR 64/32). Every sampler in the toolkit
/// draws through this engine so that batches are a pure function of
/// (seed, stream); the standard library distributions are implementation
/// defined and would break that contract.
///
/// Streams: each logical unit of work (one path, one oracle) gets its own
/// stream id, so partitioning paths across workers cannot change any draw.
class Rng {
 public:
  Rng() : Rng(0x5EEDu, 0) {}

  Rng(std::uint64_t seed, std::uint64_t stream) {
    state_ = 0u;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0,1); never returns an endpoint, so
  /// log(u) and inverse power transforms are always finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two open-interval uniforms, with the
  /// second value of each pair cached.
  double normal01() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream-id layout: a small domain tag in the top bits keeps draws made by
/// different operations (sampling, decomposition, oracles, ...) disjoint even
/// for equal path indices under one seed.
enum class StreamDomain : std::uint64_t {
  iterate = 1,
  stationary = 2,
  decompose = 3,
  u_sequence = 4,
  lyapunov = 5,
  goldie = 6,
  breiman = 7,
  garch = 8,
};

inline std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
  return (static_cast<std::uint64_t>(domain) << 48) | (index & 0xFFFFFFFFFFFFull);
}

inline Rng make_rng(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  return Rng(seed, stream_id(domain, index));
}

}  // namespace triax
