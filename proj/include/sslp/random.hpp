#pragma once

#include <cstdint>

#include "sslp/rational.hpp"

namespace sslp {

/// SplitMix64 (Steele, Lea, Flood 2014). Tiny, stateless apart from one
/// 64-bit word, and identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  /// Midpoint of a uniformly chosen cell of the 2^32 grid on [0, 1].
  Rational unit_dyadic() {
    const std::uint64_t k = next() >> 32;
    Rational r(Integer(static_cast<unsigned long>(2 * k + 1)), Integer(1) << 33);
    r.canonicalize();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sslp
