// rng.hpp
//
// Counter-based random streams. A draw is a pure function of
// (seed, stream, counter), so replications can run in any order or on any
// number of threads and still see the same numbers.

#pragma once

#include <cstdint>

namespace vrp {

/// SplitMix64 finalizer (a bijection on 64-bit words).
std::uint64_t mix64(std::uint64_t x);

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream);

  /// 64 random bits for position `counter` of this stream.
  std::uint64_t bits(std::uint64_t counter) const;

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace vrp
