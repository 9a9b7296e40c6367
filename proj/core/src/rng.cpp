#include "vrp/rng.hpp"

namespace vrp {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * kStreamSalt + kGolden))) {}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
  return mix64(key_ + (counter + 1) * kGolden);
}

double CounterStream::uniform(std::uint64_t counter) const {
  const std::uint64_t top = bits(counter) >> 11;
  return (static_cast<double>(top) + 0.5) * 0x1.0p-53;
}

}  // namespace vrp
