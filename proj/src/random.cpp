#include "wormchain/random.hpp"

#include <array>

namespace wormchain {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_index) {
  const std::uint64_t key = mix64(seed);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size() / 2; ++i) {
    const std::uint64_t w = mix64(key ^ mix64(stream_index * 4 + i));
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  return std::seed_seq(words.begin(), words.end());
}

}  // namespace

PathStream::PathStream(std::uint64_t seed, std::uint64_t stream_index) {
  auto seq = make_seed_seq(seed, stream_index);
  engine_.seed(seq);
}

std::uint64_t rerun_seed(std::uint64_t seed, unsigned attempt) {
  if (attempt == 0) return seed;
  return mix64(seed ^ (0xa5a5a5a5a5a5a5a5ULL * attempt));
}

}  // namespace wormchain
