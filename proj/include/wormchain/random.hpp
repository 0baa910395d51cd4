#pragma once

#include <cstdint>
#include <random>

namespace wormchain {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Random stream for one Monte Carlo path.
///
/// The engine state is a pure function of (seed, stream_index): the key words
/// are obtained by hashing the counter, never by advancing a shared parent
/// generator, so the stream a path sees does not depend on which worker runs
/// it or in what order.
class PathStream {
 public:
  using result_type = std::mt19937_64::result_type;

  PathStream(std::uint64_t seed, std::uint64_t stream_index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Standard normal variate.
  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Seed for the k-th rerun of a statistical check; attempt 0 is `seed`.
std::uint64_t rerun_seed(std::uint64_t seed, unsigned attempt);

}  // namespace wormchain
