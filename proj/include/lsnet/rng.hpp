#pragma once

#include <array>
#include <cstdint>

namespace lsnet {

// Stream ids for the counter-based generator. Every sampler block and every
// generator draws from its own stream, so streams can be replayed in
// isolation (e.g. by parallel diagnostics) without disturbing each other.
enum class Stream : std::uint64_t {
  kAlpha = 1,
  kPositions = 2,
  kScanOrder = 3,
  kLoadings = 4,
  kTau = 5,
  kVariances = 6,
  kInit = 7,
  kTruthPositions = 16,
  kTruthAlpha = 17,
  kTruthLambda = 18,
  kNetwork = 19,
  kInterp = 20,
  kGewekeMarginal = 32,
  kGewekeData = 33,
  kTest = 64,
};

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror & Shaw 2011).
// The 64-bit key holds the seed; the upper 64 bits of the 128-bit counter
// hold the stream id, so distinct streams under one seed never overlap.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}
  Philox(std::uint64_t seed, Stream stream)
      : Philox(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint32_t next_u32() {
    if (buf_pos_ >= 4) refill();
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on the open interval (0,1).
  double uniform() {
    const std::uint64_t x = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(x) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double exponential();
  // Gamma(shape, scale 1), Marsaglia-Tsang.
  double gamma(double shape);
  // Inverse gamma with shape a and scale b: density ~ x^{-a-1} exp(-b/x).
  double inverse_gamma(double shape, double scale);
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }
  std::int64_t poisson(double mean);
  // Normal(mean, sd^2) conditioned on being strictly positive.
  double truncated_normal_positive(double mean, double sd);

  // Raw one-block output, used by the known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();
  std::int64_t poisson_small(double mean);
  std::int64_t poisson_ptrd(double mean);

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t ctr_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// Fisher-Yates permutation of {0,...,n-1}.
template <typename IntVec>
void shuffle_indices(IntVec& idx, Philox& rng) {
  const auto n = static_cast<std::int64_t>(idx.size());
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(rng.uniform() * (i + 1));
    const auto jj = j > i ? i : j;
    std::swap(idx[i], idx[jj]);
  }
}

}  // namespace lsnet
