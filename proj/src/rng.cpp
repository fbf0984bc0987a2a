#include "lsnet/rng.hpp"

#include <cmath>

#include "lsnet/errors.hpp"

namespace lsnet {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

inline std::array<std::uint32_t, 4> philox_round(
    const std::array<std::uint32_t, 4>& ctr,
    const std::array<std::uint32_t, 2>& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
  mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  ctr = philox_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

void Philox::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(ctr_), static_cast<std::uint32_t>(ctr_ >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32)};
  buf_ = block(ctr, key_);
  ++ctr_;
  buf_pos_ = 0;
}

double Philox::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

double Philox::exponential() { return -std::log(uniform()); }

double Philox::gamma(double shape) {
  if (!(shape > 0.0)) throw NumericError("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back (Marsaglia-Tsang trick).
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Philox::inverse_gamma(double shape, double scale) {
  if (!(scale > 0.0)) throw NumericError("inverse gamma scale must be positive");
  return scale / gamma(shape);
}

double Philox::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

std::int64_t Philox::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw NumericError("poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_small(mean);
  return poisson_ptrd(mean);
}

std::int64_t Philox::poisson_small(double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

// Hoermann (1993), transformed rejection with squeeze (PTRD).
std::int64_t Philox::poisson_ptrd(double mean) {
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mean);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mu - mean - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

double Philox::truncated_normal_positive(double mean, double sd) {
  if (!(sd > 0.0)) throw NumericError("truncated normal sd must be positive");
  const double a = -mean / sd;  // standardized lower bound
  double z;
  if (a <= 0.45) {
    // Acceptance probability >= 0.33, plain rejection is fine.
    do {
      z = normal();
    } while (z <= a);
  } else {
    // Robert (1995): shifted exponential proposal.
    const double lam = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      z = a + exponential() / lam;
      const double diff = z - lam;
      if (std::log(uniform()) <= -0.5 * diff * diff) break;
    }
  }
  double x = mean + sd * z;
  while (!(x > 0.0)) {
    // Guard against underflow to exactly zero at extreme bounds.
    do {
      z = normal();
    } while (z <= a);
    x = mean + sd * z;
  }
  return x;
}

}  // namespace lsnet
