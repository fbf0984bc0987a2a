#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lsnet/model.hpp"

namespace lsnet {

// Generation settings for synthetic ground truth. The slab scale and
// idiosyncratic noise are fixed constants here, not prior draws, so fixtures
// stay well conditioned; every generated value lands in TruthMeta.
struct TruthConfig {
  double slab_sd = 1.0;        // sd of nonzero loading draws
  double idio_var = 1.0;       // true residual variance per row
  int zero_rows = 1;           // rows of Lambda forced entirely to zero
  double sigma2_alpha = 10.0;  // prior variance the intercept is drawn from
  double mean_weight_lo = 0.5; // accepted range for the implied mean edge weight
  double mean_weight_hi = 5.0;
  std::int64_t max_alpha_tries = 100000;
};

struct TruthMeta {
  std::uint64_t seed = 0;
  TruthConfig config;
  std::vector<int> zero_rows;     // 1-based row indices forced to zero
  double expected_mean_weight = 0.0;
  std::int64_t alpha_tries = 0;
  bool alpha_fallback = false;    // solved for the target instead of rejection
};

struct Truth {
  LatentState latent;
  LoadingState loading;
  TruthMeta meta;
};

// Positions from the prior (recentered), intercept from its prior truncated
// to a usable mean edge weight, loadings from the slab on permitted cells
// with whole zero rows for row sparsity.
Truth gen_truth(int n, int d, int p, const RestrictionPattern& pat,
                std::uint64_t seed, const TruthConfig& cfg = {});

WeightedNetwork gen_network(const LatentState& lat, std::uint64_t seed);

InterpData gen_interp(const LatentState& lat, const LoadingState& load,
                      std::uint64_t seed);

}  // namespace lsnet
