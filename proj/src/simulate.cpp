#include "lsnet/simulate.hpp"

#include <cmath>

#include "lsnet/likelihood.hpp"
#include "lsnet/rng.hpp"
#include "lsnet/sampler.hpp"

namespace lsnet {

namespace {

// Mean of exp(-D_ij) over unordered pairs.
double mean_exp_neg_dist(const Eigen::MatrixXd& positions) {
  const int n = static_cast<int>(positions.cols());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      s += std::exp(-(positions.col(i) - positions.col(j)).squaredNorm());
  return s / (0.5 * n * (n - 1));
}

}  // namespace

Truth gen_truth(int n, int d, int p, const RestrictionPattern& pat,
                std::uint64_t seed, const TruthConfig& cfg) {
  if (n < 3) throw DimensionError("need n >= 3 nodes");
  if (d < 2) throw DimensionError("latent dimension must be >= 2");
  if (p < d) throw DimensionError("need p >= d interpretation variables");
  if (pat.p != p || pat.d != d) throw DimensionError("pattern dimensions disagree");

  Truth truth;
  truth.meta.seed = seed;
  truth.meta.config = cfg;

  Philox pos_rng(seed, Stream::kTruthPositions);
  const double sd = std::sqrt(position_prior_variance(d));
  truth.latent.positions.resize(d, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) truth.latent.positions(k, i) = sd * pos_rng.normal();
  recenter(truth.latent);

  // Intercept: prior draw, kept only if the implied mean weight is usable.
  Philox alpha_rng(seed, Stream::kTruthAlpha);
  const double c = mean_exp_neg_dist(truth.latent.positions);
  const double alpha_sd = std::sqrt(cfg.sigma2_alpha);
  double alpha = 0.0;
  bool found = false;
  std::int64_t tries = 0;
  while (tries < cfg.max_alpha_tries) {
    ++tries;
    alpha = alpha_sd * alpha_rng.normal();
    const double mean_w = std::exp(alpha) * c;
    if (mean_w >= cfg.mean_weight_lo && mean_w <= cfg.mean_weight_hi) {
      found = true;
      break;
    }
  }
  if (!found) {
    // Deterministic fallback: solve for a mean weight in the middle of the band.
    alpha = std::log(0.5 * (cfg.mean_weight_lo + cfg.mean_weight_hi) / c);
    truth.meta.alpha_fallback = true;
  }
  truth.latent.alpha = alpha;
  truth.meta.alpha_tries = tries;
  truth.meta.expected_mean_weight = std::exp(alpha) * c;

  Philox lam_rng(seed, Stream::kTruthLambda);
  LoadingState& load = truth.loading;
  load.lambda = Eigen::MatrixXd::Zero(p, d);
  load.indicators = Eigen::MatrixXi::Zero(p, d);
  for (int l = 0; l < p; ++l) {
    for (int k = 0; k < d; ++k) {
      switch (pat.cell(l, k)) {
        case CellKind::kFixedZero:
          break;
        case CellKind::kPositiveDiagonal:
          load.lambda(l, k) = std::abs(cfg.slab_sd * lam_rng.normal());
          load.indicators(l, k) = 1;
          break;
        case CellKind::kFree:
          load.lambda(l, k) = cfg.slab_sd * lam_rng.normal();
          load.indicators(l, k) = 1;
          break;
      }
    }
  }

  // Row sparsity: zero out rows chosen among those with no pivot cell.
  std::vector<int> candidates;
  for (int l = 0; l < p; ++l) {
    bool has_pivot = false;
    for (int k = 0; k < d; ++k)
      if (pat.cell(l, k) == CellKind::kPositiveDiagonal) has_pivot = true;
    if (!has_pivot) candidates.push_back(l);
  }
  shuffle_indices(candidates, lam_rng);
  const int n_zero = std::min<int>(cfg.zero_rows, static_cast<int>(candidates.size()));
  for (int z = 0; z < n_zero; ++z) {
    const int l = candidates[z];
    load.lambda.row(l).setZero();
    load.indicators.row(l).setZero();
    truth.meta.zero_rows.push_back(l + 1);
  }

  load.tau = Eigen::VectorXd::Constant(p, 0.5);
  load.col_scale = Eigen::VectorXd::Ones(d);
  load.kappa = 1.0;
  load.idio_var = Eigen::VectorXd::Constant(p, cfg.idio_var);
  return truth;
}

WeightedNetwork gen_network(const LatentState& lat, std::uint64_t seed) {
  if (!lat.positions.allFinite() || !std::isfinite(lat.alpha))
    throw NumericError("latent state must be finite");
  const int n = lat.n();
  Philox rng(seed, Stream::kNetwork);
  WeightedNetwork net;
  net.weights = WeightMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double theta =
          intensity(lat.alpha, lat.positions.col(i), lat.positions.col(j));
      const std::int64_t w = rng.poisson(theta);
      net.weights(i, j) = w;
      net.weights(j, i) = w;
    }
  }
  return net;
}

InterpData gen_interp(const LatentState& lat, const LoadingState& load,
                      std::uint64_t seed) {
  if (lat.d() != load.d()) throw DimensionError("latent/loading dimensions disagree");
  Philox rng(seed, Stream::kInterp);
  InterpData out;
  out.y = load.lambda * lat.positions;
  for (int l = 0; l < load.p(); ++l) {
    const double sd = std::sqrt(load.idio_var[l]);
    for (int i = 0; i < lat.n(); ++i) out.y(l, i) += sd * rng.normal();
  }
  return out;
}

}  // namespace lsnet
