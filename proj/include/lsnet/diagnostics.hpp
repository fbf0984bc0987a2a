#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsnet/sampler.hpp"

namespace lsnet {

struct AlignResult {
  std::vector<Eigen::MatrixXd> aligned;
  std::vector<double> rmse_before;  // raw distance to the target, no alignment
  std::vector<double> rmse_after;
  std::vector<bool> degenerate;     // rank-deficient cross-covariance fallback
};

// Per-draw orthogonal Procrustes with translation onto the target; the full
// orthogonal group is allowed (det Q = -1 included), matching the network
// likelihood's invariance class.
AlignResult procrustes_align(const std::vector<Eigen::MatrixXd>& draws,
                             const Eigen::MatrixXd& target);

// Root mean squared entry-wise error scaled per node: ||a - b||_F / sqrt(n).
double position_rmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series convention: ess = length
};

// Effective sample size via initial-positive-sequence truncation of the
// autocovariance; clamped to (0, length].
EssResult ess(std::span<const double> series);

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

ParamSummary summarize_series(std::span<const double> series);

struct ChainSummary {
  ParamSummary alpha;
  ParamSummary kappa;
  ParamSummary log_posterior;
  std::vector<std::vector<ParamSummary>> lambda;  // p x d
  std::vector<ParamSummary> tau;                  // p
  std::vector<ParamSummary> col_scale;            // d
  std::vector<ParamSummary> idio_var;             // p
  Eigen::MatrixXd inclusion_prob;                 // p x d, mean of indicators
  Eigen::VectorXd row_zero_prob;                  // p, P(entire row zero)
  Eigen::MatrixXd position_mean;                  // d x n
  double ess_alpha = 0.0;
  double ess_log_posterior = 0.0;
};

ChainSummary summarize(const std::vector<ChainRecord>& chain);

// One exact draw of every unknown from the prior (positions recentered);
// both Geweke streams and the null-calibration test build on this.
void draw_prior_state(const Hyperparams& hp, const RestrictionPattern& pat, int n,
                      Philox& rng, LatentState& lat, LoadingState& load);

struct GewekeConfig {
  int n = 4;
  int p = 3;
  std::int64_t draws = 5000;   // retained draws per stream
  std::int64_t thin = 5;       // successive-conditional sweeps per retained draw
  std::uint64_t seed = 20240901;
  double mh_step_alpha = 0.5;
  double mh_step_f = 0.5;
  bool mutate_tau = false;
};

struct GewekeResult {
  std::vector<std::string> names;
  std::vector<double> z;
  std::vector<double> mean_marginal;
  std::vector<double> mean_successive;
  std::vector<double> se;
  double max_abs_z = 0.0;
};

// Joint-distribution sampler validation: compares prior-only draws against a
// stream alternating one posterior sweep with data regeneration. Both target
// the same joint law when every update is correct.
GewekeResult geweke_joint_test(const Hyperparams& hp, const RestrictionPattern& pat,
                               const GewekeConfig& cfg);

}  // namespace lsnet
