#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lsnet/likelihood.hpp"
#include "lsnet/model.hpp"
#include "lsnet/rng.hpp"

namespace lsnet {

struct SamplerConfig {
  std::int64_t iters = 2000;   // total sweeps, burnin included
  std::int64_t burnin = 1000;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  double mh_step_alpha = 0.5;
  double mh_step_f = 0.5;
  std::int64_t adapt_window = 50;
  double target_accept = 0.234;
  bool mutate_tau = false;  // swaps the Beta counts; sampler-validation power checks only
};

void check_config(const SamplerConfig& cfg);

// One retained posterior draw of every unknown.
struct ChainRecord {
  std::int64_t draw = 0;  // absolute sweep index, 1-based
  double alpha = 0.0;
  Eigen::MatrixXd positions;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXi indicators;
  Eigen::VectorXd tau;
  Eigen::VectorXd col_scale;
  double kappa = 1.0;
  Eigen::VectorXd idio_var;
  double log_posterior = 0.0;
};

struct AcceptanceSummary {
  double alpha_rate = 0.0;     // post-burnin mean acceptance probability
  double position_rate = 0.0;
  double final_step_alpha = 0.0;
  double final_step_f = 0.0;
};

struct StepTraceEntry {
  std::int64_t sweep;
  double step_alpha;
  double step_f;
};

struct ChainResult {
  std::vector<ChainRecord> records;
  AcceptanceSummary acceptance;
  std::vector<StepTraceEntry> step_trace;  // one entry per sweep
};

using ChainSink = std::function<void(const ChainRecord&)>;

// Per-block generator streams, all derived from one seed.
struct SamplerRngs {
  Philox alpha;
  Philox positions;
  Philox scan;
  Philox loadings;
  Philox tau;
  Philox variances;

  explicit SamplerRngs(std::uint64_t seed)
      : alpha(seed, Stream::kAlpha),
        positions(seed, Stream::kPositions),
        scan(seed, Stream::kScanOrder),
        loadings(seed, Stream::kLoadings),
        tau(seed, Stream::kTau),
        variances(seed, Stream::kVariances) {}
};

// --- conditional computations, exposed so tests can check them directly ---

// Network log-likelihood change when alpha moves to alpha_new.
double alpha_network_delta(const WeightedNetwork& net, const LatentState& lat,
                           double alpha_new);
// Full MH log ratio for an alpha move (network + prior; the interpretation
// equation does not involve alpha and is never evaluated).
double alpha_log_ratio(const WeightedNetwork& net, const LatentState& lat,
                       const Hyperparams& hp, double alpha_new);

// Local pieces of a position move for node i (0-based).
double position_network_delta(const WeightedNetwork& net, const LatentState& lat,
                              int i, const Eigen::VectorXd& f_new);
double position_interp_delta(const InterpData& y, const LoadingState& load,
                             const LatentState& lat, int i,
                             const Eigen::VectorXd& f_new);
double position_prior_delta(const LatentState& lat, int i,
                            const Eigen::VectorXd& f_new);
double position_log_ratio(const WeightedNetwork& net, const InterpData& y,
                          const LatentState& lat, const LoadingState& load,
                          int i, const Eigen::VectorXd& f_new);

// Slab conditional for loading cell (l,k): posterior mean/variance of the
// coefficient given the rest of its row, plus the log inclusion odds.
struct CellConditional {
  double mean = 0.0;
  double var = 0.0;
  double include_log_odds = 0.0;
};
CellConditional loading_cell_conditional(const LatentState& lat,
                                         const LoadingState& load,
                                         const InterpData& y, int l, int k);

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};
// Conjugate Beta update for tau_l; only Free cells carry Bernoulli draws.
BetaParams tau_posterior_params(const LoadingState& load,
                                const RestrictionPattern& pat, int l,
                                const Hyperparams& hp);

struct IgParams {
  double shape = 1.0;
  double scale = 1.0;
};
IgParams idio_var_posterior_params(const InterpData& y, const LatentState& lat,
                                   const LoadingState& load, int l,
                                   const Hyperparams& hp);
IgParams col_scale_posterior_params(const LoadingState& load, int k,
                                    const Hyperparams& hp);
IgParams kappa_posterior_params(const LoadingState& load, const Hyperparams& hp);

// --- in-place updates (sampler-owned state) ---

// Returns the acceptance probability of the proposed move.
double update_alpha(LatentState& lat, const WeightedNetwork& net,
                    const Hyperparams& hp, double step, Philox& rng);
double update_position(LatentState& lat, const WeightedNetwork& net,
                       const InterpData& y, const LoadingState& load, int i,
                       double step, Philox& rng);
void update_loadings_row(LoadingState& load, const LatentState& lat,
                         const InterpData& y, int l,
                         const RestrictionPattern& pat, Philox& rng);
void update_tau(LoadingState& load, const RestrictionPattern& pat,
                const Hyperparams& hp, Philox& rng, bool mutate = false);
void update_variances(LoadingState& load, const InterpData& y,
                      const LatentState& lat, const RestrictionPattern& pat,
                      const Hyperparams& hp, Philox& rng);

// Subtracts the row mean from each coordinate; pairwise distances (and the
// network likelihood) are unchanged. Sets the centered flag.
void recenter(LatentState& lat);

struct SweepStats {
  double alpha_accept = 0.0;
  double position_accept = 0.0;  // mean over nodes
};

// One full cycle: alpha, positions in random scan order, recenter, loadings
// row by row, tau, variances.
SweepStats sweep(LatentState& lat, LoadingState& load, const WeightedNetwork& net,
                 const InterpData& y, const RestrictionPattern& pat,
                 const Hyperparams& hp, double step_alpha, double step_f,
                 SamplerRngs& rngs, bool mutate_tau = false);

// Deterministic initialization: intercept from the positive-weight mean,
// positions from the prior (recentered), loadings from least squares snapped
// to the pattern, variances at prior means, tau at 1/2.
void init_state(const WeightedNetwork& net, const InterpData& y,
                const RestrictionPattern& pat, const Hyperparams& hp,
                std::uint64_t seed, LatentState& lat, LoadingState& load);

ChainResult run_chain(const WeightedNetwork& net, const InterpData& y,
                      const RestrictionPattern& pat, const Hyperparams& hp,
                      const SamplerConfig& cfg, const ChainSink& sink = nullptr,
                      bool keep_records = true);

}  // namespace lsnet
