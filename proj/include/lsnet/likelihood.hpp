#pragma once

#include <span>

#include "lsnet/model.hpp"

namespace lsnet {

// Deterministic pairwise (cascade) summation; the result does not depend on
// how callers might split the work, so serial and parallel evaluations agree.
double pairwise_sum(std::span<const double> terms);

double normal_logpdf(double x, double mean, double var);
double invgamma_logpdf(double x, double shape, double scale);
double beta_logpdf(double x, double a, double b);

// Poisson intensity exp(alpha - ||fi - fj||^2); the log link is fixed.
double intensity(double alpha, const Eigen::VectorXd& fi, const Eigen::VectorXd& fj);

// sum_{i<j} [ w_ij log theta_ij - theta_ij - log(w_ij!) ]
double network_log_lik(const WeightedNetwork& net, const LatentState& lat);

// Matrix-normal row-diagonal log density: independent N((Lambda f)_li, sigma^2_l).
double interp_log_lik(const InterpData& y, const LoadingState& load,
                      const LatentState& lat);

// Sum of every prior log density in the model block.
double log_prior(const LatentState& lat, const LoadingState& load,
                 const Hyperparams& hp, const RestrictionPattern& pat);

double log_posterior(const WeightedNetwork& net, const InterpData& y,
                     const LatentState& lat, const LoadingState& load,
                     const Hyperparams& hp, const RestrictionPattern& pat);

}  // namespace lsnet
