#include "lsnet/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace lsnet {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double pairwise_sum_impl(const double* data, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

void check_dims(const WeightedNetwork& net, const LatentState& lat) {
  if (net.n() != lat.n())
    throw DimensionError("network has " + std::to_string(net.n()) +
                         " nodes but positions have " + std::to_string(lat.n()));
}

}  // namespace

double pairwise_sum(std::span<const double> terms) {
  return pairwise_sum_impl(terms.data(), terms.size());
}

double normal_logpdf(double x, double mean, double var) {
  if (!(var > 0.0)) throw NumericError("normal variance must be positive");
  const double z = x - mean;
  return -0.5 * (kLog2Pi + std::log(var)) - z * z / (2.0 * var);
}

double invgamma_logpdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

double beta_logpdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return -std::numeric_limits<double>::infinity();
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) +
         std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

double intensity(double alpha, const Eigen::VectorXd& fi, const Eigen::VectorXd& fj) {
  if (fi.size() != fj.size()) throw DimensionError("position vectors differ in length");
  if (!std::isfinite(alpha) || !fi.allFinite() || !fj.allFinite())
    throw NumericError("intensity inputs must be finite");
  return std::exp(alpha - (fi - fj).squaredNorm());
}

double network_log_lik(const WeightedNetwork& net, const LatentState& lat) {
  check_dims(net, lat);
  const int n = net.n();
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::int64_t w = net.weights(i, j);
      if (w < 0) throw DataError("negative edge weight");
      const double dist2 = (lat.positions.col(i) - lat.positions.col(j)).squaredNorm();
      const double log_theta = lat.alpha - dist2;
      terms.push_back(static_cast<double>(w) * log_theta - std::exp(log_theta) -
                      std::lgamma(static_cast<double>(w) + 1.0));
    }
  }
  return pairwise_sum(terms);
}

double interp_log_lik(const InterpData& y, const LoadingState& load,
                      const LatentState& lat) {
  if (y.p() != load.p() || y.n() != lat.n() || load.d() != lat.d())
    throw DimensionError("interpretation data dimensions disagree");
  const int p = y.p();
  const int n = y.n();
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(p) * n);
  for (int l = 0; l < p; ++l) {
    const double var = load.idio_var[l];
    if (!(var > 0.0)) throw NumericError("idiosyncratic variance must be positive");
    const double log_norm = -0.5 * (kLog2Pi + std::log(var));
    const Eigen::RowVectorXd mean = load.lambda.row(l) * lat.positions;
    for (int i = 0; i < n; ++i) {
      const double r = y.y(l, i) - mean[i];
      terms.push_back(log_norm - r * r / (2.0 * var));
    }
  }
  return pairwise_sum(terms);
}

double log_prior(const LatentState& lat, const LoadingState& load,
                 const Hyperparams& hp, const RestrictionPattern& pat) {
  check_hyperparams(hp);
  {
    // Pattern consistency is a precondition of the density formula.
    LatentState uncentered = lat;
    uncentered.centered = false;  // centering is sampler bookkeeping, not prior mass
    const ValidationReport rep = validate_state(uncentered, load, pat);
    if (!rep.ok()) throw InvalidState("state violates pattern: " + rep.violations.front());
  }

  std::vector<double> terms;
  terms.push_back(normal_logpdf(lat.alpha, 0.0, hp.sigma2_alpha));

  const double v = position_prior_variance(lat.d());
  for (int i = 0; i < lat.n(); ++i)
    for (int k = 0; k < lat.d(); ++k)
      terms.push_back(normal_logpdf(lat.positions(k, i), 0.0, v));

  for (int l = 0; l < load.p(); ++l)
    terms.push_back(invgamma_logpdf(load.idio_var[l], hp.c0, hp.C0));
  for (int k = 0; k < load.d(); ++k)
    terms.push_back(invgamma_logpdf(load.col_scale[k], hp.c_sigma, hp.b_sigma));
  terms.push_back(invgamma_logpdf(load.kappa, hp.c_kappa, hp.b_kappa));
  for (int l = 0; l < load.p(); ++l)
    terms.push_back(beta_logpdf(load.tau[l], hp.tau_a, hp.tau_b));

  for (int l = 0; l < load.p(); ++l) {
    for (int k = 0; k < load.d(); ++k) {
      const double slab_var = load.kappa * load.col_scale[k];
      switch (pat.cell(l, k)) {
        case CellKind::kFree:
          if (load.indicators(l, k) == 1)
            terms.push_back(std::log(load.tau[l]) +
                            normal_logpdf(load.lambda(l, k), 0.0, slab_var));
          else
            terms.push_back(std::log1p(-load.tau[l]));
          break;
        case CellKind::kPositiveDiagonal:
          // Half-normal: slab truncated to (0, inf).
          terms.push_back(std::numbers::ln2 +
                          normal_logpdf(load.lambda(l, k), 0.0, slab_var));
          break;
        case CellKind::kFixedZero:
          break;
      }
    }
  }
  return pairwise_sum(terms);
}

double log_posterior(const WeightedNetwork& net, const InterpData& y,
                     const LatentState& lat, const LoadingState& load,
                     const Hyperparams& hp, const RestrictionPattern& pat) {
  return network_log_lik(net, lat) + interp_log_lik(y, load, lat) +
         log_prior(lat, load, hp, pat);
}

}  // namespace lsnet
