#include "lsnet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lsnet {

namespace {

double sigmoid(double log_odds) {
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

double accept_prob(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

bool mh_accept(double log_ratio, Philox& rng) {
  // Always consume one uniform so the stream advances identically whether
  // or not the ratio exceeds one.
  const double u = rng.uniform();
  return std::log(u) < log_ratio;
}

void check_node_index(const LatentState& lat, int i) {
  if (i < 0 || i >= lat.n())
    throw IndexError("node index " + std::to_string(i + 1) + " out of range 1.." +
                     std::to_string(lat.n()));
}

}  // namespace

void check_config(const SamplerConfig& cfg) {
  if (cfg.iters <= 0) throw DataError("iters must be positive");
  if (cfg.burnin < 0 || cfg.burnin >= cfg.iters)
    throw DataError("need 0 <= burnin < iters");
  if (cfg.thin < 1) throw DataError("thin must be >= 1");
  if (!(cfg.mh_step_alpha > 0.0) || !(cfg.mh_step_f > 0.0))
    throw DataError("MH step sizes must be positive");
  if (!(cfg.target_accept > 0.0 && cfg.target_accept < 1.0))
    throw DataError("target_accept must lie in (0,1)");
  if (cfg.adapt_window < 1) throw DataError("adapt_window must be >= 1");
}

double alpha_network_delta(const WeightedNetwork& net, const LatentState& lat,
                           double alpha_new) {
  const int n = net.n();
  double w_sum = 0.0;
  double exp_sum = 0.0;  // sum of exp(-D_ij)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      w_sum += static_cast<double>(net.weights(i, j));
      exp_sum += std::exp(-(lat.positions.col(i) - lat.positions.col(j)).squaredNorm());
    }
  }
  return (alpha_new - lat.alpha) * w_sum -
         (std::exp(alpha_new) - std::exp(lat.alpha)) * exp_sum;
}

double alpha_log_ratio(const WeightedNetwork& net, const LatentState& lat,
                       const Hyperparams& hp, double alpha_new) {
  const double prior_delta =
      (lat.alpha * lat.alpha - alpha_new * alpha_new) / (2.0 * hp.sigma2_alpha);
  return alpha_network_delta(net, lat, alpha_new) + prior_delta;
}

double position_network_delta(const WeightedNetwork& net, const LatentState& lat,
                              int i, const Eigen::VectorXd& f_new) {
  check_node_index(lat, i);
  const int n = net.n();
  double delta = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d_old = (lat.positions.col(i) - lat.positions.col(j)).squaredNorm();
    const double d_new = (f_new - lat.positions.col(j)).squaredNorm();
    const double w = static_cast<double>(net.weights(i, j));
    delta += w * (d_old - d_new) -
             (std::exp(lat.alpha - d_new) - std::exp(lat.alpha - d_old));
  }
  return delta;
}

double position_interp_delta(const InterpData& y, const LoadingState& load,
                             const LatentState& lat, int i,
                             const Eigen::VectorXd& f_new) {
  check_node_index(lat, i);
  const Eigen::VectorXd mean_old = load.lambda * lat.positions.col(i);
  const Eigen::VectorXd mean_new = load.lambda * f_new;
  double delta = 0.0;
  for (int l = 0; l < load.p(); ++l) {
    const double r_old = y.y(l, i) - mean_old[l];
    const double r_new = y.y(l, i) - mean_new[l];
    delta += (r_old * r_old - r_new * r_new) / (2.0 * load.idio_var[l]);
  }
  return delta;
}

double position_prior_delta(const LatentState& lat, int i,
                            const Eigen::VectorXd& f_new) {
  check_node_index(lat, i);
  const double v = position_prior_variance(lat.d());
  return (lat.positions.col(i).squaredNorm() - f_new.squaredNorm()) / (2.0 * v);
}

double position_log_ratio(const WeightedNetwork& net, const InterpData& y,
                          const LatentState& lat, const LoadingState& load,
                          int i, const Eigen::VectorXd& f_new) {
  return position_network_delta(net, lat, i, f_new) +
         position_interp_delta(y, load, lat, i, f_new) +
         position_prior_delta(lat, i, f_new);
}

CellConditional loading_cell_conditional(const LatentState& lat,
                                         const LoadingState& load,
                                         const InterpData& y, int l, int k) {
  const Eigen::RowVectorXd fk = lat.positions.row(k);
  // Residual of row l with cell (l,k) removed.
  Eigen::RowVectorXd resid = y.y.row(l) - load.lambda.row(l) * lat.positions;
  resid += load.lambda(l, k) * fk;

  const double sigma2 = load.idio_var[l];
  const double slab_var = load.kappa * load.col_scale[k];
  const double v = 1.0 / (fk.squaredNorm() / sigma2 + 1.0 / slab_var);
  const double m = v * resid.dot(fk) / sigma2;

  const double tau = load.tau[l];
  CellConditional out;
  out.mean = m;
  out.var = v;
  out.include_log_odds = std::log(tau) - std::log1p(-tau) +
                         0.5 * (std::log(v) - std::log(slab_var)) +
                         m * m / (2.0 * v);
  return out;
}

BetaParams tau_posterior_params(const LoadingState& load,
                                const RestrictionPattern& pat, int l,
                                const Hyperparams& hp) {
  int active = 0;
  int inactive = 0;
  for (int k = 0; k < pat.d; ++k) {
    if (pat.cell(l, k) != CellKind::kFree) continue;
    if (load.indicators(l, k) == 1)
      ++active;
    else
      ++inactive;
  }
  return {hp.tau_a + active, hp.tau_b + inactive};
}

IgParams idio_var_posterior_params(const InterpData& y, const LatentState& lat,
                                   const LoadingState& load, int l,
                                   const Hyperparams& hp) {
  const Eigen::RowVectorXd resid = y.y.row(l) - load.lambda.row(l) * lat.positions;
  return {hp.c0 + 0.5 * lat.n(), hp.C0 + 0.5 * resid.squaredNorm()};
}

IgParams col_scale_posterior_params(const LoadingState& load, int k,
                                    const Hyperparams& hp) {
  int active = 0;
  double ssq = 0.0;
  for (int l = 0; l < load.p(); ++l) {
    if (load.indicators(l, k) == 1) {
      ++active;
      ssq += load.lambda(l, k) * load.lambda(l, k);
    }
  }
  return {hp.c_sigma + 0.5 * active, hp.b_sigma + ssq / (2.0 * load.kappa)};
}

IgParams kappa_posterior_params(const LoadingState& load, const Hyperparams& hp) {
  int active = 0;
  double ssq = 0.0;
  for (int l = 0; l < load.p(); ++l) {
    for (int k = 0; k < load.d(); ++k) {
      if (load.indicators(l, k) == 1) {
        ++active;
        ssq += load.lambda(l, k) * load.lambda(l, k) / load.col_scale[k];
      }
    }
  }
  return {hp.c_kappa + 0.5 * active, hp.b_kappa + 0.5 * ssq};
}

double update_alpha(LatentState& lat, const WeightedNetwork& net,
                    const Hyperparams& hp, double step, Philox& rng) {
  const double prop = lat.alpha + step * rng.normal();
  const double log_ratio = alpha_log_ratio(net, lat, hp, prop);
  if (mh_accept(log_ratio, rng)) lat.alpha = prop;
  return accept_prob(log_ratio);
}

double update_position(LatentState& lat, const WeightedNetwork& net,
                       const InterpData& y, const LoadingState& load, int i,
                       double step, Philox& rng) {
  check_node_index(lat, i);
  Eigen::VectorXd prop = lat.positions.col(i);
  for (int k = 0; k < lat.d(); ++k) prop[k] += step * rng.normal();
  const double log_ratio = position_log_ratio(net, y, lat, load, i, prop);
  if (mh_accept(log_ratio, rng)) {
    lat.positions.col(i) = prop;
    lat.centered = false;
  }
  return accept_prob(log_ratio);
}

void update_loadings_row(LoadingState& load, const LatentState& lat,
                         const InterpData& y, int l,
                         const RestrictionPattern& pat, Philox& rng) {
  if (l < 0 || l >= load.p()) throw IndexError("loading row out of range");
  std::vector<int> cols;
  for (int k = 0; k < pat.d; ++k)
    if (pat.cell(l, k) != CellKind::kFixedZero) cols.push_back(k);
  if (cols.empty()) return;  // row fully pinned to zero (GLT above first pivot)
  shuffle_indices(cols, rng);

  for (int k : cols) {
    const CellConditional cond = loading_cell_conditional(lat, load, y, l, k);
    const double sd = std::sqrt(cond.var);
    if (pat.cell(l, k) == CellKind::kPositiveDiagonal) {
      load.lambda(l, k) = rng.truncated_normal_positive(cond.mean, sd);
      load.indicators(l, k) = 1;
    } else {
      const double p_include = sigmoid(cond.include_log_odds);
      if (rng.bernoulli(p_include)) {
        load.lambda(l, k) = rng.normal(cond.mean, sd);
        load.indicators(l, k) = 1;
      } else {
        load.lambda(l, k) = 0.0;
        load.indicators(l, k) = 0;
      }
    }
  }
}

void update_tau(LoadingState& load, const RestrictionPattern& pat,
                const Hyperparams& hp, Philox& rng, bool mutate) {
  for (int l = 0; l < load.p(); ++l) {
    BetaParams bp = tau_posterior_params(load, pat, l, hp);
    if (mutate) std::swap(bp.a, bp.b);
    load.tau[l] = rng.beta(bp.a, bp.b);
  }
}

void update_variances(LoadingState& load, const InterpData& y,
                      const LatentState& lat, const RestrictionPattern& pat,
                      const Hyperparams& hp, Philox& rng) {
  (void)pat;
  for (int l = 0; l < load.p(); ++l) {
    const IgParams ig = idio_var_posterior_params(y, lat, load, l, hp);
    load.idio_var[l] = rng.inverse_gamma(ig.shape, ig.scale);
  }
  for (int k = 0; k < load.d(); ++k) {
    const IgParams ig = col_scale_posterior_params(load, k, hp);
    load.col_scale[k] = rng.inverse_gamma(ig.shape, ig.scale);
  }
  const IgParams ig = kappa_posterior_params(load, hp);
  load.kappa = rng.inverse_gamma(ig.shape, ig.scale);
}

void recenter(LatentState& lat) {
  lat.positions.colwise() -= lat.positions.rowwise().mean().eval();
  lat.centered = true;
}

SweepStats sweep(LatentState& lat, LoadingState& load, const WeightedNetwork& net,
                 const InterpData& y, const RestrictionPattern& pat,
                 const Hyperparams& hp, double step_alpha, double step_f,
                 SamplerRngs& rngs, bool mutate_tau) {
  SweepStats stats;
  stats.alpha_accept = update_alpha(lat, net, hp, step_alpha, rngs.alpha);

  std::vector<int> order(lat.n());
  std::iota(order.begin(), order.end(), 0);
  shuffle_indices(order, rngs.scan);
  double acc = 0.0;
  for (int i : order)
    acc += update_position(lat, net, y, load, i, step_f, rngs.positions);
  stats.position_accept = acc / static_cast<double>(lat.n());

  recenter(lat);

  for (int l = 0; l < load.p(); ++l)
    update_loadings_row(load, lat, y, l, pat, rngs.loadings);
  update_tau(load, pat, hp, rngs.tau, mutate_tau);
  update_variances(load, y, lat, pat, hp, rngs.variances);
  return stats;
}

void init_state(const WeightedNetwork& net, const InterpData& y,
                const RestrictionPattern& pat, const Hyperparams& hp,
                std::uint64_t seed, LatentState& lat, LoadingState& load) {
  check_network(net);
  const int n = net.n();
  const int p = pat.p;
  const int d = pat.d;
  if (y.p() != p || y.n() != n)
    throw DimensionError("interpretation data is " + std::to_string(y.p()) + "x" +
                         std::to_string(y.n()) + " but expected " +
                         std::to_string(p) + "x" + std::to_string(n));

  double w_pos_sum = 0.0;
  std::int64_t w_pos_count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (net.weights(i, j) > 0) {
        w_pos_sum += static_cast<double>(net.weights(i, j));
        ++w_pos_count;
      }
    }
  }
  const double mean_pos = w_pos_count > 0 ? w_pos_sum / w_pos_count : 0.0;
  lat.alpha = std::log(mean_pos + 1.0);

  Philox rng(seed, Stream::kInit);
  const double sd = std::sqrt(position_prior_variance(d));
  lat.positions.resize(d, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) lat.positions(k, i) = sd * rng.normal();
  recenter(lat);

  // Least squares of Y on the initial positions, snapped to the pattern.
  const Eigen::MatrixXd gram = lat.positions * lat.positions.transpose();
  const Eigen::MatrixXd ols =
      gram.ldlt().solve(lat.positions * y.y.transpose()).transpose();  // p x d

  load.lambda.resize(p, d);
  load.indicators.resize(p, d);
  for (int l = 0; l < p; ++l) {
    for (int k = 0; k < d; ++k) {
      switch (pat.cell(l, k)) {
        case CellKind::kFixedZero:
          load.lambda(l, k) = 0.0;
          load.indicators(l, k) = 0;
          break;
        case CellKind::kPositiveDiagonal:
          load.lambda(l, k) = std::abs(ols(l, k)) + 0.1;
          load.indicators(l, k) = 1;
          break;
        case CellKind::kFree:
          load.lambda(l, k) = ols(l, k);
          load.indicators(l, k) = ols(l, k) == 0.0 ? 0 : 1;
          break;
      }
    }
  }

  auto prior_mean = [](double shape, double scale) {
    return shape > 1.0 ? scale / (shape - 1.0) : 1.0;
  };
  load.idio_var = Eigen::VectorXd::Constant(p, prior_mean(hp.c0, hp.C0));
  load.col_scale = Eigen::VectorXd::Constant(d, prior_mean(hp.c_sigma, hp.b_sigma));
  load.kappa = prior_mean(hp.c_kappa, hp.b_kappa);
  load.tau = Eigen::VectorXd::Constant(p, 0.5);
}

ChainResult run_chain(const WeightedNetwork& net, const InterpData& y,
                      const RestrictionPattern& pat, const Hyperparams& hp,
                      const SamplerConfig& cfg, const ChainSink& sink,
                      bool keep_records) {
  check_config(cfg);
  check_hyperparams(hp);

  LatentState lat;
  LoadingState load;
  init_state(net, y, pat, hp, cfg.seed, lat, load);
  {
    const double lp = log_posterior(net, y, lat, load, hp, pat);
    if (!std::isfinite(lp)) {
      std::ostringstream os;
      os << "non-finite log-posterior at initialization (network "
         << network_log_lik(net, lat) << ", interp " << interp_log_lik(y, load, lat)
         << ", prior " << log_prior(lat, load, hp, pat) << ")";
      throw InitError(os.str());
    }
  }

  SamplerRngs rngs(cfg.seed);
  ChainResult result;
  result.step_trace.reserve(static_cast<size_t>(cfg.iters));

  double step_alpha = cfg.mh_step_alpha;
  double step_f = cfg.mh_step_f;
  double batch_acc_alpha = 0.0;
  double batch_acc_f = 0.0;
  std::int64_t batch_count = 0;
  std::int64_t batch_index = 0;

  double post_acc_alpha = 0.0;
  double post_acc_f = 0.0;
  std::int64_t post_count = 0;

  const double kMinLogStep = std::log(1e-4);
  const double kMaxLogStep = std::log(1e3);

  for (std::int64_t t = 1; t <= cfg.iters; ++t) {
    const SweepStats stats =
        sweep(lat, load, net, y, pat, hp, step_alpha, step_f, rngs, cfg.mutate_tau);
    result.step_trace.push_back({t, step_alpha, step_f});

    if (t <= cfg.burnin) {
      batch_acc_alpha += stats.alpha_accept;
      batch_acc_f += stats.position_accept;
      ++batch_count;
      if (batch_count == cfg.adapt_window) {
        ++batch_index;
        // Robbins-Monro on the log step, frozen at the end of burnin.
        const double gain = 1.0 / std::sqrt(static_cast<double>(batch_index));
        const double mean_alpha = batch_acc_alpha / batch_count;
        const double mean_f = batch_acc_f / batch_count;
        double ls_alpha = std::log(step_alpha) + gain * (mean_alpha - cfg.target_accept);
        double ls_f = std::log(step_f) + gain * (mean_f - cfg.target_accept);
        step_alpha = std::exp(std::clamp(ls_alpha, kMinLogStep, kMaxLogStep));
        step_f = std::exp(std::clamp(ls_f, kMinLogStep, kMaxLogStep));
        batch_acc_alpha = batch_acc_f = 0.0;
        batch_count = 0;
      }
    } else {
      post_acc_alpha += stats.alpha_accept;
      post_acc_f += stats.position_accept;
      ++post_count;

      const std::int64_t j = t - cfg.burnin;
      if (j % cfg.thin == 0) {
        ChainRecord rec;
        rec.draw = t;
        rec.alpha = lat.alpha;
        rec.positions = lat.positions;
        rec.lambda = load.lambda;
        rec.indicators = load.indicators;
        rec.tau = load.tau;
        rec.col_scale = load.col_scale;
        rec.kappa = load.kappa;
        rec.idio_var = load.idio_var;
        rec.log_posterior = log_posterior(net, y, lat, load, hp, pat);
        const ValidationReport rep = validate_state(lat, load, pat);
        if (!rep.ok())
          throw InvalidState("sampler produced an invalid record: " +
                             rep.violations.front());
        if (sink) sink(rec);
        if (keep_records) result.records.push_back(std::move(rec));
      }
    }
  }

  result.acceptance.alpha_rate = post_count > 0 ? post_acc_alpha / post_count : 0.0;
  result.acceptance.position_rate = post_count > 0 ? post_acc_f / post_count : 0.0;
  result.acceptance.final_step_alpha = step_alpha;
  result.acceptance.final_step_f = step_f;
  return result;
}

}  // namespace lsnet
