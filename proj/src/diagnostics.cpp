#include "lsnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "lsnet/simulate.hpp"

namespace lsnet {

double position_rmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("rmse operands differ in shape");
  return (a - b).norm() / std::sqrt(static_cast<double>(a.cols()));
}

AlignResult procrustes_align(const std::vector<Eigen::MatrixXd>& draws,
                             const Eigen::MatrixXd& target) {
  const int d = static_cast<int>(target.rows());
  const int n = static_cast<int>(target.cols());
  if (d > n) throw DimensionError("procrustes needs d <= n");

  const Eigen::VectorXd target_mean = target.rowwise().mean();
  const Eigen::MatrixXd target_c = target.colwise() - target_mean;

  AlignResult out;
  out.aligned.reserve(draws.size());
  for (const Eigen::MatrixXd& draw : draws) {
    if (draw.rows() != d || draw.cols() != n)
      throw DimensionError("draw shape differs from target");
    const Eigen::VectorXd draw_mean = draw.rowwise().mean();
    const Eigen::MatrixXd draw_c = draw.colwise() - draw_mean;

    const Eigen::MatrixXd cross = target_c * draw_c.transpose();  // d x d
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[d - 1];
    bool degenerate = !(smax > 0.0) || smin <= smax * 1e-12;
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    if (!degenerate) q = svd.matrixU() * svd.matrixV().transpose();

    Eigen::MatrixXd aligned = (q * draw_c).colwise() + target_mean;
    out.rmse_before.push_back(position_rmse(draw, target));
    out.rmse_after.push_back(position_rmse(aligned, target));
    out.degenerate.push_back(degenerate);
    out.aligned.push_back(std::move(aligned));
  }
  return out;
}

EssResult ess(std::span<const double> series) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (n < 10) throw DataError("ess needs a series of length >= 10");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  double gamma0 = 0.0;
  for (double x : series) gamma0 += (x - mean) * (x - mean);
  gamma0 /= static_cast<double>(n);
  if (!(gamma0 > 0.0)) return {static_cast<double>(n), true};

  auto autocov = [&](std::int64_t lag) {
    double s = 0.0;
    for (std::int64_t i = 0; i + lag < n; ++i)
      s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(n);
  };

  // Initial positive sequence: sum paired autocorrelations while positive.
  double tau = -1.0;
  for (std::int64_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / gamma0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1e-12);
  const double value = std::min(static_cast<double>(n) / tau, static_cast<double>(n));
  return {value, false};
}

ParamSummary summarize_series(std::span<const double> series) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (n == 0) throw EmptyChain("empty series");
  ParamSummary s;
  for (double x : series) s.mean += x;
  s.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : series) ss += (x - s.mean) * (x - s.mean);
  s.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::int64_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  s.q025 = quantile(0.025);
  s.q975 = quantile(0.975);
  return s;
}

ChainSummary summarize(const std::vector<ChainRecord>& chain) {
  if (chain.empty()) throw EmptyChain("cannot summarize an empty chain");
  const auto m = static_cast<std::int64_t>(chain.size());
  const int p = static_cast<int>(chain.front().lambda.rows());
  const int d = static_cast<int>(chain.front().lambda.cols());
  const int n = static_cast<int>(chain.front().positions.cols());

  ChainSummary out;
  std::vector<double> buf(m);
  auto collect = [&](auto&& get) -> std::span<const double> {
    for (std::int64_t t = 0; t < m; ++t) buf[t] = get(chain[t]);
    return buf;
  };

  out.alpha = summarize_series(collect([](const ChainRecord& r) { return r.alpha; }));
  out.kappa = summarize_series(collect([](const ChainRecord& r) { return r.kappa; }));
  out.log_posterior =
      summarize_series(collect([](const ChainRecord& r) { return r.log_posterior; }));
  out.ess_alpha = ess(collect([](const ChainRecord& r) { return r.alpha; })).ess;
  out.ess_log_posterior =
      ess(collect([](const ChainRecord& r) { return r.log_posterior; })).ess;

  out.lambda.assign(p, std::vector<ParamSummary>(d));
  out.inclusion_prob = Eigen::MatrixXd::Zero(p, d);
  for (int l = 0; l < p; ++l) {
    for (int k = 0; k < d; ++k) {
      out.lambda[l][k] = summarize_series(
          collect([&](const ChainRecord& r) { return r.lambda(l, k); }));
      double incl = 0.0;
      for (const ChainRecord& r : chain) incl += r.indicators(l, k);
      out.inclusion_prob(l, k) = incl / static_cast<double>(m);
    }
  }

  out.row_zero_prob = Eigen::VectorXd::Zero(p);
  for (int l = 0; l < p; ++l) {
    std::int64_t zero_draws = 0;
    for (const ChainRecord& r : chain)
      if ((r.indicators.row(l).array() == 0).all()) ++zero_draws;
    out.row_zero_prob[l] = static_cast<double>(zero_draws) / static_cast<double>(m);
  }

  out.tau.resize(p);
  out.idio_var.resize(p);
  for (int l = 0; l < p; ++l) {
    out.tau[l] =
        summarize_series(collect([&](const ChainRecord& r) { return r.tau[l]; }));
    out.idio_var[l] = summarize_series(
        collect([&](const ChainRecord& r) { return r.idio_var[l]; }));
  }
  out.col_scale.resize(d);
  for (int k = 0; k < d; ++k)
    out.col_scale[k] = summarize_series(
        collect([&](const ChainRecord& r) { return r.col_scale[k]; }));

  out.position_mean = Eigen::MatrixXd::Zero(d, n);
  for (const ChainRecord& r : chain) out.position_mean += r.positions;
  out.position_mean /= static_cast<double>(m);
  return out;
}

// Positions come back recentered, which is the constrained prior the
// sampler targets.
void draw_prior_state(const Hyperparams& hp, const RestrictionPattern& pat, int n,
                      Philox& rng, LatentState& lat, LoadingState& load) {
  const int p = pat.p;
  const int d = pat.d;
  lat.alpha = std::sqrt(hp.sigma2_alpha) * rng.normal();
  const double sd = std::sqrt(position_prior_variance(d));
  lat.positions.resize(d, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) lat.positions(k, i) = sd * rng.normal();
  recenter(lat);

  load.tau.resize(p);
  for (int l = 0; l < p; ++l) load.tau[l] = rng.beta(hp.tau_a, hp.tau_b);
  load.col_scale.resize(d);
  for (int k = 0; k < d; ++k)
    load.col_scale[k] = rng.inverse_gamma(hp.c_sigma, hp.b_sigma);
  load.kappa = rng.inverse_gamma(hp.c_kappa, hp.b_kappa);
  load.idio_var.resize(p);
  for (int l = 0; l < p; ++l) load.idio_var[l] = rng.inverse_gamma(hp.c0, hp.C0);

  load.lambda = Eigen::MatrixXd::Zero(p, d);
  load.indicators = Eigen::MatrixXi::Zero(p, d);
  for (int l = 0; l < p; ++l) {
    for (int k = 0; k < d; ++k) {
      const double slab_sd = std::sqrt(load.kappa * load.col_scale[k]);
      switch (pat.cell(l, k)) {
        case CellKind::kFixedZero:
          break;
        case CellKind::kPositiveDiagonal:
          load.lambda(l, k) = std::abs(slab_sd * rng.normal());
          load.indicators(l, k) = 1;
          break;
        case CellKind::kFree:
          if (rng.bernoulli(load.tau[l])) {
            load.lambda(l, k) = slab_sd * rng.normal();
            load.indicators(l, k) = 1;
          }
          break;
      }
    }
  }
}

namespace {

struct TestFunctions {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> lambda_cells;  // monitored (l,k)

  explicit TestFunctions(const RestrictionPattern& pat) {
    names = {"alpha", "mean_f_sq", "kappa", "mean_tau", "mean_delta"};
    for (int l = 0; l < pat.p; ++l)
      for (int k = 0; k < pat.d; ++k)
        if (pat.cell(l, k) != CellKind::kFixedZero) {
          lambda_cells.emplace_back(l, k);
          const std::string tag =
              pat.cell(l, k) == CellKind::kFree ? "lambda" : "lambda_pivot";
          names.push_back(tag + "_" + std::to_string(l + 1) + "_" +
                          std::to_string(k + 1));
        }
    for (int l = 0; l < pat.p; ++l) names.push_back("tau_" + std::to_string(l + 1));
  }

  std::vector<double> eval(const LatentState& lat, const LoadingState& load,
                           const RestrictionPattern& pat) const {
    std::vector<double> g;
    g.reserve(names.size());
    g.push_back(lat.alpha);
    g.push_back(lat.positions.squaredNorm() / static_cast<double>(lat.n()));
    g.push_back(load.kappa);
    g.push_back(load.tau.mean());
    int free_cells = 0;
    int active = 0;
    for (int l = 0; l < pat.p; ++l)
      for (int k = 0; k < pat.d; ++k)
        if (pat.cell(l, k) == CellKind::kFree) {
          ++free_cells;
          active += load.indicators(l, k);
        }
    g.push_back(free_cells > 0 ? static_cast<double>(active) / free_cells : 0.0);
    for (auto [l, k] : lambda_cells) g.push_back(load.lambda(l, k));
    for (int l = 0; l < pat.p; ++l) g.push_back(load.tau[l]);
    return g;
  }
};

}  // namespace

GewekeResult geweke_joint_test(const Hyperparams& hp, const RestrictionPattern& pat,
                               const GewekeConfig& cfg) {
  if (cfg.n > 5 || cfg.p > 3 || pat.d != 2)
    throw TestError("geweke test runs on micro models only (n <= 5, p <= 3, d = 2)");
  if (pat.p != cfg.p) throw DimensionError("pattern rows disagree with config");
  if (cfg.draws < 100) throw TestError("need at least 100 draws per stream");
  check_hyperparams(hp);

  const TestFunctions fns(pat);
  const auto n_fns = fns.names.size();
  const auto draws = static_cast<size_t>(cfg.draws);

  // Marginal-conditional stream: independent prior draws.
  std::vector<std::vector<double>> marginal(n_fns, std::vector<double>(draws));
  {
    Philox rng(cfg.seed, Stream::kGewekeMarginal);
    LatentState lat;
    LoadingState load;
    for (size_t t = 0; t < draws; ++t) {
      draw_prior_state(hp, pat, cfg.n, rng, lat, load);
      const std::vector<double> g = fns.eval(lat, load, pat);
      for (size_t f = 0; f < n_fns; ++f) marginal[f][t] = g[f];
    }
  }

  // Successive-conditional stream: one posterior sweep alternating with data
  // regeneration from the current parameters. Starts in stationarity.
  std::vector<std::vector<double>> successive(n_fns, std::vector<double>(draws));
  {
    Philox prior_rng(cfg.seed + 1, Stream::kGewekeMarginal);
    Philox data_rng(cfg.seed + 1, Stream::kGewekeData);
    SamplerRngs rngs(cfg.seed + 1);
    LatentState lat;
    LoadingState load;
    draw_prior_state(hp, pat, cfg.n, prior_rng, lat, load);

    auto regen = [&](WeightedNetwork& net, InterpData& y) {
      const std::uint64_t s = data_rng.next_u64();
      net = gen_network(lat, s);
      y = gen_interp(lat, load, s);
    };
    WeightedNetwork net;
    InterpData y;
    regen(net, y);

    for (size_t t = 0; t < draws; ++t) {
      for (std::int64_t s = 0; s < cfg.thin; ++s) {
        sweep(lat, load, net, y, pat, hp, cfg.mh_step_alpha, cfg.mh_step_f, rngs,
              cfg.mutate_tau);
        regen(net, y);
      }
      const std::vector<double> g = fns.eval(lat, load, pat);
      for (size_t f = 0; f < n_fns; ++f) successive[f][t] = g[f];
    }
  }

  GewekeResult out;
  out.names = fns.names;
  for (size_t f = 0; f < n_fns; ++f) {
    const ParamSummary sm = summarize_series(marginal[f]);
    const ParamSummary ss = summarize_series(successive[f]);
    const double se_m2 = sm.sd * sm.sd / static_cast<double>(draws);
    const double n_eff = std::max(ess(successive[f]).ess, 1.0);
    const double se_s2 = ss.sd * ss.sd / n_eff;
    const double se = std::sqrt(se_m2 + se_s2);
    const double z = se > 0.0 ? (sm.mean - ss.mean) / se : 0.0;
    if (!std::isfinite(z)) throw TestError("non-finite z for " + fns.names[f]);
    out.mean_marginal.push_back(sm.mean);
    out.mean_successive.push_back(ss.mean);
    out.se.push_back(se);
    out.z.push_back(z);
    out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
  }
  return out;
}

}  // namespace lsnet
