#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsnet/diagnostics.hpp"
#include "test_util.hpp"

using namespace lsnet;

namespace {

Eigen::MatrixXd random_config(int d, int n, std::uint64_t seed) {
  Philox rng(seed, Stream::kTest);
  Eigen::MatrixXd m(d, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) m(k, i) = rng.normal();
  return m;
}

// Exhaustive d=2 oracle: rotation grid with optional reflection.
double grid_search_rmse(const Eigen::MatrixXd& draw, const Eigen::MatrixXd& target) {
  const Eigen::VectorXd draw_mean = draw.rowwise().mean();
  const Eigen::VectorXd target_mean = target.rowwise().mean();
  const Eigen::MatrixXd draw_c = draw.colwise() - draw_mean;
  double best = std::numeric_limits<double>::infinity();
  for (int refl = 0; refl < 2; ++refl) {
    for (int step = 0; step < 3142 * 2; ++step) {
      const double angle = step * 0.001;
      Eigen::Matrix2d q;
      q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      if (refl) q.col(1) = -q.col(1);
      const Eigen::MatrixXd aligned = (q * draw_c).colwise() + target_mean;
      best = std::min(best, position_rmse(aligned, target));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("procrustes on the target itself is exact") {
  const Eigen::MatrixXd target = random_config(2, 6, 1);
  const AlignResult res = procrustes_align({target}, target);
  CHECK(res.rmse_before[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(res.rmse_after[0] < 1e-12);
  CHECK_FALSE(res.degenerate[0]);
}

TEST_CASE("procrustes recovers a quarter-turn exactly") {
  const Eigen::MatrixXd target = random_config(2, 6, 2);
  Eigen::Matrix2d q;
  q << 0.0, -1.0, 1.0, 0.0;  // 90 degrees
  const Eigen::MatrixXd draw = q * target;
  const AlignResult res = procrustes_align({draw}, target);
  CHECK(res.rmse_before[0] > 0.1);
  CHECK(res.rmse_after[0] < 1e-12);
}

TEST_CASE("procrustes matches a dense rotation grid search") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const Eigen::MatrixXd target = random_config(2, 5, seed);
    const Eigen::MatrixXd draw = random_config(2, 5, seed + 50);
    const AlignResult res = procrustes_align({draw}, target);
    const double grid = grid_search_rmse(draw, target);
    CHECK(std::abs(res.rmse_after[0] - grid) < 1e-4);
  }
}

TEST_CASE("procrustes never increases the rmse") {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    const Eigen::MatrixXd target = random_config(2, 7, seed);
    const Eigen::MatrixXd draw = random_config(2, 7, seed + 100);
    const AlignResult res = procrustes_align({draw}, target);
    CHECK(res.rmse_after[0] <= res.rmse_before[0] + 1e-12);
  }
}

TEST_CASE("procrustes flags a degenerate cross-covariance") {
  const Eigen::MatrixXd target = random_config(2, 5, 6);
  const Eigen::MatrixXd draw = Eigen::MatrixXd::Constant(2, 5, 1.3);  // rank zero
  const AlignResult res = procrustes_align({draw}, target);
  CHECK(res.degenerate[0]);
  CHECK(std::isfinite(res.rmse_after[0]));
}

TEST_CASE("ess of white noise is close to the length") {
  Philox rng(7, Stream::kTest);
  std::vector<double> series(10000);
  for (auto& x : series) x = rng.normal();
  const EssResult r = ess(series);
  CHECK_FALSE(r.degenerate);
  CHECK(r.ess / 10000.0 > 0.8);
  CHECK(r.ess / 10000.0 < 1.2);
}

TEST_CASE("ess of an AR(1) chain matches the analytic ratio") {
  Philox rng(8, Stream::kTest);
  const double phi = 0.9;
  std::vector<double> series(10000);
  double x = 0.0;
  for (auto& out : series) {
    x = phi * x + rng.normal();
    out = x;
  }
  const EssResult r = ess(series);
  const double expected = (1.0 - phi) / (1.0 + phi);  // 0.0526
  CHECK(r.ess / 10000.0 > expected * 0.5);
  CHECK(r.ess / 10000.0 < expected * 1.5);
}

TEST_CASE("ess conventions") {
  std::vector<double> constant(100, 3.0);
  const EssResult r = ess(constant);
  CHECK(r.degenerate);
  CHECK(r.ess == 100.0);

  std::vector<double> tiny(5, 1.0);
  CHECK_THROWS_AS(ess(tiny), DataError);
}

TEST_CASE("summarize collapses identical records and counts inclusions") {
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(4, 2, 3, pat, 9, lat, load);

  ChainRecord rec;
  rec.draw = 1;
  rec.alpha = 0.4;
  rec.positions = lat.positions;
  rec.lambda = load.lambda;
  rec.indicators = load.indicators;
  rec.tau = load.tau;
  rec.col_scale = load.col_scale;
  rec.kappa = load.kappa;
  rec.idio_var = load.idio_var;
  rec.log_posterior = -10.0;

  std::vector<ChainRecord> chain(12, rec);
  const ChainSummary s = summarize(chain);
  CHECK(s.alpha.mean == doctest::Approx(0.4));
  CHECK(s.alpha.sd == doctest::Approx(0.0));
  CHECK(s.alpha.q025 == doctest::Approx(0.4));
  CHECK(s.alpha.q975 == doctest::Approx(0.4));
  // Hard-constrained pivots always included, pinned zeros never.
  CHECK(s.inclusion_prob(0, 0) == 1.0);
  CHECK(s.inclusion_prob(0, 1) == 0.0);

  // Two-record chain with lambda in {0, 2}.
  ChainRecord rec2 = rec;
  rec2.lambda(2, 0) = 0.0;
  rec2.indicators(2, 0) = 0;
  ChainRecord rec3 = rec;
  rec3.lambda(2, 0) = 2.0;
  rec3.indicators(2, 0) = 1;
  const ChainSummary s2 = summarize({rec2, rec3});
  CHECK(s2.lambda[2][0].mean == doctest::Approx(1.0));
  CHECK(s2.inclusion_prob(2, 0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(summarize({}), EmptyChain);
}

TEST_CASE("summarize row-zero probability") {
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(4, 2, 3, pat, 10, lat, load);
  ChainRecord rec;
  rec.draw = 1;
  rec.alpha = 0.0;
  rec.positions = lat.positions;
  rec.lambda = load.lambda;
  rec.indicators = load.indicators;
  rec.tau = load.tau;
  rec.col_scale = load.col_scale;
  rec.kappa = load.kappa;
  rec.idio_var = load.idio_var;
  rec.log_posterior = 0.0;

  ChainRecord zero_row = rec;
  zero_row.lambda.row(2).setZero();
  zero_row.indicators.row(2).setZero();
  ChainRecord live_row = rec;
  live_row.lambda(2, 0) = 1.0;
  live_row.indicators(2, 0) = 1;

  const ChainSummary s = summarize({zero_row, live_row, zero_row, zero_row});
  CHECK(s.row_zero_prob[2] == doctest::Approx(0.75));
  CHECK(s.row_zero_prob[0] == 0.0);  // pivot row can never be zero
}

TEST_CASE("geweke null calibration: two prior streams agree") {
  const Hyperparams hp;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  const int n = 4;
  const int draws = 5000;

  auto collect = [&](std::uint64_t seed) {
    Philox rng(seed, Stream::kGewekeMarginal);
    LatentState lat;
    LoadingState load;
    std::vector<double> alpha(draws), mean_tau(draws), f_sq(draws);
    for (int t = 0; t < draws; ++t) {
      draw_prior_state(hp, pat, n, rng, lat, load);
      alpha[t] = lat.alpha;
      mean_tau[t] = load.tau.mean();
      f_sq[t] = lat.positions.squaredNorm() / n;
    }
    return std::make_tuple(alpha, mean_tau, f_sq);
  };

  const auto [a1, t1, f1] = collect(100);
  const auto [a2, t2, f2] = collect(200);
  auto zstat = [](const std::vector<double>& x, const std::vector<double>& y) {
    const ParamSummary sx = summarize_series(x);
    const ParamSummary sy = summarize_series(y);
    const double se = std::sqrt(sx.sd * sx.sd / x.size() + sy.sd * sy.sd / y.size());
    return (sx.mean - sy.mean) / se;
  };
  CHECK(std::abs(zstat(a1, a2)) < 4.0);
  CHECK(std::abs(zstat(t1, t2)) < 4.0);
  CHECK(std::abs(zstat(f1, f2)) < 4.0);
}

TEST_CASE("geweke smoke run produces finite z for every monitored function") {
  Hyperparams hp;
  hp.sigma2_alpha = 1.0;
  hp.c0 = hp.C0 = 3.0;
  hp.c_sigma = hp.b_sigma = 3.0;
  hp.c_kappa = hp.b_kappa = 3.0;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  GewekeConfig cfg;
  cfg.n = 4;
  cfg.p = 3;
  cfg.draws = 500;
  cfg.thin = 2;
  cfg.seed = 4242;
  const GewekeResult res = geweke_joint_test(hp, pat, cfg);
  REQUIRE(res.names.size() == res.z.size());
  CHECK(res.names.size() >= 10);  // alpha, f, kappa, taus, lambdas, deltas
  for (double z : res.z) CHECK(std::isfinite(z));
  // A short run is noisy; just keep it inside a loose envelope.
  CHECK(res.max_abs_z < 8.0);
}

TEST_CASE("geweke rejects non-micro dimensions") {
  const Hyperparams hp;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  GewekeConfig cfg;
  cfg.n = 50;
  CHECK_THROWS_AS(geweke_joint_test(hp, pat, cfg), TestError);
}
