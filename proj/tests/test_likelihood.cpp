#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsnet/likelihood.hpp"
#include "test_util.hpp"

using namespace lsnet;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent term-by-term oracle for the Poisson sum.
double network_oracle(const WeightedNetwork& net, const LatentState& lat) {
  long double total = 0.0L;
  for (int i = 0; i < net.n(); ++i) {
    for (int j = i + 1; j < net.n(); ++j) {
      double dist2 = 0.0;
      for (int k = 0; k < lat.d(); ++k) {
        const double diff = lat.positions(k, i) - lat.positions(k, j);
        dist2 += diff * diff;
      }
      const double theta = std::exp(lat.alpha - dist2);
      const auto w = static_cast<double>(net.weights(i, j));
      total += w * std::log(theta) - theta - std::lgamma(w + 1.0);
    }
  }
  return static_cast<double>(total);
}

// Independent per-entry Gaussian oracle.
double interp_oracle(const InterpData& y, const LoadingState& load,
                     const LatentState& lat) {
  long double total = 0.0L;
  for (int l = 0; l < y.p(); ++l) {
    for (int i = 0; i < y.n(); ++i) {
      double mean = 0.0;
      for (int k = 0; k < lat.d(); ++k) mean += load.lambda(l, k) * lat.positions(k, i);
      const double var = load.idio_var[l];
      const double r = y.y(l, i) - mean;
      total += std::log(1.0 / std::sqrt(2.0 * kPi * var)) - r * r / (2.0 * var);
    }
  }
  return static_cast<double>(total);
}

double ig_oracle(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

double norm_oracle(double x, double var) {
  return std::log(1.0 / std::sqrt(2.0 * kPi * var)) - x * x / (2.0 * var);
}

// Independent sum of every named prior density.
double prior_oracle(const LatentState& lat, const LoadingState& load,
                    const Hyperparams& hp, const RestrictionPattern& pat) {
  long double total = 0.0L;
  total += norm_oracle(lat.alpha, hp.sigma2_alpha);
  const double v = 1.0 / (1.0 - 1.0 / lat.d());
  for (int i = 0; i < lat.n(); ++i)
    for (int k = 0; k < lat.d(); ++k) total += norm_oracle(lat.positions(k, i), v);
  for (int l = 0; l < load.p(); ++l) total += ig_oracle(load.idio_var[l], hp.c0, hp.C0);
  for (int k = 0; k < load.d(); ++k)
    total += ig_oracle(load.col_scale[k], hp.c_sigma, hp.b_sigma);
  total += ig_oracle(load.kappa, hp.c_kappa, hp.b_kappa);
  // Beta(1,1) rows contribute zero.
  for (int l = 0; l < load.p(); ++l) {
    for (int k = 0; k < load.d(); ++k) {
      const double slab_var = load.kappa * load.col_scale[k];
      if (pat.cell(l, k) == CellKind::kFree) {
        if (load.indicators(l, k) == 1)
          total += std::log(load.tau[l]) + norm_oracle(load.lambda(l, k), slab_var);
        else
          total += std::log(1.0 - load.tau[l]);
      } else if (pat.cell(l, k) == CellKind::kPositiveDiagonal) {
        total += std::log(2.0) + norm_oracle(load.lambda(l, k), slab_var);
      }
    }
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("pairwise sum matches serial long double summation") {
  Philox rng(3, Stream::kTest);
  std::vector<double> terms(1001);
  long double serial = 0.0L;
  for (auto& t : terms) {
    t = rng.normal() * 1e6;
    serial += t;
  }
  CHECK(pairwise_sum(terms) ==
        doctest::Approx(static_cast<double>(serial)).epsilon(1e-12));
}

TEST_CASE("intensity spot values") {
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 0.0;
  CHECK(intensity(0.0, a, a) == doctest::Approx(1.0));
  CHECK(intensity(1.0, a, b) == doctest::Approx(1.0));
  CHECK(intensity(0.0, a, b) == doctest::Approx(std::exp(-1.0)));
  CHECK(intensity(0.0, a, b) == intensity(0.0, b, a));  // exact symmetry
  Eigen::VectorXd bad(2);
  bad << std::nan(""), 0.0;
  CHECK_THROWS_AS(intensity(0.0, a, bad), NumericError);
  Eigen::VectorXd c(3);
  c.setZero();
  CHECK_THROWS_AS(intensity(0.0, a, c), DimensionError);
}

TEST_CASE("network log lik single pair w=2 theta=1") {
  WeightedNetwork net;
  net.weights = WeightMatrix::Zero(2, 2);
  net.weights(0, 1) = net.weights(1, 0) = 2;
  LatentState lat;
  lat.alpha = 0.0;
  lat.positions = Eigen::MatrixXd::Zero(2, 2);  // equal positions, theta = 1
  CHECK(network_log_lik(net, lat) == doctest::Approx(-1.0 - std::log(2.0)));
}

TEST_CASE("network log lik with all positions equal") {
  const int n = 4;
  WeightedNetwork net = test::random_network(n, 5);
  LatentState lat;
  lat.alpha = 0.0;
  lat.positions = Eigen::MatrixXd::Zero(2, n);
  double expected = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      expected += -1.0 - std::lgamma(static_cast<double>(net.weights(i, j)) + 1.0);
  CHECK(network_log_lik(net, lat) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("network log lik matches the brute-force oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    WeightedNetwork net = test::random_network(3, seed);
    LatentState lat;
    LoadingState load;
    const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
    test::random_state(3, 2, 3, pat, seed, lat, load);
    CHECK(network_log_lik(net, lat) ==
          doctest::Approx(network_oracle(net, lat)).epsilon(1e-12));
  }
}

TEST_CASE("network log lik rejects negative weights") {
  WeightedNetwork net;
  net.weights = WeightMatrix::Zero(2, 2);
  net.weights(0, 1) = net.weights(1, 0) = -3;
  LatentState lat;
  lat.positions = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(network_log_lik(net, lat), DataError);
}

TEST_CASE("interp log lik spot values") {
  const RestrictionPattern pat = build_pattern(RestrictionKind::kUnrestricted, 2, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(3, 2, 2, pat, 7, lat, load);
  load.idio_var.setOnes();
  InterpData y;
  y.y = load.lambda * lat.positions;  // zero residual
  const double expected = -(2.0 * 3.0 / 2.0) * std::log(2.0 * kPi);
  CHECK(interp_log_lik(y, load, lat) == doctest::Approx(expected).epsilon(1e-12));

  // p=1, n=1 with variance 2 and zero mean: -log(sqrt(4 pi)).
  LatentState lat1;
  lat1.alpha = 0.0;
  lat1.positions = Eigen::MatrixXd::Zero(2, 1);
  LoadingState load1 = load;
  load1.lambda = Eigen::MatrixXd::Zero(1, 2);
  load1.indicators = Eigen::MatrixXi::Zero(1, 2);
  load1.tau = Eigen::VectorXd::Constant(1, 0.5);
  load1.idio_var = Eigen::VectorXd::Constant(1, 2.0);
  InterpData y1;
  y1.y = Eigen::MatrixXd::Zero(1, 1);
  CHECK(interp_log_lik(y1, load1, lat1) ==
        doctest::Approx(-0.5 * std::log(4.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("interp log lik matches the per-entry oracle") {
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 2, 2);
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    LatentState lat;
    LoadingState load;
    test::random_state(3, 2, 2, pat, seed, lat, load);
    InterpData y = test::random_interp(2, 3, seed + 100);
    CHECK(interp_log_lik(y, load, lat) ==
          doctest::Approx(interp_oracle(y, load, lat)).epsilon(1e-12));
  }
}

TEST_CASE("interp log lik rejects zero variance") {
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 2, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(3, 2, 2, pat, 7, lat, load);
  load.idio_var[0] = 0.0;
  InterpData y = test::random_interp(2, 3, 8);
  CHECK_THROWS_AS(interp_log_lik(y, load, lat), NumericError);
}

TEST_CASE("log prior matches the term-by-term oracle") {
  const Hyperparams hp;
  for (auto kind : {RestrictionKind::kPlt, RestrictionKind::kUnrestricted}) {
    const RestrictionPattern pat = build_pattern(kind, 4, 2);
    for (std::uint64_t seed : {21u, 22u}) {
      LatentState lat;
      LoadingState load;
      test::random_state(5, 2, 4, pat, seed, lat, load);
      CHECK(log_prior(lat, load, hp, pat) ==
            doctest::Approx(prior_oracle(lat, load, hp, pat)).epsilon(1e-12));
    }
  }
}

TEST_CASE("log prior rejects a state that violates the pattern") {
  const Hyperparams hp;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 4, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(5, 2, 4, pat, 31, lat, load);
  load.lambda(0, 1) = 1.0;
  load.indicators(0, 1) = 1;
  CHECK_THROWS_AS(log_prior(lat, load, hp, pat), InvalidState);
}

TEST_CASE("log posterior is the sum of its three parts") {
  const Hyperparams hp;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(4, 2, 3, pat, 41, lat, load);
  WeightedNetwork net = test::random_network(4, 42);
  InterpData y = test::random_interp(3, 4, 43);
  const double total = log_posterior(net, y, lat, load, hp, pat);
  const double parts = network_log_lik(net, lat) + interp_log_lik(y, load, lat) +
                       log_prior(lat, load, hp, pat);
  CHECK(total == doctest::Approx(parts).epsilon(1e-14));
}

TEST_CASE("changing alpha only moves the network and alpha-prior terms") {
  const Hyperparams hp;
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  LatentState lat;
  LoadingState load;
  test::random_state(4, 2, 3, pat, 51, lat, load);
  WeightedNetwork net = test::random_network(4, 52);
  InterpData y = test::random_interp(3, 4, 53);

  LatentState lat2 = lat;
  lat2.alpha += 0.7;
  const double lhs = log_posterior(net, y, lat2, load, hp, pat) -
                     log_posterior(net, y, lat, load, hp, pat);
  const double rhs = (network_log_lik(net, lat2) - network_log_lik(net, lat)) +
                     (norm_oracle(lat2.alpha, hp.sigma2_alpha) -
                      norm_oracle(lat.alpha, hp.sigma2_alpha));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("network invariances and interp sensitivity under orthogonal maps") {
  Philox rng(61, Stream::kTest);
  const RestrictionPattern pat = build_pattern(RestrictionKind::kPlt, 3, 2);
  for (int rep = 0; rep < 100; ++rep) {
    LatentState lat;
    LoadingState load;
    test::random_state(10, 2, 3, pat, 1000 + rep, lat, load);
    WeightedNetwork net = test::random_network(10, 2000 + rep);
    InterpData y = test::random_interp(3, 10, 3000 + rep);

    const double base = network_log_lik(net, lat);
    const double interp_base = interp_log_lik(y, load, lat);

    const Eigen::Matrix2d q = test::random_orthogonal_2d(rng);
    LatentState rotated = lat;
    rotated.positions = q * lat.positions;
    CHECK(std::abs(network_log_lik(net, rotated) - base) < 1e-10);
    CHECK(std::abs(interp_log_lik(y, load, rotated) - interp_base) > 1e-6);

    LatentState shifted = lat;
    Eigen::Vector2d t;
    t << rng.normal(), rng.normal();
    shifted.positions = lat.positions.colwise() + t;
    CHECK(std::abs(network_log_lik(net, shifted) - base) < 1e-10);
  }
}

TEST_CASE("single-pair likelihood with w=0 decreases in theta") {
  WeightedNetwork net;
  net.weights = WeightMatrix::Zero(2, 2);
  LatentState lat;
  lat.positions = Eigen::MatrixXd::Zero(2, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    lat.alpha = alpha;  // theta = exp(alpha), increasing
    const double ll = network_log_lik(net, lat);
    CHECK(ll < prev);
    prev = ll;
  }
}
