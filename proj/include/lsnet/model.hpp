#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lsnet/errors.hpp"

namespace lsnet {

using WeightMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Symmetric integer edge weights over n nodes; the diagonal is unused.
struct WeightedNetwork {
  WeightMatrix weights;

  int n() const { return static_cast<int>(weights.rows()); }
};

// Throws DataError unless weights are square, symmetric, and non-negative
// with n >= 2.
void check_network(const WeightedNetwork& net);

// Intercept alpha and the d x n position matrix (column i = node i).
struct LatentState {
  double alpha = 0.0;
  Eigen::MatrixXd positions;
  bool centered = false;

  int d() const { return static_cast<int>(positions.rows()); }
  int n() const { return static_cast<int>(positions.cols()); }
};

// Per-coordinate prior variance of a position, (1 - 1/d)^{-1}.
// Undefined at d = 1, which the model rejects everywhere.
double position_prior_variance(int d);

enum class CellKind : std::uint8_t { kFree = 0, kFixedZero = 1, kPositiveDiagonal = 2 };

enum class RestrictionKind : std::uint8_t { kUnrestricted = 0, kPlt = 1, kGlt = 2 };

// Per-cell constraint map for the p x d loading matrix.
struct RestrictionPattern {
  RestrictionKind kind = RestrictionKind::kUnrestricted;
  std::vector<int> pivots;  // 1-based pivot row per column; empty if unrestricted
  int p = 0;
  int d = 0;
  std::vector<CellKind> cells;  // row-major p x d

  CellKind cell(int l, int k) const { return cells[static_cast<size_t>(l) * d + k]; }
  bool row_all_fixed_zero(int l) const;
};

// pivots are 1-based, strictly increasing, length d, all <= p. PLT is
// GLT with pivots (1,...,d); Unrestricted ignores pivots.
RestrictionPattern build_pattern(RestrictionKind kind, int p, int d,
                                 const std::vector<int>& pivots = {});

std::string restriction_kind_name(RestrictionKind kind);
RestrictionKind restriction_kind_from_name(const std::string& name);

// Loadings, spike/slab indicators, and every scale tied to them.
struct LoadingState {
  Eigen::MatrixXd lambda;     // p x d
  Eigen::MatrixXi indicators; // p x d, 1 = slab, 0 = spike
  Eigen::VectorXd tau;        // p, row inclusion probabilities in (0,1)
  Eigen::VectorXd col_scale;  // d, sigma^2_k > 0
  double kappa = 1.0;         // global slab scale > 0
  Eigen::VectorXd idio_var;   // p, idiosyncratic variances > 0

  int p() const { return static_cast<int>(lambda.rows()); }
  int d() const { return static_cast<int>(lambda.cols()); }
};

struct Hyperparams {
  double sigma2_alpha = 10.0;
  double c0 = 2.5;       // idiosyncratic IG shape
  double C0 = 2.5;       // idiosyncratic IG scale
  double c_sigma = 2.5;  // column-scale IG shape
  double b_sigma = 2.5;  // column-scale IG scale
  double c_kappa = 2.5;
  double b_kappa = 2.5;
  double tau_a = 1.0;
  double tau_b = 1.0;
};

void check_hyperparams(const Hyperparams& hp);

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Lists every violated invariant; never mutates its inputs. Throws
// DimensionError if the shapes do not even agree.
ValidationReport validate_state(const LatentState& lat, const LoadingState& load,
                                const RestrictionPattern& pat);

// p x n interpretation variables.
struct InterpData {
  Eigen::MatrixXd y;

  int p() const { return static_cast<int>(y.rows()); }
  int n() const { return static_cast<int>(y.cols()); }
};

}  // namespace lsnet
