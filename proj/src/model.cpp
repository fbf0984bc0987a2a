#include "lsnet/model.hpp"

#include <cmath>
#include <sstream>

namespace lsnet {

namespace {

constexpr double kCenterTol = 1e-8;

std::string cell_name(int l, int k) {
  std::ostringstream os;
  os << "(" << l + 1 << "," << k + 1 << ")";
  return os.str();
}

}  // namespace

void check_network(const WeightedNetwork& net) {
  const auto n = net.weights.rows();
  if (n < 2 || net.weights.cols() != n)
    throw DataError("network must be square with n >= 2");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (net.weights(i, j) != net.weights(j, i))
        throw DataError("network weights must be symmetric");
      if (net.weights(i, j) < 0)
        throw DataError("network weights must be non-negative");
    }
  }
}

double position_prior_variance(int d) {
  if (d < 2) throw DimensionError("latent dimension must be >= 2");
  return 1.0 / (1.0 - 1.0 / static_cast<double>(d));
}

bool RestrictionPattern::row_all_fixed_zero(int l) const {
  for (int k = 0; k < d; ++k)
    if (cell(l, k) != CellKind::kFixedZero) return false;
  return true;
}

RestrictionPattern build_pattern(RestrictionKind kind, int p, int d,
                                 const std::vector<int>& pivots) {
  if (d < 2) throw DimensionError("latent dimension must be >= 2");
  if (p < d) throw DimensionError("need p >= d loading rows");

  RestrictionPattern pat;
  pat.kind = kind;
  pat.p = p;
  pat.d = d;
  pat.cells.assign(static_cast<size_t>(p) * d, CellKind::kFree);
  if (kind == RestrictionKind::kUnrestricted) return pat;

  std::vector<int> piv = pivots;
  if (kind == RestrictionKind::kPlt) {
    piv.resize(d);
    for (int k = 0; k < d; ++k) piv[k] = k + 1;
  } else {
    if (static_cast<int>(piv.size()) != d)
      throw InvalidPivots("need one pivot row per column");
    for (int k = 0; k < d; ++k) {
      if (piv[k] < 1 || piv[k] > p)
        throw InvalidPivots("pivot rows must lie in 1..p");
      if (k > 0 && piv[k] <= piv[k - 1])
        throw InvalidPivots("pivot rows must be strictly increasing");
    }
  }
  pat.pivots = piv;
  for (int k = 0; k < d; ++k) {
    const int pivot_row = piv[k] - 1;
    for (int l = 0; l < pivot_row; ++l)
      pat.cells[static_cast<size_t>(l) * d + k] = CellKind::kFixedZero;
    pat.cells[static_cast<size_t>(pivot_row) * d + k] = CellKind::kPositiveDiagonal;
  }
  return pat;
}

std::string restriction_kind_name(RestrictionKind kind) {
  switch (kind) {
    case RestrictionKind::kUnrestricted:
      return "unrestricted";
    case RestrictionKind::kPlt:
      return "plt";
    case RestrictionKind::kGlt:
      return "glt";
  }
  return "unrestricted";
}

RestrictionKind restriction_kind_from_name(const std::string& name) {
  if (name == "unrestricted" || name == "none") return RestrictionKind::kUnrestricted;
  if (name == "plt") return RestrictionKind::kPlt;
  if (name == "glt") return RestrictionKind::kGlt;
  throw UsageError("unknown restriction kind: " + name);
}

void check_hyperparams(const Hyperparams& hp) {
  const double vals[] = {hp.sigma2_alpha, hp.c0,      hp.C0,    hp.c_sigma,
                         hp.b_sigma,      hp.c_kappa, hp.b_kappa, hp.tau_a,
                         hp.tau_b};
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v))
      throw DataError("hyperparameters must be strictly positive and finite");
}

ValidationReport validate_state(const LatentState& lat, const LoadingState& load,
                                const RestrictionPattern& pat) {
  if (lat.d() != load.d() || load.p() != pat.p || load.d() != pat.d)
    throw DimensionError("latent/loading/pattern dimensions disagree");
  if (load.tau.size() != load.p() || load.idio_var.size() != load.p() ||
      load.col_scale.size() != load.d())
    throw DimensionError("loading state vector lengths disagree");

  ValidationReport rep;
  auto flag = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (!std::isfinite(lat.alpha)) flag("alpha not finite");
  if (!lat.positions.allFinite()) flag("positions not finite");
  if (lat.d() < 2) flag("latent dimension below 2");

  if (lat.centered) {
    for (int k = 0; k < lat.d(); ++k) {
      const double row_sum = lat.positions.row(k).sum();
      if (std::abs(row_sum) > kCenterTol) {
        std::ostringstream os;
        os << "center drift row " << k + 1 << " (sum " << row_sum << ")";
        flag(os.str());
      }
    }
  }

  if (!load.lambda.allFinite()) flag("lambda not finite");
  for (int l = 0; l < load.p(); ++l) {
    for (int k = 0; k < load.d(); ++k) {
      const double lam = load.lambda(l, k);
      const int ind = load.indicators(l, k);
      if (ind != 0 && ind != 1) flag("indicator not binary at " + cell_name(l, k));
      if ((lam == 0.0) != (ind == 0))
        flag("lambda/indicator mismatch at " + cell_name(l, k));
      switch (pat.cell(l, k)) {
        case CellKind::kFixedZero:
          if (lam != 0.0) flag("FixedZero cell nonzero at " + cell_name(l, k));
          if (ind != 0) flag("FixedZero cell active at " + cell_name(l, k));
          break;
        case CellKind::kPositiveDiagonal:
          if (!(lam > 0.0)) flag("PositiveDiagonal cell not positive at " + cell_name(l, k));
          if (ind != 1) flag("PositiveDiagonal cell inactive at " + cell_name(l, k));
          break;
        case CellKind::kFree:
          break;
      }
    }
  }

  for (int l = 0; l < load.p(); ++l) {
    if (!(load.tau[l] > 0.0 && load.tau[l] < 1.0))
      flag("tau outside (0,1) at row " + std::to_string(l + 1));
    if (!(load.idio_var[l] > 0.0) || !std::isfinite(load.idio_var[l]))
      flag("idio_var not positive at row " + std::to_string(l + 1));
  }
  for (int k = 0; k < load.d(); ++k)
    if (!(load.col_scale[k] > 0.0) || !std::isfinite(load.col_scale[k]))
      flag("col_scale not positive at column " + std::to_string(k + 1));
  if (!(load.kappa > 0.0) || !std::isfinite(load.kappa)) flag("kappa not positive");

  return rep;
}

}  // namespace lsnet
