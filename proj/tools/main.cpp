#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsnet/diagnostics.hpp"
#include "lsnet/io.hpp"
#include "lsnet/likelihood.hpp"
#include "lsnet/sampler.hpp"
#include "lsnet/simulate.hpp"
#include "lsnet/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("LSNET_SEED");
  if (env == nullptr || *env == '\0') return flag_seed;
  try {
    size_t pos = 0;
    const std::uint64_t v = std::stoull(env, &pos);
    if (pos != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw lsnet::UsageError(std::string("LSNET_SEED is not a valid seed: ") + env);
  }
}

lsnet::RestrictionPattern pattern_from_flags(const std::string& restriction, int p,
                                             int d, const std::vector<int>& pivots) {
  const lsnet::RestrictionKind kind = lsnet::restriction_kind_from_name(restriction);
  if (kind == lsnet::RestrictionKind::kGlt && pivots.empty())
    throw lsnet::UsageError("glt requires --pivots (comma-separated rows)");
  if (kind != lsnet::RestrictionKind::kGlt && !pivots.empty())
    throw lsnet::UsageError("--pivots only applies to --restriction glt");
  try {
    return lsnet::build_pattern(kind, p, d, pivots);
  } catch (const lsnet::InvalidPivots& e) {
    throw lsnet::UsageError(e.what());
  }
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw lsnet::IoError("cannot create output directory " + dir.string());
}

json hyperparams_to_json(const lsnet::Hyperparams& hp) {
  return {{"sigma2_alpha", hp.sigma2_alpha}, {"c0", hp.c0},
          {"C0", hp.C0},                     {"c_sigma", hp.c_sigma},
          {"b_sigma", hp.b_sigma},           {"c_kappa", hp.c_kappa},
          {"b_kappa", hp.b_kappa},           {"tau_a", hp.tau_a},
          {"tau_b", hp.tau_b}};
}

void add_hyperparam_flags(CLI::App* cmd, lsnet::Hyperparams& hp) {
  cmd->add_option("--sigma2-alpha", hp.sigma2_alpha, "Prior variance of the intercept");
  cmd->add_option("--c0", hp.c0, "Idiosyncratic-variance IG shape");
  cmd->add_option("--C0", hp.C0, "Idiosyncratic-variance IG scale");
  cmd->add_option("--c-sigma", hp.c_sigma, "Column-scale IG shape");
  cmd->add_option("--b-sigma", hp.b_sigma, "Column-scale IG scale");
  cmd->add_option("--c-kappa", hp.c_kappa, "Global slab scale IG shape");
  cmd->add_option("--b-kappa", hp.b_kappa, "Global slab scale IG scale");
}

// ---------------------------------------------------------------- simulate --

struct SimulateArgs {
  int nodes = 30;
  int dim = 2;
  int p = 4;
  std::string restriction = "plt";
  std::vector<int> pivots;
  std::uint64_t seed = 42;
  std::string out;
  lsnet::TruthConfig truth_cfg;
};

int cmd_simulate(const SimulateArgs& args) {
  if (args.dim < 2)
    throw lsnet::UsageError(
        "--dim must be >= 2 (the position prior is undefined at d = 1)");
  if (args.nodes < 3) throw lsnet::UsageError("--nodes must be >= 3");
  if (args.p < args.dim) throw lsnet::UsageError("--p must be >= --dim");

  const std::uint64_t seed = resolve_seed(args.seed);
  const lsnet::RestrictionPattern pat =
      pattern_from_flags(args.restriction, args.p, args.dim, args.pivots);
  const lsnet::Truth truth =
      lsnet::gen_truth(args.nodes, args.dim, args.p, pat, seed, args.truth_cfg);
  const lsnet::WeightedNetwork net = lsnet::gen_network(truth.latent, seed);
  const lsnet::InterpData y = lsnet::gen_interp(truth.latent, truth.loading, seed);

  const fs::path out(args.out);
  ensure_out_dir(out);
  lsnet::write_truth_json(out / "truth.json", truth, pat);
  lsnet::write_network_csv(out / "network.csv", net);
  lsnet::write_interp_csv(out / "interp.csv", y);

  json echo;
  echo["format_version"] = lsnet::kFormatVersion;
  echo["command"] = "simulate";
  echo["nodes"] = args.nodes;
  echo["dim"] = args.dim;
  echo["p"] = args.p;
  echo["restriction"] = lsnet::pattern_to_json(pat);
  echo["seed"] = seed;
  echo["slab_sd"] = args.truth_cfg.slab_sd;
  echo["idio_var"] = args.truth_cfg.idio_var;
  echo["zero_rows"] = args.truth_cfg.zero_rows;
  echo["mean_weight_lo"] = args.truth_cfg.mean_weight_lo;
  echo["mean_weight_hi"] = args.truth_cfg.mean_weight_hi;
  lsnet::write_json(out / "config-echo.json", echo);

  std::cout << "wrote fixture to " << out.string() << " (mean weight "
            << truth.meta.expected_mean_weight << ", zero rows";
  if (truth.meta.zero_rows.empty()) std::cout << " none";
  for (int r : truth.meta.zero_rows) std::cout << " " << r;
  std::cout << ")\n";
  return kExitOk;
}

// --------------------------------------------------------------------- fit --

struct FitArgs {
  std::string network;
  std::string interp;
  std::string restriction = "plt";
  std::vector<int> pivots;
  std::string out;
  int dim = 2;
  lsnet::SamplerConfig cfg;
  lsnet::Hyperparams hp;
};

int cmd_fit(const FitArgs& args) {
  if (args.dim < 2) throw lsnet::UsageError("--dim must be >= 2");
  const lsnet::InterpData y = lsnet::read_interp_csv(args.interp);
  const int n = y.n();
  lsnet::WeightedNetwork net = lsnet::read_network_csv(args.network);
  if (net.n() > n)
    throw lsnet::DataError("network " + args.network + " has " +
                           std::to_string(net.n()) + " nodes but interp " +
                           args.interp + " is " + std::to_string(y.p()) + "x" +
                           std::to_string(n));
  if (net.n() < n) {
    // Trailing isolated nodes never appear in the edge list; pad them in.
    lsnet::WeightMatrix w = lsnet::WeightMatrix::Zero(n, n);
    w.topLeftCorner(net.n(), net.n()) = net.weights;
    net.weights = std::move(w);
  }

  lsnet::SamplerConfig cfg = args.cfg;
  cfg.seed = resolve_seed(cfg.seed);
  const lsnet::RestrictionPattern pat =
      pattern_from_flags(args.restriction, y.p(), args.dim, args.pivots);

  const fs::path out(args.out);
  ensure_out_dir(out);
  lsnet::ChainCsvWriter writer(out / "chain.csv", y.p(), pat.d, n);

  const auto t0 = std::chrono::steady_clock::now();
  const lsnet::ChainResult result = lsnet::run_chain(
      net, y, pat, args.hp, cfg,
      [&writer](const lsnet::ChainRecord& rec) { writer(rec); },
      /*keep_records=*/false);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json meta;
  meta["format_version"] = lsnet::kFormatVersion;
  meta["command"] = "fit";
  meta["seed"] = cfg.seed;
  meta["config"] = {{"iters", cfg.iters},
                    {"burnin", cfg.burnin},
                    {"thin", cfg.thin},
                    {"mh_step_alpha", cfg.mh_step_alpha},
                    {"mh_step_f", cfg.mh_step_f},
                    {"adapt_window", cfg.adapt_window},
                    {"target_accept", cfg.target_accept}};
  meta["hyperparams"] = hyperparams_to_json(args.hp);
  meta["restriction"] = lsnet::pattern_to_json(pat);
  meta["n"] = n;
  meta["d"] = pat.d;
  meta["p"] = y.p();
  meta["acceptance"] = {{"alpha_rate", result.acceptance.alpha_rate},
                        {"position_rate", result.acceptance.position_rate},
                        {"final_step_alpha", result.acceptance.final_step_alpha},
                        {"final_step_f", result.acceptance.final_step_f}};
  meta["wall_time_seconds"] = wall;
  meta["network_path"] = fs::absolute(args.network).string();
  meta["interp_path"] = fs::absolute(args.interp).string();
  meta["chain_rows"] = writer.rows_written();
  lsnet::write_json(out / "meta.json", meta);

  std::cout << "wrote " << writer.rows_written() << " draws to "
            << (out / "chain.csv").string() << " (alpha acc "
            << result.acceptance.alpha_rate << ", position acc "
            << result.acceptance.position_rate << ", " << wall << " s)\n";
  return kExitOk;
}

// --------------------------------------------------------------- summarize --

struct SummarizeArgs {
  std::string chain_dir;
  std::string truth;
  std::string network;
  std::string out;
  int svg_points = 4000;
};

json param_to_json(const lsnet::ParamSummary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"q025", s.q025}, {"q975", s.q975}};
}

int cmd_summarize(const SummarizeArgs& args) {
  const fs::path chain_dir(args.chain_dir);
  if (!fs::is_directory(chain_dir))
    throw lsnet::IoError("chain directory " + chain_dir.string() + " does not exist");
  const lsnet::LoadedChain chain = lsnet::read_chain_csv(chain_dir / "chain.csv");
  if (chain.records.empty()) throw lsnet::EmptyChain("chain.csv holds no draws");

  const fs::path out = args.out.empty() ? chain_dir : fs::path(args.out);
  ensure_out_dir(out);

  const lsnet::ChainSummary summ = lsnet::summarize(chain.records);

  json j;
  j["format_version"] = lsnet::kFormatVersion;
  j["draws"] = chain.records.size();
  j["alpha"] = param_to_json(summ.alpha);
  j["kappa"] = param_to_json(summ.kappa);
  j["log_posterior"] = param_to_json(summ.log_posterior);
  json lam = json::array();
  for (int l = 0; l < chain.p; ++l) {
    json row = json::array();
    for (int k = 0; k < chain.d; ++k) row.push_back(param_to_json(summ.lambda[l][k]));
    lam.push_back(row);
  }
  j["lambda"] = lam;
  json taus = json::array();
  for (const auto& t : summ.tau) taus.push_back(param_to_json(t));
  j["tau"] = taus;
  json cols = json::array();
  for (const auto& c : summ.col_scale) cols.push_back(param_to_json(c));
  j["col_scale"] = cols;
  json idio = json::array();
  for (const auto& v : summ.idio_var) idio.push_back(param_to_json(v));
  j["idio_var"] = idio;
  json incl = json::array();
  for (int l = 0; l < chain.p; ++l) {
    json row = json::array();
    for (int k = 0; k < chain.d; ++k) row.push_back(summ.inclusion_prob(l, k));
    incl.push_back(row);
  }
  j["inclusion_prob"] = incl;
  json rowzero = json::array();
  for (int l = 0; l < chain.p; ++l) rowzero.push_back(summ.row_zero_prob[l]);
  j["row_zero_prob"] = rowzero;
  j["ess"] = {{"alpha", summ.ess_alpha}, {"log_posterior", summ.ess_log_posterior}};

  std::vector<Eigen::MatrixXd> position_draws;
  position_draws.reserve(chain.records.size());
  for (const auto& rec : chain.records) position_draws.push_back(rec.positions);

  const Eigen::MatrixXd* truth_positions = nullptr;
  Eigen::MatrixXd truth_store;
  if (!args.truth.empty()) {
    const lsnet::LoadedTruth truth = lsnet::read_truth_json(args.truth);
    truth_store = truth.truth.latent.positions;
    truth_positions = &truth_store;

    const lsnet::AlignResult align =
        lsnet::procrustes_align(position_draws, truth_store);
    double raw = 0.0, aligned = 0.0;
    for (size_t t = 0; t < align.rmse_before.size(); ++t) {
      raw += align.rmse_before[t];
      aligned += align.rmse_after[t];
    }
    raw /= static_cast<double>(align.rmse_before.size());
    aligned /= static_cast<double>(align.rmse_after.size());

    const lsnet::AlignResult mean_align =
        lsnet::procrustes_align({summ.position_mean}, truth_store);
    j["rmse"] = {{"raw_draws", raw},
                 {"aligned_draws", aligned},
                 {"raw_mean", mean_align.rmse_before[0]},
                 {"aligned_mean", mean_align.rmse_after[0]}};
  }
  lsnet::write_json(out / "summary.json", j);

  {
    std::ofstream lcsv(out / "loadings.csv");
    if (!lcsv) throw lsnet::IoError("cannot write loadings.csv");
    for (int l = 0; l < chain.p; ++l) {
      for (int k = 0; k < chain.d; ++k) {
        if (k > 0) lcsv << ",";
        lcsv << lsnet::format_double(summ.lambda[l][k].mean);
      }
      lcsv << "\n";
    }
  }

  lsnet::write_positions_svg(out / "positions.svg", position_draws, truth_positions,
                             args.svg_points);

  // Per-edge posterior-mean intensity against the observed weight.
  fs::path network_path(args.network);
  if (network_path.empty()) {
    const fs::path meta_path = chain_dir / "meta.json";
    if (fs::exists(meta_path)) {
      const json meta = lsnet::read_json(meta_path);
      if (meta.contains("network_path"))
        network_path = meta["network_path"].get<std::string>();
    }
  }
  if (network_path.empty())
    throw lsnet::IoError("no network file known; pass --network for edgefit.csv");
  const lsnet::WeightedNetwork net = lsnet::read_network_csv(network_path, chain.n);

  {
    std::ofstream ecsv(out / "edgefit.csv");
    if (!ecsv) throw lsnet::IoError("cannot write edgefit.csv");
    ecsv << "i,j,weight,theta_hat,abs_error\n";
    const auto m = static_cast<double>(chain.records.size());
    for (int i = 0; i < chain.n; ++i) {
      for (int jj = i + 1; jj < chain.n; ++jj) {
        double theta = 0.0;
        for (const auto& rec : chain.records) {
          const double dist2 =
              (rec.positions.col(i) - rec.positions.col(jj)).squaredNorm();
          theta += std::exp(rec.alpha - dist2);
        }
        theta /= m;
        const double w = static_cast<double>(net.weights(i, jj));
        ecsv << i + 1 << "," << jj + 1 << "," << net.weights(i, jj) << ","
             << lsnet::format_double(theta) << ","
             << lsnet::format_double(std::abs(w - theta)) << "\n";
      }
    }
  }

  std::cout << "wrote summary to " << out.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ geweke --

struct GewekeArgs {
  lsnet::GewekeConfig cfg;
  double threshold = 4.0;
  std::string out;
  lsnet::Hyperparams hp;
};

int cmd_geweke(const GewekeArgs& args) {
  lsnet::GewekeConfig cfg = args.cfg;
  cfg.seed = resolve_seed(cfg.seed);
  const lsnet::RestrictionPattern pat =
      lsnet::build_pattern(lsnet::RestrictionKind::kPlt, cfg.p, 2);
  const lsnet::GewekeResult res = lsnet::geweke_joint_test(args.hp, pat, cfg);

  std::printf("%-16s %12s %12s %10s %8s\n", "function", "marginal", "successive",
              "se", "z");
  for (size_t f = 0; f < res.names.size(); ++f)
    std::printf("%-16s %12.5f %12.5f %10.5f %8.3f\n", res.names[f].c_str(),
                res.mean_marginal[f], res.mean_successive[f], res.se[f], res.z[f]);
  std::printf("max |z| = %.3f (threshold %.3f)\n", res.max_abs_z, args.threshold);

  if (!args.out.empty()) {
    json j;
    j["format_version"] = lsnet::kFormatVersion;
    j["threshold"] = args.threshold;
    j["max_abs_z"] = res.max_abs_z;
    j["draws"] = cfg.draws;
    j["thin"] = cfg.thin;
    j["seed"] = cfg.seed;
    j["mutate_tau"] = cfg.mutate_tau;
    json fns = json::array();
    for (size_t f = 0; f < res.names.size(); ++f)
      fns.push_back({{"name", res.names[f]},
                     {"z", res.z[f]},
                     {"mean_marginal", res.mean_marginal[f]},
                     {"mean_successive", res.mean_successive[f]},
                     {"se", res.se[f]}});
    j["functions"] = fns;
    lsnet::write_json(args.out, j);
  }
  return res.max_abs_z < args.threshold ? kExitOk : kExitTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-space model for integer-weighted networks with sparse "
               "interpretation loadings"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Generate a synthetic fixture");
  c_sim->add_option("--nodes", sim.nodes, "Number of nodes");
  c_sim->add_option("--dim", sim.dim, "Latent dimension d");
  c_sim->add_option("--p", sim.p, "Number of interpretation variables");
  c_sim->add_option("--restriction", sim.restriction, "plt | glt | unrestricted");
  c_sim->add_option("--pivots", sim.pivots, "GLT pivot rows (1-based)")->delimiter(',');
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out", sim.out, "Output directory")->required();
  c_sim->add_option("--slab-sd", sim.truth_cfg.slab_sd, "True loading scale");
  c_sim->add_option("--idio-var", sim.truth_cfg.idio_var, "True residual variance");
  c_sim->add_option("--zero-rows", sim.truth_cfg.zero_rows, "True zero loading rows");
  c_sim->add_option("--mean-weight-lo", sim.truth_cfg.mean_weight_lo,
                    "Lower bound for the expected mean weight");
  c_sim->add_option("--mean-weight-hi", sim.truth_cfg.mean_weight_hi,
                    "Upper bound for the expected mean weight");

  FitArgs fit;
  CLI::App* c_fit = app.add_subcommand("fit", "Run the posterior sampler");
  c_fit->add_option("--network", fit.network, "network.csv path")->required();
  c_fit->add_option("--interp", fit.interp, "interp.csv path")->required();
  c_fit->add_option("--restriction", fit.restriction, "plt | glt | unrestricted");
  c_fit->add_option("--pivots", fit.pivots, "GLT pivot rows (1-based)")->delimiter(',');
  c_fit->add_option("--dim", fit.dim, "Latent dimension d");
  c_fit->add_option("--iters", fit.cfg.iters, "Total sweeps, burnin included");
  c_fit->add_option("--burnin", fit.cfg.burnin, "Burn-in sweeps");
  c_fit->add_option("--thin", fit.cfg.thin, "Keep every thin-th sweep");
  c_fit->add_option("--seed", fit.cfg.seed, "RNG seed");
  c_fit->add_option("--out", fit.out, "Output directory")->required();
  c_fit->add_option("--mh-step-alpha", fit.cfg.mh_step_alpha, "Initial alpha step");
  c_fit->add_option("--mh-step-f", fit.cfg.mh_step_f, "Initial position step");
  c_fit->add_option("--adapt-window", fit.cfg.adapt_window, "Adaptation batch size");
  c_fit->add_option("--target-accept", fit.cfg.target_accept, "Adaptation target");
  add_hyperparam_flags(c_fit, fit.hp);

  SummarizeArgs summ;
  CLI::App* c_summ = app.add_subcommand("summarize", "Post-process a chain directory");
  c_summ->add_option("--chain", summ.chain_dir, "Chain directory")->required();
  c_summ->add_option("--truth", summ.truth, "truth.json for RMSE and overlays");
  c_summ->add_option("--network", summ.network, "network.csv (else from meta.json)");
  c_summ->add_option("--out", summ.out, "Output directory (default: chain dir)");
  c_summ->add_option("--svg-points", summ.svg_points, "Max dots in positions.svg");

  GewekeArgs gw;
  gw.hp.sigma2_alpha = 1.0;
  gw.hp.c0 = gw.hp.C0 = 3.0;
  gw.hp.c_sigma = gw.hp.b_sigma = 3.0;
  gw.hp.c_kappa = gw.hp.b_kappa = 3.0;
  CLI::App* c_gw = app.add_subcommand("geweke", "Joint-distribution sampler check");
  c_gw->add_option("--nodes", gw.cfg.n, "Micro-model nodes (<= 5)");
  c_gw->add_option("--p", gw.cfg.p, "Micro-model variables (<= 3)");
  c_gw->add_option("--draws", gw.cfg.draws, "Retained draws per stream");
  c_gw->add_option("--thin", gw.cfg.thin, "Sweeps per retained successive draw");
  c_gw->add_option("--threshold", gw.threshold, "|z| pass threshold");
  c_gw->add_option("--seed", gw.cfg.seed, "RNG seed");
  c_gw->add_option("--mh-step-alpha", gw.cfg.mh_step_alpha, "Fixed alpha step");
  c_gw->add_option("--mh-step-f", gw.cfg.mh_step_f, "Fixed position step");
  c_gw->add_flag("--mutate-tau", gw.cfg.mutate_tau,
                 "Swap the Beta counts in the tau update (power check)");
  c_gw->add_option("--out", gw.out, "Write the report as json");
  add_hyperparam_flags(c_gw, gw.hp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_fit->parsed()) return cmd_fit(fit);
    if (c_summ->parsed()) return cmd_summarize(summ);
    if (c_gw->parsed()) return cmd_geweke(gw);
    throw lsnet::UsageError("no subcommand given");
  } catch (const lsnet::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const lsnet::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const lsnet::TestError& e) {
    std::cerr << "test error: " << e.what() << "\n";
    return kExitTestFailure;
  } catch (const lsnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
