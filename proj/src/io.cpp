#include "lsnet/io.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace lsnet {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("cannot parse " + what + " from '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("cannot parse " + what + " from '" + s + "'");
  }
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  if (rows == 0) return {};
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != cols) throw DataError("ragged matrix in json");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_network_csv(const std::filesystem::path& path, const WeightedNetwork& net) {
  check_network(net);
  std::ofstream out = open_out(path);
  out << "i,j,weight\n";
  const int n = net.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out << i + 1 << "," << j + 1 << "," << net.weights(i, j) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

WeightedNetwork read_network_csv(const std::filesystem::path& path, int expected_n) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty network file " + path.string());
  if (line != "i,j,weight")
    throw DataError("network csv must start with header 'i,j,weight'");

  std::map<std::pair<int, int>, std::int64_t> edges;
  int max_index = 0;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 3)
      throw DataError("network csv line " + std::to_string(line_no) +
                      " needs 3 fields");
    const auto i = static_cast<int>(parse_int(f[0], "node index"));
    const auto j = static_cast<int>(parse_int(f[1], "node index"));
    const std::int64_t w = parse_int(f[2], "edge weight");
    if (i < 1 || j < 1) throw DataError("node indices are 1-based");
    if (i == j)
      throw DataError("self-loop at line " + std::to_string(line_no));
    if (w < 0) throw DataError("negative weight at line " + std::to_string(line_no));
    const std::pair<int, int> key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
    if (edges.count(key))
      throw DataError("duplicate pair (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") at line " +
                      std::to_string(line_no));
    edges[key] = w;
    max_index = std::max({max_index, i, j});
  }

  const int n = expected_n > 0 ? expected_n : max_index;
  if (n < 2) throw DataError("network needs at least 2 nodes");
  if (max_index > n)
    throw DataError("node index " + std::to_string(max_index) +
                    " exceeds expected node count " + std::to_string(n));
  WeightedNetwork net;
  net.weights = WeightMatrix::Zero(n, n);
  for (const auto& [key, w] : edges) {
    net.weights(key.first - 1, key.second - 1) = w;
    net.weights(key.second - 1, key.first - 1) = w;
  }
  return net;
}

void write_interp_csv(const std::filesystem::path& path, const InterpData& y) {
  std::ofstream out = open_out(path);
  for (int l = 0; l < y.p(); ++l) {
    for (int i = 0; i < y.n(); ++i) {
      if (i > 0) out << ",";
      out << format_double(y.y(l, i));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

InterpData read_interp_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    std::vector<double> row;
    row.reserve(f.size());
    for (const std::string& s : f) row.push_back(parse_double(s, "interp value"));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("ragged interp csv in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty interp file " + path.string());
  InterpData out;
  out.y.resize(rows.size(), rows.front().size());
  for (size_t l = 0; l < rows.size(); ++l)
    for (size_t i = 0; i < rows[l].size(); ++i) out.y(l, i) = rows[l][i];
  return out;
}

nlohmann::json pattern_to_json(const RestrictionPattern& pat) {
  return {{"kind", restriction_kind_name(pat.kind)},
          {"pivots", pat.pivots},
          {"p", pat.p},
          {"d", pat.d}};
}

RestrictionPattern pattern_from_json(const nlohmann::json& j) {
  const auto kind = restriction_kind_from_name(j.at("kind").get<std::string>());
  const auto pivots = j.at("pivots").get<std::vector<int>>();
  return build_pattern(kind, j.at("p").get<int>(), j.at("d").get<int>(), pivots);
}

void write_truth_json(const std::filesystem::path& path, const Truth& truth,
                      const RestrictionPattern& pat) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = truth.meta.seed;
  j["n"] = truth.latent.n();
  j["d"] = truth.latent.d();
  j["p"] = truth.loading.p();
  j["restriction"] = pattern_to_json(pat);
  j["alpha"] = truth.latent.alpha;
  j["positions"] = matrix_to_json(truth.latent.positions);
  j["lambda"] = matrix_to_json(truth.loading.lambda);
  nlohmann::json ind = nlohmann::json::array();
  for (int l = 0; l < truth.loading.p(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < truth.loading.d(); ++k)
      row.push_back(truth.loading.indicators(l, k));
    ind.push_back(row);
  }
  j["indicators"] = ind;
  j["tau"] = vector_to_json(truth.loading.tau);
  j["col_scale"] = vector_to_json(truth.loading.col_scale);
  j["kappa"] = truth.loading.kappa;
  j["idio_var"] = vector_to_json(truth.loading.idio_var);
  j["zero_rows"] = truth.meta.zero_rows;
  j["gen"] = {{"slab_sd", truth.meta.config.slab_sd},
              {"idio_var", truth.meta.config.idio_var},
              {"zero_rows", truth.meta.config.zero_rows},
              {"sigma2_alpha", truth.meta.config.sigma2_alpha},
              {"mean_weight_lo", truth.meta.config.mean_weight_lo},
              {"mean_weight_hi", truth.meta.config.mean_weight_hi},
              {"expected_mean_weight", truth.meta.expected_mean_weight},
              {"alpha_tries", truth.meta.alpha_tries},
              {"alpha_fallback", truth.meta.alpha_fallback}};
  write_json(path, j);
}

LoadedTruth read_truth_json(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  LoadedTruth out;
  out.pattern = pattern_from_json(j.at("restriction"));
  Truth& t = out.truth;
  t.meta.seed = j.at("seed").get<std::uint64_t>();
  t.latent.alpha = j.at("alpha").get<double>();
  t.latent.positions = matrix_from_json(j.at("positions"));
  t.latent.centered = true;
  t.loading.lambda = matrix_from_json(j.at("lambda"));
  const nlohmann::json& ind = j.at("indicators");
  t.loading.indicators.resize(t.loading.lambda.rows(), t.loading.lambda.cols());
  for (int l = 0; l < t.loading.p(); ++l)
    for (int k = 0; k < t.loading.d(); ++k)
      t.loading.indicators(l, k) = ind.at(l).at(k).get<int>();
  t.loading.tau = vector_from_json(j.at("tau"));
  t.loading.col_scale = vector_from_json(j.at("col_scale"));
  t.loading.kappa = j.at("kappa").get<double>();
  t.loading.idio_var = vector_from_json(j.at("idio_var"));
  t.meta.zero_rows = j.at("zero_rows").get<std::vector<int>>();
  const nlohmann::json& gen = j.at("gen");
  t.meta.config.slab_sd = gen.at("slab_sd").get<double>();
  t.meta.config.idio_var = gen.at("idio_var").get<double>();
  t.meta.config.zero_rows = gen.at("zero_rows").get<int>();
  t.meta.config.sigma2_alpha = gen.at("sigma2_alpha").get<double>();
  t.meta.config.mean_weight_lo = gen.at("mean_weight_lo").get<double>();
  t.meta.config.mean_weight_hi = gen.at("mean_weight_hi").get<double>();
  t.meta.expected_mean_weight = gen.at("expected_mean_weight").get<double>();
  t.meta.alpha_tries = gen.at("alpha_tries").get<std::int64_t>();
  t.meta.alpha_fallback = gen.at("alpha_fallback").get<bool>();
  return out;
}

std::vector<std::string> chain_csv_columns(int p, int d, int n) {
  std::vector<std::string> cols = {"draw", "log_posterior", "alpha"};
  for (int l = 1; l <= p; ++l)
    for (int k = 1; k <= d; ++k)
      cols.push_back("lambda_" + std::to_string(l) + "_" + std::to_string(k));
  for (int l = 1; l <= p; ++l)
    for (int k = 1; k <= d; ++k)
      cols.push_back("delta_" + std::to_string(l) + "_" + std::to_string(k));
  for (int l = 1; l <= p; ++l) cols.push_back("tau_" + std::to_string(l));
  for (int k = 1; k <= d; ++k) cols.push_back("col_scale_" + std::to_string(k));
  cols.push_back("kappa");
  for (int l = 1; l <= p; ++l) cols.push_back("idio_var_" + std::to_string(l));
  for (int k = 1; k <= d; ++k)
    for (int i = 1; i <= n; ++i)
      cols.push_back("f_" + std::to_string(k) + "_" + std::to_string(i));
  return cols;
}

ChainCsvWriter::ChainCsvWriter(const std::filesystem::path& path, int p, int d, int n)
    : out_(path), p_(p), d_(d), n_(n) {
  if (!out_) throw IoError("cannot write " + path.string());
  const std::vector<std::string> cols = chain_csv_columns(p, d, n);
  for (size_t c = 0; c < cols.size(); ++c) {
    if (c > 0) out_ << ",";
    out_ << cols[c];
  }
  out_ << "\n";
}

void ChainCsvWriter::operator()(const ChainRecord& rec) {
  out_ << rec.draw << "," << format_double(rec.log_posterior) << ","
       << format_double(rec.alpha);
  for (int l = 0; l < p_; ++l)
    for (int k = 0; k < d_; ++k) out_ << "," << format_double(rec.lambda(l, k));
  for (int l = 0; l < p_; ++l)
    for (int k = 0; k < d_; ++k) out_ << "," << rec.indicators(l, k);
  for (int l = 0; l < p_; ++l) out_ << "," << format_double(rec.tau[l]);
  for (int k = 0; k < d_; ++k) out_ << "," << format_double(rec.col_scale[k]);
  out_ << "," << format_double(rec.kappa);
  for (int l = 0; l < p_; ++l) out_ << "," << format_double(rec.idio_var[l]);
  for (int k = 0; k < d_; ++k)
    for (int i = 0; i < n_; ++i) out_ << "," << format_double(rec.positions(k, i));
  out_ << "\n";
  if (!out_) throw IoError("failed writing chain row");
  ++rows_;
}

LoadedChain read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty chain file " + path.string());
  const std::vector<std::string> header = split_csv_line(line);

  // Infer p, d, n from the versioned column names, then demand an exact match.
  int p = 0, d = 0, n = 0;
  for (const std::string& c : header) {
    if (c.rfind("lambda_", 0) == 0) {
      const auto us = c.find('_', 7);
      p = std::max(p, static_cast<int>(parse_int(c.substr(7, us - 7), "row")));
      d = std::max(d, static_cast<int>(parse_int(c.substr(us + 1), "col")));
    } else if (c.rfind("f_", 0) == 0) {
      const auto us = c.find('_', 2);
      n = std::max(n, static_cast<int>(parse_int(c.substr(us + 1), "node")));
    }
  }
  if (p == 0 || d == 0 || n == 0)
    throw DataError("chain csv header missing lambda/f columns");
  const std::vector<std::string> expected = chain_csv_columns(p, d, n);
  if (header != expected)
    throw DataError("chain csv header does not match the versioned column order");

  LoadedChain out;
  out.p = p;
  out.d = d;
  out.n = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != expected.size())
      throw DataError("chain row has " + std::to_string(f.size()) +
                      " fields, expected " + std::to_string(expected.size()));
    ChainRecord rec;
    size_t c = 0;
    rec.draw = parse_int(f[c++], "draw");
    rec.log_posterior = parse_double(f[c++], "log_posterior");
    rec.alpha = parse_double(f[c++], "alpha");
    rec.lambda.resize(p, d);
    for (int l = 0; l < p; ++l)
      for (int k = 0; k < d; ++k) rec.lambda(l, k) = parse_double(f[c++], "lambda");
    rec.indicators.resize(p, d);
    for (int l = 0; l < p; ++l)
      for (int k = 0; k < d; ++k)
        rec.indicators(l, k) = static_cast<int>(parse_int(f[c++], "delta"));
    rec.tau.resize(p);
    for (int l = 0; l < p; ++l) rec.tau[l] = parse_double(f[c++], "tau");
    rec.col_scale.resize(d);
    for (int k = 0; k < d; ++k) rec.col_scale[k] = parse_double(f[c++], "col_scale");
    rec.kappa = parse_double(f[c++], "kappa");
    rec.idio_var.resize(p);
    for (int l = 0; l < p; ++l) rec.idio_var[l] = parse_double(f[c++], "idio_var");
    rec.positions.resize(d, n);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < n; ++i) rec.positions(k, i) = parse_double(f[c++], "f");
    out.records.push_back(std::move(rec));
  }
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid json in " + path.string() + ": " + e.what());
  }
}

}  // namespace lsnet
