#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsnet/sampler.hpp"
#include "lsnet/simulate.hpp"

namespace lsnet {

// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

// network.csv: header "i,j,weight", 1-based indices, i < j rows only.
void write_network_csv(const std::filesystem::path& path, const WeightedNetwork& net);
// Reads an edge list; missing pairs are zero. With expected_n < 0 the node
// count is the largest index seen. Duplicate pairs (in either orientation)
// and self-loops are rejected.
WeightedNetwork read_network_csv(const std::filesystem::path& path,
                                 int expected_n = -1);

// interp.csv: p rows x n columns, plain decimal, no header.
void write_interp_csv(const std::filesystem::path& path, const InterpData& y);
InterpData read_interp_csv(const std::filesystem::path& path);

nlohmann::json pattern_to_json(const RestrictionPattern& pat);
RestrictionPattern pattern_from_json(const nlohmann::json& j);

void write_truth_json(const std::filesystem::path& path, const Truth& truth,
                      const RestrictionPattern& pat);
struct LoadedTruth {
  Truth truth;
  RestrictionPattern pattern;
};
LoadedTruth read_truth_json(const std::filesystem::path& path);

// chain.csv column order (the header line documents the on-disk format).
std::vector<std::string> chain_csv_columns(int p, int d, int n);

// Streams retained draws to disk so long chains never accumulate in memory.
class ChainCsvWriter {
 public:
  ChainCsvWriter(const std::filesystem::path& path, int p, int d, int n);
  void operator()(const ChainRecord& rec);
  std::int64_t rows_written() const { return rows_; }

 private:
  std::ofstream out_;
  int p_, d_, n_;
  std::int64_t rows_ = 0;
};

struct LoadedChain {
  std::vector<ChainRecord> records;
  int p = 0;
  int d = 0;
  int n = 0;
};
LoadedChain read_chain_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

constexpr int kFormatVersion = 1;

}  // namespace lsnet
