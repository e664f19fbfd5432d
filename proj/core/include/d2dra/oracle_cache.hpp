#pragma once

#include <optional>
#include <string>
#include <vector>

#include "d2dra/grid_oracle.hpp"

namespace d2dra {

// Per-instance oracle solutions for one (dataset, grid) pair, in the same
// container format as datasets (length-prefixed JSON header + binary
// payload). Keyed by the dataset file digest and the grid spec; always holds
// all three goals in max-se, max-ee, min-pw order.
struct OracleCache {
  std::string dataset_sha256;
  GridSpec grid;
  int n_due = 0;
  int n_channels = 0;
  // solutions[instance][goal], goal order: max-se, max-ee, min-pw.
  std::vector<std::vector<OracleSolution>> solutions;
};

extern const std::vector<Goal> kCacheGoalOrder;

void save_oracle_cache(const OracleCache& cache, const std::string& path);

// Empty optional when the file is missing; IoError on a malformed file;
// a present-but-mismatched key (digest or grid) also returns empty.
std::optional<OracleCache> load_oracle_cache(const std::string& path,
                                             const std::string& dataset_sha256,
                                             const GridSpec& grid);

// Deterministic cache file name for a (dataset digest, grid) pair.
std::string oracle_cache_filename(const std::string& dataset_sha256, const GridSpec& grid);

}  // namespace d2dra
