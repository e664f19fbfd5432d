#include "d2dra/oracle_cache.hpp"

#include <fstream>

#include <json.hpp>

#include "d2dra/binary_io.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/version.hpp"

namespace d2dra {

using nlohmann::json;

const std::vector<Goal> kCacheGoalOrder = {Goal::kMaxSe, Goal::kMaxEe, Goal::kMinPw};

std::string oracle_cache_filename(const std::string& dataset_sha256, const GridSpec& grid) {
  return "oracle-" + dataset_sha256.substr(0, 16) + "-" + std::to_string(grid.k_total) + "x" +
         std::to_string(grid.k_split) + ".cache";
}

void save_oracle_cache(const OracleCache& cache, const std::string& path) {
  json header{{"magic", "d2dra-oracle-cache"},
              {"format_version", kOracleCacheFormatVersion},
              {"dataset_sha256", cache.dataset_sha256},
              {"k_total", cache.grid.k_total},
              {"k_split", cache.grid.k_split},
              {"n_due", cache.n_due},
              {"n_channels", cache.n_channels},
              {"goals", json::array({"max-se", "max-ee", "min-pw"})},
              {"count", cache.solutions.size()}};
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  for (const auto& per_goal : cache.solutions) {
    if (per_goal.size() != kCacheGoalOrder.size()) {
      throw ConfigError("oracle cache: every instance needs all three goals");
    }
    for (const OracleSolution& sol : per_goal) {
      write_u64(out, sol.feasible ? 1 : 0);
      write_f64(out, sol.objective);
      write_f64_span(out, sol.best_alloc.p);
      write_f64_span(out, sol.min_violation_alloc.p);
      write_f64(out, sol.min_violation);
      write_u64(out, sol.evaluations);
      write_f64(out, sol.wall_ms);
    }
  }
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

std::optional<OracleCache> load_oracle_cache(const std::string& path,
                                             const std::string& dataset_sha256,
                                             const GridSpec& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  const std::uint64_t header_len = read_u64(in);
  if (header_len == 0 || header_len > (1u << 20)) {
    throw IoError("oracle cache header length implausible in " + path);
  }
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError("truncated oracle cache header in " + path);

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw IoError("bad oracle cache header in " + path + ": " + e.what());
  }
  if (header.value("magic", "") != "d2dra-oracle-cache" ||
      header.at("format_version").get<int>() != kOracleCacheFormatVersion) {
    throw IoError("not a compatible oracle cache: " + path);
  }

  OracleCache cache;
  cache.dataset_sha256 = header.at("dataset_sha256").get<std::string>();
  cache.grid.k_total = header.at("k_total").get<int>();
  cache.grid.k_split = header.at("k_split").get<int>();
  cache.n_due = header.at("n_due").get<int>();
  cache.n_channels = header.at("n_channels").get<int>();
  if (cache.dataset_sha256 != dataset_sha256 || !(cache.grid == grid)) {
    return std::nullopt;  // stale key; caller recomputes
  }

  const std::uint64_t count = header.at("count").get<std::uint64_t>();
  const std::size_t alloc_len =
      static_cast<std::size_t>(cache.n_due) * static_cast<std::size_t>(cache.n_channels);
  cache.solutions.resize(count);
  try {
    for (auto& per_goal : cache.solutions) {
      per_goal.resize(kCacheGoalOrder.size());
      for (OracleSolution& sol : per_goal) {
        sol.feasible = read_u64(in) != 0;
        sol.objective = read_f64(in);
        sol.best_alloc = PowerAllocation::zeros(cache.n_due, cache.n_channels);
        sol.min_violation_alloc = PowerAllocation::zeros(cache.n_due, cache.n_channels);
        sol.best_alloc.p.resize(alloc_len);
        sol.min_violation_alloc.p.resize(alloc_len);
        read_f64_span(in, sol.best_alloc.p);
        read_f64_span(in, sol.min_violation_alloc.p);
        sol.min_violation = read_f64(in);
        sol.evaluations = read_u64(in);
        sol.wall_ms = read_f64(in);
      }
    }
  } catch (const IoError&) {
    throw IoError("oracle cache payload truncated: " + path);
  }
  return cache;
}

}  // namespace d2dra
