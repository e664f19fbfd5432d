#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2dra/channel_model.hpp"
#include "d2dra/link_metrics.hpp"
#include "d2dra/system_config.hpp"

namespace d2dra {

// Discretization of the per-DUE power choice: k_total total-power levels on
// [0, P_T] crossed with k_split-resolution split vectors on the M-simplex.
// Mirrors the Tnet x Pnet parameterization, so network outputs lie in the
// closure of the grid.
struct GridSpec {
  int k_total = 51;
  int k_split = 51;

  void validate() const;  // both >= 2

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Number of split vectors: compositions of k_split-1 into M parts.
std::uint64_t simplex_point_count(int k_split, int m);

// Per-DUE candidates, count x M powers flattened row-major. Total-power level
// is the major index, split vector the minor one; splits enumerate in lex
// order of their first components (M=2, k_split=3: (0,1), (1/2,1/2), (1,0)).
struct CandidateSet {
  int n_channels = 0;
  std::size_t count = 0;
  std::vector<double> powers;

  std::span<const double> candidate(std::size_t c) const {
    return {powers.data() + c * n_channels, static_cast<std::size_t>(n_channels)};
  }
};
CandidateSet enumerate_candidates(const GridSpec& grid, const SystemConfig& config);

struct OracleOptions {
  std::uint64_t budget = 100'000'000;  // max joint evaluations
  int threads = 1;
};

struct OracleSolution {
  bool feasible = false;
  double objective = 0.0;           // meaningful when feasible
  PowerAllocation best_alloc;       // zeros when infeasible
  // Fallback when nothing on the grid is feasible: the candidate minimizing
  // violation_interference/I_T + violation_qos/R_T.
  PowerAllocation min_violation_alloc;
  double min_violation = 0.0;
  std::uint64_t evaluations = 0;
  double wall_ms = 0.0;
};

// Exhaustive search over all joint candidates. Ties on the objective break
// toward the lexicographically smallest flattened power array, so results are
// deterministic and identical for any thread count. Throws
// BudgetExceededError when candidates^N exceeds options.budget.
OracleSolution grid_search(const ChannelInstance& instance, Goal goal, const GridSpec& grid,
                           const SystemConfig& config, const OracleOptions& options = {});

// Same sweep evaluated for several goals at shared cost; feasibility and the
// min-violation fallback are goal-independent.
std::vector<OracleSolution> grid_search_multi(const ChannelInstance& instance,
                                              std::span<const Goal> goals, const GridSpec& grid,
                                              const SystemConfig& config,
                                              const OracleOptions& options = {});

struct VerifyRecord {
  double dnn_objective = 0.0;
  double oracle_objective = 0.0;
  double ratio = 0.0;  // dnn / oracle, meaningful when the oracle is feasible
  bool dnn_feasible = false;
  bool oracle_feasible = false;
};

// One-instance comparison backing the optimality-ratio measurements. Both
// objectives are recomputed through objective_value so the two sides are
// bit-comparable.
VerifyRecord verify_alloc(const ChannelInstance& instance, const PowerAllocation& alloc,
                          Goal goal, const GridSpec& grid, const SystemConfig& config,
                          const OracleOptions& options = {});
VerifyRecord verify_against(const ChannelInstance& instance, const PowerAllocation& alloc,
                            Goal goal, const OracleSolution& oracle, const SystemConfig& config);

}  // namespace d2dra
