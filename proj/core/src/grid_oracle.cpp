#include "d2dra/grid_oracle.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "d2dra/errors.hpp"

namespace d2dra {

void GridSpec::validate() const {
  if (k_total < 2 || k_split < 2) throw ConfigError("GridSpec: k_total and k_split must be >= 2");
}

std::uint64_t simplex_point_count(int k_split, int m) {
  // C(K + M - 1, M - 1) with K = k_split - 1.
  const std::uint64_t k = k_split - 1;
  std::uint64_t result = 1;
  for (int i = 1; i <= m - 1; ++i) {
    result = result * (k + i) / i;
  }
  return result;
}

namespace {

void enumerate_splits(int m, int remaining, std::vector<int>& counts,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(counts.size()) == m - 1) {
    counts.push_back(remaining);
    out.push_back(counts);
    counts.pop_back();
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts.push_back(c);
    enumerate_splits(m, remaining - c, counts, out);
    counts.pop_back();
  }
}

}  // namespace

CandidateSet enumerate_candidates(const GridSpec& grid, const SystemConfig& config) {
  grid.validate();
  const int m = config.n_channels;
  const int k = grid.k_split - 1;
  std::vector<std::vector<int>> splits;
  std::vector<int> scratch;
  enumerate_splits(m, k, scratch, splits);

  const double p_max = config.p_max_w();
  CandidateSet set;
  set.n_channels = m;
  set.count = static_cast<std::size_t>(grid.k_total) * splits.size();
  set.powers.reserve(set.count * m);
  for (int t = 0; t < grid.k_total; ++t) {
    const double level = p_max * static_cast<double>(t) / static_cast<double>(grid.k_total - 1);
    for (const auto& counts : splits) {
      for (int c : counts) {
        set.powers.push_back(level * (static_cast<double>(c) / static_cast<double>(k)));
      }
    }
  }
  return set;
}

namespace {

// Flattened per-instance gains, laid out for the inner loop. Summation order
// matches link_metrics exactly (noise, DUE interferers ascending, CUE last),
// so grid objectives are bit-comparable with objective_value().
struct InstanceTables {
  int n = 0;
  int m = 0;
  double noise_w = 0.0;
  double i_thresh_w = 0.0;
  double r_thresh = 0.0;
  double bandwidth_hz = 0.0;
  double p_circuit_w = 0.0;
  std::vector<double> own;    // [i][m] h[m][i+1][i+1]
  std::vector<double> cross;  // [j][i][m] h[m][j+1][i+1]
  std::vector<double> cue;    // [i][m] cue_w * h[m][0][i+1]
  std::vector<double> bs;     // [i][m] h[m][i+1][0]

  InstanceTables(const ChannelInstance& inst, const SystemConfig& config) {
    n = config.n_due;
    m = config.n_channels;
    noise_w = config.noise_power_w();
    i_thresh_w = config.i_thresh_w();
    r_thresh = config.r_thresh;
    bandwidth_hz = config.bandwidth_hz;
    p_circuit_w = config.p_circuit_w();
    const double cue_w = config.p_cue_per_channel_w();
    own.resize(n * m);
    cue.resize(n * m);
    bs.resize(n * m);
    cross.resize(n * n * m);
    for (int i = 0; i < n; ++i) {
      for (int mi = 0; mi < m; ++mi) {
        own[i * m + mi] = inst.gain(mi, i + 1, i + 1);
        cue[i * m + mi] = cue_w * inst.gain(mi, 0, i + 1);
        bs[i * m + mi] = inst.gain(mi, i + 1, 0);
        for (int j = 0; j < n; ++j) {
          cross[(j * n + i) * m + mi] = inst.gain(mi, j + 1, i + 1);
        }
      }
    }
  }
};

struct Objectives {
  double se = 0.0;
  double ee = 0.0;
  double pw = 0.0;
  bool feasible = false;
  double violation = 0.0;  // normalized, meaningful when infeasible
};

// cand[i] points at DUE i's per-channel powers.
Objectives evaluate_joint(const InstanceTables& t, const double* const* cand) {
  Objectives out;
  double se_sum = 0.0;
  double ee_sum = 0.0;
  double pw_sum = 0.0;
  double viol_q = 0.0;
  bool qos_ok = true;
  for (int i = 0; i < t.n; ++i) {
    double se_i = 0.0;
    double ptot = 0.0;
    for (int mi = 0; mi < t.m; ++mi) {
      double denom = t.noise_w;
      for (int j = 0; j < t.n; ++j) {
        if (j == i) continue;
        denom += cand[j][mi] * t.cross[(j * t.n + i) * t.m + mi];
      }
      denom += t.cue[i * t.m + mi];
      se_i += std::log2(1.0 + cand[i][mi] * t.own[i * t.m + mi] / denom);
      ptot += cand[i][mi];
    }
    if (se_i < t.r_thresh) {
      qos_ok = false;
      viol_q = std::max(viol_q, t.r_thresh - se_i);
    }
    se_sum += se_i;
    ee_sum += t.bandwidth_hz * se_i / (ptot + t.p_circuit_w);
    pw_sum += ptot;
  }

  bool inter_ok = true;
  double viol_i = 0.0;
  for (int k = 0; k < t.m; ++k) {
    double ik = 0.0;
    for (int i = 0; i < t.n; ++i) ik += cand[i][k] * t.bs[i * t.m + k];
    if (ik > t.i_thresh_w) {
      inter_ok = false;
      viol_i = std::max(viol_i, ik - t.i_thresh_w);
    }
  }

  out.se = se_sum;
  out.ee = ee_sum;
  out.pw = pw_sum;
  out.feasible = qos_ok && inter_ok;
  if (!out.feasible) {
    out.violation = viol_i / t.i_thresh_w + (t.r_thresh > 0.0 ? viol_q / t.r_thresh : 0.0);
  }
  return out;
}

bool lex_less(const double* const* a, const double* const* b, int n, int m) {
  for (int i = 0; i < n; ++i) {
    for (int mi = 0; mi < m; ++mi) {
      if (a[i][mi] < b[i][mi]) return true;
      if (a[i][mi] > b[i][mi]) return false;
    }
  }
  return false;
}

struct Incumbent {
  bool valid = false;
  double objective = 0.0;
  std::vector<std::size_t> digits;
};

struct WorkerResult {
  std::vector<Incumbent> best;  // one per goal
  Incumbent min_violation;      // objective field holds the violation
};

// Serial sweep over joint candidate indices [begin, end).
WorkerResult sweep_range(const InstanceTables& t, const CandidateSet& cands,
                         std::span<const Goal> goals, std::uint64_t begin, std::uint64_t end) {
  const int n = t.n;
  const int m = t.m;
  WorkerResult result;
  result.best.resize(goals.size());

  std::vector<std::size_t> digits(n);
  std::vector<const double*> cand(n);
  std::uint64_t rem = begin;
  for (int i = n - 1; i >= 0; --i) {
    digits[i] = rem % cands.count;
    rem /= cands.count;
    cand[i] = cands.powers.data() + digits[i] * m;
  }

  auto cand_for = [&](const std::vector<std::size_t>& d, std::vector<const double*>& out) {
    for (int i = 0; i < n; ++i) out[i] = cands.powers.data() + d[i] * m;
  };
  std::vector<const double*> inc_cand(n);

  for (std::uint64_t it = begin; it < end; ++it) {
    const Objectives obj = evaluate_joint(t, cand.data());

    if (obj.feasible) {
      for (std::size_t g = 0; g < goals.size(); ++g) {
        const double value = goals[g] == Goal::kMaxSe   ? obj.se
                             : goals[g] == Goal::kMaxEe ? obj.ee
                                                        : obj.pw;
        Incumbent& inc = result.best[g];
        bool better = false;
        if (!inc.valid) {
          better = true;
        } else if (goal_is_maximize(goals[g]) ? value > inc.objective
                                              : value < inc.objective) {
          better = true;
        } else if (value == inc.objective) {
          cand_for(inc.digits, inc_cand);
          better = lex_less(cand.data(), inc_cand.data(), n, m);
        }
        if (better) {
          inc.valid = true;
          inc.objective = value;
          inc.digits = digits;
        }
      }
    } else {
      Incumbent& inc = result.min_violation;
      bool better = false;
      if (!inc.valid) {
        better = true;
      } else if (obj.violation < inc.objective) {
        better = true;
      } else if (obj.violation == inc.objective) {
        cand_for(inc.digits, inc_cand);
        better = lex_less(cand.data(), inc_cand.data(), n, m);
      }
      if (better) {
        inc.valid = true;
        inc.objective = obj.violation;
        inc.digits = digits;
      }
    }

    // Odometer increment, last digit fastest.
    for (int i = n - 1; i >= 0; --i) {
      if (++digits[i] < cands.count) {
        cand[i] = cands.powers.data() + digits[i] * m;
        break;
      }
      digits[i] = 0;
      cand[i] = cands.powers.data();
    }
  }
  return result;
}

PowerAllocation alloc_from_digits(const CandidateSet& cands, const std::vector<std::size_t>& digits,
                                  int n, int m) {
  PowerAllocation alloc = PowerAllocation::zeros(n, m);
  for (int i = 0; i < n; ++i) {
    const std::span<const double> c = cands.candidate(digits[i]);
    for (int mi = 0; mi < m; ++mi) alloc.at(i, mi) = c[mi];
  }
  return alloc;
}

// Prefer a over b under the deterministic total order.
bool incumbent_wins(const Incumbent& a, const Incumbent& b, bool maximize,
                    const CandidateSet& cands, int n, int m) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (maximize ? a.objective > b.objective : a.objective < b.objective) return true;
  if (a.objective != b.objective) return false;
  std::vector<const double*> ca(n), cb(n);
  for (int i = 0; i < n; ++i) {
    ca[i] = cands.powers.data() + a.digits[i] * m;
    cb[i] = cands.powers.data() + b.digits[i] * m;
  }
  return lex_less(ca.data(), cb.data(), n, m);
}

}  // namespace

std::vector<OracleSolution> grid_search_multi(const ChannelInstance& instance,
                                              std::span<const Goal> goals, const GridSpec& grid,
                                              const SystemConfig& config,
                                              const OracleOptions& options) {
  grid.validate();
  config.validate();
  if (goals.empty()) throw ConfigError("grid_search_multi: no goals");
  const auto start = std::chrono::steady_clock::now();

  const CandidateSet cands = enumerate_candidates(grid, config);
  const int n = config.n_due;
  const int m = config.n_channels;

  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (cands.count != 0 && total > options.budget / cands.count) {
      throw BudgetExceededError("grid_search: " + std::to_string(cands.count) + "^" +
                                std::to_string(n) + " joint candidates exceed budget " +
                                std::to_string(options.budget));
    }
    total *= cands.count;
  }
  if (total > options.budget) {
    throw BudgetExceededError("grid_search: " + std::to_string(total) +
                              " joint candidates exceed budget " + std::to_string(options.budget));
  }

  const InstanceTables tables(instance, config);

  WorkerResult merged;
  const int n_threads = std::max(1, options.threads);
  if (n_threads == 1 || total < 2) {
    merged = sweep_range(tables, cands, goals, 0, total);
  } else {
    const std::uint64_t workers = std::min<std::uint64_t>(n_threads, total);
    const std::uint64_t chunk = (total + workers - 1) / workers;
    std::vector<WorkerResult> results(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(total, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        results[w] = sweep_range(tables, cands, goals, begin, end);
      });
    }
    for (auto& th : pool) th.join();

    merged.best.resize(goals.size());
    for (const WorkerResult& r : results) {
      for (std::size_t g = 0; g < goals.size(); ++g) {
        if (incumbent_wins(r.best[g], merged.best[g], goal_is_maximize(goals[g]), cands, n, m)) {
          merged.best[g] = r.best[g];
        }
      }
      if (incumbent_wins(r.min_violation, merged.min_violation, /*maximize=*/false, cands, n,
                         m)) {
        merged.min_violation = r.min_violation;
      }
    }
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::vector<OracleSolution> solutions(goals.size());
  for (std::size_t g = 0; g < goals.size(); ++g) {
    OracleSolution& sol = solutions[g];
    sol.evaluations = total;
    sol.wall_ms = wall_ms;
    sol.best_alloc = PowerAllocation::zeros(n, m);
    sol.min_violation_alloc = PowerAllocation::zeros(n, m);
    if (merged.best[g].valid) {
      sol.feasible = true;
      sol.objective = merged.best[g].objective;
      sol.best_alloc = alloc_from_digits(cands, merged.best[g].digits, n, m);
    } else {
      sol.feasible = false;
      sol.min_violation = merged.min_violation.objective;
      sol.min_violation_alloc = alloc_from_digits(cands, merged.min_violation.digits, n, m);
    }
  }
  return solutions;
}

OracleSolution grid_search(const ChannelInstance& instance, Goal goal, const GridSpec& grid,
                           const SystemConfig& config, const OracleOptions& options) {
  const Goal goals[1] = {goal};
  return grid_search_multi(instance, goals, grid, config, options)[0];
}

VerifyRecord verify_against(const ChannelInstance& instance, const PowerAllocation& alloc,
                            Goal goal, const OracleSolution& oracle, const SystemConfig& config) {
  VerifyRecord rec;
  rec.dnn_objective = objective_value(goal, instance, alloc, config);
  rec.dnn_feasible = check_constraints(instance, alloc, config).feasible;
  rec.oracle_feasible = oracle.feasible;
  if (oracle.feasible) {
    rec.oracle_objective = objective_value(goal, instance, oracle.best_alloc, config);
    rec.ratio = rec.oracle_objective == 0.0 ? (rec.dnn_objective == 0.0 ? 1.0 : 0.0)
                                            : rec.dnn_objective / rec.oracle_objective;
  } else {
    rec.oracle_objective = std::numeric_limits<double>::quiet_NaN();
    rec.ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

VerifyRecord verify_alloc(const ChannelInstance& instance, const PowerAllocation& alloc,
                          Goal goal, const GridSpec& grid, const SystemConfig& config,
                          const OracleOptions& options) {
  const OracleSolution oracle = grid_search(instance, goal, grid, config, options);
  return verify_against(instance, alloc, goal, oracle, config);
}

}  // namespace d2dra
