#pragma once

#include <string>
#include <vector>

#include "d2dra/channel_model.hpp"
#include "d2dra/system_config.hpp"

namespace d2dra {

enum class Goal { kMaxSe, kMaxEe, kMinPw };

std::string to_string(Goal goal);
// Throws ConfigError on an unknown tag. Valid tags: max-se, max-ee, min-pw.
Goal parse_goal(const std::string& tag);
inline bool goal_is_maximize(Goal goal) { return goal != Goal::kMinPw; }

// Per-DUE, per-channel transmit powers in Watts, row-major [i][m].
struct PowerAllocation {
  int n_due = 0;
  int n_channels = 0;
  std::vector<double> p;

  static PowerAllocation zeros(int n_due, int n_channels) {
    PowerAllocation a;
    a.n_due = n_due;
    a.n_channels = n_channels;
    a.p.assign(static_cast<std::size_t>(n_due) * n_channels, 0.0);
    return a;
  }
  double& at(int i, int m) { return p[i * n_channels + m]; }
  double at(int i, int m) const { return p[i * n_channels + m]; }
  double total(int i) const;

  // p[i][m] >= 0 and sum_m p[i][m] <= P_T within 1e-9 relative.
  bool satisfies_power_constraint(const SystemConfig& config) const;

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

struct LinkReport {
  std::vector<double> se_per_due;          // bps/Hz, summed over channels
  std::vector<double> ee_per_due;          // bits per Joule
  std::vector<double> cue_interference_w;  // per channel, at the BS
  std::vector<double> total_power_w;       // per DUE
  bool feasible = false;
  double violation_interference_w = 0.0;  // max_k [I^k - I_T]^+
  double violation_qos = 0.0;             // max_i [R_T - SE_i]^+
};

// SINR of DUE i on channel m: own received power over noise + co-channel DUE
// interference + CUE interference (CUE transmits P_CUE/M on every channel).
double sinr(const ChannelInstance& instance, const PowerAllocation& alloc, int due_index,
            int channel_index, const SystemConfig& config);

// SE_i = sum_m log2(1 + sinr(i, m)).
std::vector<double> spectral_efficiency(const ChannelInstance& instance,
                                        const PowerAllocation& alloc,
                                        const SystemConfig& config);

// EE_i = B * SE_i / (sum_m p[i][m] + P_c), bits per Joule.
std::vector<double> energy_efficiency(const ChannelInstance& instance,
                                      const PowerAllocation& alloc, const SystemConfig& config);

// I^k = sum_i p[i][k] * h[k][i][BS].
std::vector<double> cue_interference(const ChannelInstance& instance,
                                     const PowerAllocation& alloc, const SystemConfig& config);

// Feasible iff I^k <= I_T for all k and SE_i >= R_T for all i (inclusive
// boundaries). The power constraint holds by construction upstream.
LinkReport check_constraints(const ChannelInstance& instance, const PowerAllocation& alloc,
                             const SystemConfig& config);

// max-se: sum_i SE_i; max-ee: sum_i EE_i; min-pw: sum_{i,m} p[i][m].
double objective_value(Goal goal, const ChannelInstance& instance, const PowerAllocation& alloc,
                       const SystemConfig& config);

}  // namespace d2dra
