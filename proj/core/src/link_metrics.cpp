#include "d2dra/link_metrics.hpp"

#include <cmath>

#include "d2dra/errors.hpp"

namespace d2dra {

std::string to_string(Goal goal) {
  switch (goal) {
    case Goal::kMaxSe: return "max-se";
    case Goal::kMaxEe: return "max-ee";
    case Goal::kMinPw: return "min-pw";
  }
  throw ConfigError("unknown goal enum value");
}

Goal parse_goal(const std::string& tag) {
  if (tag == "max-se") return Goal::kMaxSe;
  if (tag == "max-ee") return Goal::kMaxEe;
  if (tag == "min-pw") return Goal::kMinPw;
  throw ConfigError("unknown goal '" + tag + "' (valid: max-se, max-ee, min-pw)");
}

double PowerAllocation::total(int i) const {
  double sum = 0.0;
  for (int m = 0; m < n_channels; ++m) sum += at(i, m);
  return sum;
}

bool PowerAllocation::satisfies_power_constraint(const SystemConfig& config) const {
  const double p_max = config.p_max_w();
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
  }
  for (int i = 0; i < n_due; ++i) {
    if (total(i) > p_max * (1.0 + 1e-9)) return false;
  }
  return true;
}

double sinr(const ChannelInstance& instance, const PowerAllocation& alloc, int due_index,
            int channel_index, const SystemConfig& config) {
  const int i = due_index;
  const int m = channel_index;
  const int rx = i + 1;  // DUE i's receiver in the gain matrix
  double denom = config.noise_power_w();
  for (int j = 0; j < alloc.n_due; ++j) {
    if (j == i) continue;
    denom += alloc.at(j, m) * instance.gain(m, j + 1, rx);
  }
  denom += config.p_cue_per_channel_w() * instance.gain(m, 0, rx);
  return alloc.at(i, m) * instance.gain(m, i + 1, rx) / denom;
}

std::vector<double> spectral_efficiency(const ChannelInstance& instance,
                                        const PowerAllocation& alloc,
                                        const SystemConfig& config) {
  std::vector<double> se(alloc.n_due, 0.0);
  for (int i = 0; i < alloc.n_due; ++i) {
    double sum = 0.0;
    for (int m = 0; m < alloc.n_channels; ++m) {
      sum += std::log2(1.0 + sinr(instance, alloc, i, m, config));
    }
    se[i] = sum;
  }
  return se;
}

std::vector<double> energy_efficiency(const ChannelInstance& instance,
                                      const PowerAllocation& alloc, const SystemConfig& config) {
  const std::vector<double> se = spectral_efficiency(instance, alloc, config);
  const double p_c = config.p_circuit_w();
  std::vector<double> ee(alloc.n_due, 0.0);
  for (int i = 0; i < alloc.n_due; ++i) {
    ee[i] = config.bandwidth_hz * se[i] / (alloc.total(i) + p_c);
  }
  return ee;
}

std::vector<double> cue_interference(const ChannelInstance& instance,
                                     const PowerAllocation& alloc, const SystemConfig& config) {
  (void)config;
  std::vector<double> inter(alloc.n_channels, 0.0);
  for (int k = 0; k < alloc.n_channels; ++k) {
    double sum = 0.0;
    for (int i = 0; i < alloc.n_due; ++i) {
      sum += alloc.at(i, k) * instance.gain(k, i + 1, 0);
    }
    inter[k] = sum;
  }
  return inter;
}

LinkReport check_constraints(const ChannelInstance& instance, const PowerAllocation& alloc,
                             const SystemConfig& config) {
  LinkReport report;
  report.se_per_due = spectral_efficiency(instance, alloc, config);
  report.ee_per_due = energy_efficiency(instance, alloc, config);
  report.cue_interference_w = cue_interference(instance, alloc, config);
  report.total_power_w.resize(alloc.n_due);
  for (int i = 0; i < alloc.n_due; ++i) report.total_power_w[i] = alloc.total(i);

  const double i_t = config.i_thresh_w();
  for (double ik : report.cue_interference_w) {
    report.violation_interference_w = std::max(report.violation_interference_w, ik - i_t);
  }
  report.violation_interference_w = std::max(report.violation_interference_w, 0.0);
  for (double se : report.se_per_due) {
    report.violation_qos = std::max(report.violation_qos, config.r_thresh - se);
  }
  report.violation_qos = std::max(report.violation_qos, 0.0);
  report.feasible = report.violation_interference_w == 0.0 && report.violation_qos == 0.0;
  return report;
}

double objective_value(Goal goal, const ChannelInstance& instance, const PowerAllocation& alloc,
                       const SystemConfig& config) {
  switch (goal) {
    case Goal::kMaxSe: {
      double sum = 0.0;
      for (double se : spectral_efficiency(instance, alloc, config)) sum += se;
      return sum;
    }
    case Goal::kMaxEe: {
      double sum = 0.0;
      for (double ee : energy_efficiency(instance, alloc, config)) sum += ee;
      return sum;
    }
    case Goal::kMinPw: {
      double sum = 0.0;
      for (int i = 0; i < alloc.n_due; ++i) sum += alloc.total(i);
      return sum;
    }
  }
  throw ConfigError("unknown goal enum value");
}

}  // namespace d2dra
