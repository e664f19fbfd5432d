#pragma once

#include <cstdint>

#include "d2dra/units.hpp"

namespace d2dra {

// Physical and scenario constants for the underlay D2D system.
// Defaults are the evaluation scenario: N = M = 2, 500 m area, 23 dBm
// transmit/circuit power, 10 MHz per channel, -173 dBm/Hz noise density,
// I_T = -55 dBm, R_T = 3 bps/Hz, path gain 10^-3.453 * d^-3.8.
struct SystemConfig {
  int n_due = 2;
  int n_channels = 2;
  double area_d = 500.0;
  double p_max_dbm = 23.0;
  double p_circuit_dbm = 23.0;
  double bandwidth_hz = 10.0e6;  // per channel
  double noise_density_dbm_hz = -173.0;
  double i_thresh_dbm = -55.0;
  double r_thresh = 3.0;  // bps/Hz per DUE
  double p_cue_dbm = 23.0;
  double pair_dist_min_m = 2.0;
  double pair_dist_max_m = 30.0;
  double pathloss_coeff_log10 = 3.453;
  double pathloss_exp = 3.8;

  // Throws ConfigError on any violated invariant.
  void validate() const;

  double p_max_w() const { return dbm_to_watt(p_max_dbm); }
  double p_circuit_w() const { return dbm_to_watt(p_circuit_dbm); }
  double i_thresh_w() const { return dbm_to_watt(i_thresh_dbm); }
  // Per-channel noise power N0 * B.
  double noise_power_w() const { return dbm_to_watt(noise_density_dbm_hz) * bandwidth_hz; }
  // CUE power is split equally across the M channels.
  double p_cue_per_channel_w() const { return dbm_to_watt(p_cue_dbm) / n_channels; }

  // Flattened gain count M * (N+1)^2; also the DNN input width.
  int input_dim() const { return n_channels * (n_due + 1) * (n_due + 1); }

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

}  // namespace d2dra
