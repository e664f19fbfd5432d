#pragma once

#include <cstdint>
#include <vector>

#include "d2dra/rng.hpp"
#include "d2dra/system_config.hpp"

namespace d2dra {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Node geometry for one network snapshot. Transmitter index 0 is the CUE,
// receiver index 0 is the BS; DUE pair i occupies index i+1 on both sides.
struct Topology {
  int n_due = 0;
  std::vector<Vec2> due_tx;  // N
  std::vector<Vec2> due_rx;  // N
  Vec2 cue;
  Vec2 bs;
  std::vector<double> dist;  // (N+1) x (N+1), tx-major

  double distance(int tx, int rx) const { return dist[tx * (n_due + 1) + rx]; }

  friend bool operator==(const Topology&, const Topology&) = default;
};

// One realization of all linear channel gains h[m][i][j].
struct ChannelInstance {
  int n_channels = 0;
  Topology topology;
  std::vector<double> gains;  // M x (N+1) x (N+1), row-major [m][i][j]

  int n_due() const { return topology.n_due; }
  int gain_index(int m, int tx, int rx) const {
    const int s = topology.n_due + 1;
    return (m * s + tx) * s + rx;
  }
  double gain(int m, int tx, int rx) const { return gains[gain_index(m, tx, rx)]; }

  friend bool operator==(const ChannelInstance&, const ChannelInstance&) = default;
};

struct Dataset {
  SystemConfig config;
  std::uint64_t seed = 0;
  std::vector<ChannelInstance> instances;

  std::size_t count() const { return instances.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Linear power gain of the simplified path loss model:
// 10^-pathloss_coeff_log10 * d^-pathloss_exp. Throws ConfigError on d <= 0.
double path_gain(double distance_m, const SystemConfig& config);

// Multipath power gain |f|^2 for f ~ CSCG(0,1): unit-mean exponential.
inline double sample_fading_power(RandomStream& rng) { return rng.exponential(); }

// Draws one topology. DUE transmitters and the CUE are uniform on [0,D]^2,
// each DUE receiver is area-uniform on the annulus
// [pair_dist_min_m, pair_dist_max_m] around its transmitter (resampled until
// inside the square), the BS sits at the center. Draw order per DUE pair is
// tx then rx, then the CUE. Throws PlacementError after 10,000 rejected
// receiver draws.
Topology place_users(const SystemConfig& config, RandomStream& rng);

// Fills gains h[m][i][j] = path_gain(d_ij) * fading, with fading drawn
// independently per (m, i, j) in row-major order.
ChannelInstance generate_instance(const Topology& topology, const SystemConfig& config,
                                  RandomStream& rng);

// count independent (topology, instance) draws. Sample k consumes only the
// sub-stream RandomStream::substream(seed, k), so the result is identical
// whether samples are generated serially or in parallel.
Dataset generate_dataset(const SystemConfig& config, std::size_t count, std::uint64_t seed,
                         int threads = 1);

// Gains converted to dB (10*log10), flattened in [m][i][j] order.
std::vector<double> gains_db(const ChannelInstance& instance);

}  // namespace d2dra
