#include "d2dra/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "d2dra/errors.hpp"

namespace d2dra {

namespace {

constexpr int kMaxReceiverResamples = 10000;

double dist2d(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec2 tx_position(const Topology& t, int tx) { return tx == 0 ? t.cue : t.due_tx[tx - 1]; }
Vec2 rx_position(const Topology& t, int rx) { return rx == 0 ? t.bs : t.due_rx[rx - 1]; }

}  // namespace

double path_gain(double distance_m, const SystemConfig& config) {
  if (!(distance_m > 0.0)) {
    throw ConfigError("path_gain: distance must be > 0, got " + std::to_string(distance_m));
  }
  return std::pow(10.0, -config.pathloss_coeff_log10) *
         std::pow(distance_m, -config.pathloss_exp);
}

Topology place_users(const SystemConfig& config, RandomStream& rng) {
  config.validate();
  const int n = config.n_due;
  const double d = config.area_d;
  const double rmin = config.pair_dist_min_m;
  const double rmax = config.pair_dist_max_m;

  Topology topo;
  topo.n_due = n;
  topo.due_tx.resize(n);
  topo.due_rx.resize(n);

  for (int i = 0; i < n; ++i) {
    topo.due_tx[i] = {rng.uniform(0.0, d), rng.uniform(0.0, d)};
    int attempts = 0;
    for (;;) {
      // Area-uniform draw on the annulus around the transmitter.
      const double r = std::sqrt(rmin * rmin + rng.uniform01() * (rmax * rmax - rmin * rmin));
      const double theta = 2.0 * std::numbers::pi * rng.uniform01();
      const Vec2 rx{topo.due_tx[i].x + r * std::cos(theta), topo.due_tx[i].y + r * std::sin(theta)};
      if (rx.x >= 0.0 && rx.x <= d && rx.y >= 0.0 && rx.y <= d) {
        topo.due_rx[i] = rx;
        break;
      }
      if (++attempts >= kMaxReceiverResamples) {
        throw PlacementError("place_users: no receiver position found for DUE " +
                             std::to_string(i) + " after " +
                             std::to_string(kMaxReceiverResamples) +
                             " draws; pair distance bounds inconsistent with area");
      }
    }
  }
  topo.cue = {rng.uniform(0.0, d), rng.uniform(0.0, d)};
  topo.bs = {d / 2.0, d / 2.0};

  const int s = n + 1;
  topo.dist.resize(s * s);
  for (int tx = 0; tx < s; ++tx) {
    for (int rx = 0; rx < s; ++rx) {
      topo.dist[tx * s + rx] = dist2d(tx_position(topo, tx), rx_position(topo, rx));
    }
  }
  return topo;
}

ChannelInstance generate_instance(const Topology& topology, const SystemConfig& config,
                                  RandomStream& rng) {
  const int s = topology.n_due + 1;
  ChannelInstance inst;
  inst.n_channels = config.n_channels;
  inst.topology = topology;
  inst.gains.resize(static_cast<std::size_t>(config.n_channels) * s * s);
  std::size_t k = 0;
  for (int m = 0; m < config.n_channels; ++m) {
    for (int tx = 0; tx < s; ++tx) {
      for (int rx = 0; rx < s; ++rx) {
        inst.gains[k++] = path_gain(topology.distance(tx, rx), config) * sample_fading_power(rng);
      }
    }
  }
  return inst;
}

Dataset generate_dataset(const SystemConfig& config, std::size_t count, std::uint64_t seed,
                         int threads) {
  config.validate();
  if (count < 1) throw ConfigError("generate_dataset: count must be >= 1");

  Dataset ds;
  ds.config = config;
  ds.seed = seed;
  ds.instances.resize(count);

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RandomStream stream = RandomStream::substream(seed, k);
      const Topology topo = place_users(config, stream);
      ds.instances[k] = generate_instance(topo, config, stream);
    }
  };

  if (threads <= 1 || count < 2) {
    worker(0, count);
  } else {
    const std::size_t n_workers = std::min<std::size_t>(threads, count);
    const std::size_t chunk = (count + n_workers - 1) / n_workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_workers);
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          worker(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return ds;
}

std::vector<double> gains_db(const ChannelInstance& instance) {
  std::vector<double> out(instance.gains.size());
  for (std::size_t k = 0; k < instance.gains.size(); ++k) {
    out[k] = 10.0 * std::log10(instance.gains[k]);
  }
  return out;
}

}  // namespace d2dra
