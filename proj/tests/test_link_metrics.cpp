#include <doctest.h>

#include <cmath>
#include <vector>

#include "d2dra/channel_model.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/link_metrics.hpp"
#include "d2dra/units.hpp"

using namespace d2dra;

namespace {

// Single-DUE, single-channel instance with every gain pinned by hand.
ChannelInstance tiny_instance(double h_own, double h_to_bs, double h_cue_to_rx) {
  ChannelInstance inst;
  inst.n_channels = 1;
  inst.topology.n_due = 1;
  inst.topology.due_tx = {{0, 0}};
  inst.topology.due_rx = {{1, 0}};
  inst.topology.dist = {1, 1, 1, 1};
  // order [m][tx][rx]: (0,0)=cue->bs (0,1)=cue->rx1 (1,0)=due->bs (1,1)=due->rx1
  inst.gains = {1e-30, h_cue_to_rx, h_to_bs, h_own};
  return inst;
}

SystemConfig tiny_config() {
  SystemConfig c;
  c.n_due = 1;
  c.n_channels = 1;
  c.p_cue_dbm = -1000.0;  // effectively silent CUE
  c.r_thresh = 0.0;
  return c;
}

ChannelInstance random_instance(const SystemConfig& c, std::uint64_t seed) {
  RandomStream rng(seed);
  return generate_instance(place_users(c, rng), c, rng);
}

}  // namespace

TEST_SUITE_BEGIN("link-metrics");

TEST_CASE("goal tags round-trip and reject unknowns") {
  CHECK(parse_goal("max-se") == Goal::kMaxSe);
  CHECK(parse_goal("max-ee") == Goal::kMaxEe);
  CHECK(parse_goal("min-pw") == Goal::kMinPw);
  CHECK(to_string(Goal::kMaxEe) == "max-ee");
  CHECK_THROWS_AS(parse_goal("max-throughput"), ConfigError);
  CHECK(goal_is_maximize(Goal::kMaxSe));
  CHECK(!goal_is_maximize(Goal::kMinPw));
}

TEST_CASE("sinr hand evaluation") {
  // Literal values: p = 0.1995 W, h = 1e-10, noise 5.0119e-14 W, silent CUE.
  SystemConfig c = tiny_config();
  const ChannelInstance inst = tiny_instance(1e-10, 1e-12, 1e-30);
  PowerAllocation alloc = PowerAllocation::zeros(1, 1);

  CHECK(sinr(inst, alloc, 0, 0, c) == 0.0);  // zero numerator

  alloc.at(0, 0) = 0.1995;
  const double noise = c.noise_power_w();
  CHECK(noise == doctest::Approx(5.0119e-14).epsilon(1e-4));
  const double expected = 0.1995 * 1e-10 / noise;
  CHECK(sinr(inst, alloc, 0, 0, c) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(sinr(inst, alloc, 0, 0, c) == doctest::Approx(398.05).epsilon(1e-3));
}

TEST_CASE("sinr is scale invariant when noise is negligible") {
  SystemConfig c;
  c.noise_density_dbm_hz = -1000.0;  // denominators dominated by interference
  c.p_cue_dbm = -1000.0;
  const ChannelInstance inst = random_instance(c, 3);
  PowerAllocation alloc = PowerAllocation::zeros(2, 2);
  alloc.at(0, 0) = 0.05;
  alloc.at(0, 1) = 0.02;
  alloc.at(1, 0) = 0.125;
  alloc.at(1, 1) = 0.0625;
  PowerAllocation doubled = alloc;
  for (double& p : doubled.p) p *= 2.0;  // exact in binary floating point
  for (int i = 0; i < 2; ++i) {
    for (int m = 0; m < 2; ++m) {
      CHECK(sinr(inst, alloc, i, m, c) == sinr(inst, doubled, i, m, c));
    }
  }
}

TEST_CASE("spectral efficiency hand evaluation") {
  SystemConfig c = tiny_config();
  const ChannelInstance inst = tiny_instance(1e-10, 1e-12, 1e-30);
  PowerAllocation alloc = PowerAllocation::zeros(1, 1);
  CHECK(spectral_efficiency(inst, alloc, c)[0] == 0.0);

  alloc.at(0, 0) = 0.1995;
  const double s = sinr(inst, alloc, 0, 0, c);
  CHECK(std::log2(1.0 + s) == doctest::Approx(8.6404).epsilon(1e-4));
  CHECK(spectral_efficiency(inst, alloc, c)[0] == std::log2(1.0 + s));
}

TEST_CASE("an interferer strictly decreases spectral efficiency") {
  SystemConfig c;
  const ChannelInstance inst = random_instance(c, 17);
  PowerAllocation solo = PowerAllocation::zeros(2, 2);
  solo.at(0, 0) = 0.1;
  PowerAllocation both = solo;
  both.at(1, 0) = 0.1;  // same channel
  CHECK(spectral_efficiency(inst, both, c)[0] < spectral_efficiency(inst, solo, c)[0]);
}

TEST_CASE("energy efficiency hand evaluation and linearity in bandwidth") {
  SystemConfig c = tiny_config();
  const ChannelInstance inst = tiny_instance(1e-10, 1e-12, 1e-30);
  PowerAllocation alloc = PowerAllocation::zeros(1, 1);
  CHECK(energy_efficiency(inst, alloc, c)[0] == 0.0);

  alloc.at(0, 0) = 0.1995;
  // EE = B * SE / (p + P_c) with the spec's rounded inputs: 2.1655e8 bits/J.
  SystemConfig rounded = c;
  rounded.p_circuit_dbm = watt_to_dbm(0.1995);
  const double se = spectral_efficiency(inst, alloc, rounded)[0];
  const double ee = energy_efficiency(inst, alloc, rounded)[0];
  CHECK(ee == doctest::Approx(1e7 * se / (0.1995 + 0.1995)).epsilon(1e-12));
  CHECK(ee == doctest::Approx(2.1655e8).epsilon(1e-3));

  // Doubling B doubles EE exactly; noise is silenced so SINR stays fixed.
  SystemConfig base2;
  base2.noise_density_dbm_hz = -1000.0;
  SystemConfig wide2 = base2;
  wide2.bandwidth_hz *= 2.0;
  const ChannelInstance two_due = random_instance(base2, 5);
  PowerAllocation a2 = PowerAllocation::zeros(2, 2);
  a2.at(0, 0) = 0.03;
  a2.at(1, 1) = 0.07;
  const auto ee1 = energy_efficiency(two_due, a2, base2);
  const auto ee2 = energy_efficiency(two_due, a2, wide2);
  for (int i = 0; i < 2; ++i) CHECK(ee2[i] == 2.0 * ee1[i]);
}

TEST_CASE("cue interference is a plain weighted sum") {
  SystemConfig c;
  const ChannelInstance inst = random_instance(c, 23);
  PowerAllocation zero = PowerAllocation::zeros(2, 2);
  for (double ik : cue_interference(inst, zero, c)) CHECK(ik == 0.0);

  // N=1-style single term: only DUE 0 transmits on channel 0.
  PowerAllocation solo = zero;
  solo.at(0, 0) = 0.1;
  const auto one = cue_interference(inst, solo, c);
  CHECK(one[0] == doctest::Approx(0.1 * inst.gain(0, 1, 0)).epsilon(1e-15));
  CHECK(one[1] == 0.0);

  PowerAllocation other = zero;
  other.at(1, 0) = 0.05;
  PowerAllocation both = zero;
  both.at(0, 0) = 0.1;
  both.at(1, 0) = 0.05;
  const auto a = cue_interference(inst, solo, c);
  const auto b = cue_interference(inst, other, c);
  const auto ab = cue_interference(inst, both, c);
  CHECK(ab[0] == doctest::Approx(a[0] + b[0]).epsilon(1e-15));
}

TEST_CASE("hand-pinned single-term interference") {
  SystemConfig c = tiny_config();
  const ChannelInstance inst = tiny_instance(1e-10, 1e-8, 1e-30);
  PowerAllocation alloc = PowerAllocation::zeros(1, 1);
  alloc.at(0, 0) = 0.1;
  CHECK(cue_interference(inst, alloc, c)[0] == doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("constraint report marks violations and honors boundaries") {
  SystemConfig c;
  c.r_thresh = 3.0;
  const ChannelInstance inst = random_instance(c, 29);

  const PowerAllocation zero = PowerAllocation::zeros(2, 2);
  const LinkReport r0 = check_constraints(inst, zero, c);
  CHECK(!r0.feasible);
  CHECK(r0.violation_qos == doctest::Approx(3.0));
  CHECK(r0.violation_interference_w == 0.0);

  // Exactly-at-threshold interference is feasible (inclusive boundary). A
  // power-of-two gain keeps p * h == I_T exact in floating point.
  SystemConfig cb = tiny_config();
  const ChannelInstance tiny = tiny_instance(1e-6, 0.0078125, 1e-30);
  PowerAllocation boundary = PowerAllocation::zeros(1, 1);
  cb.r_thresh = 0.0;
  boundary.at(0, 0) = cb.i_thresh_w() / tiny.gain(0, 1, 0);
  const LinkReport rb = check_constraints(tiny, boundary, cb);
  CHECK(cue_interference(tiny, boundary, cb)[0] == cb.i_thresh_w());
  CHECK(rb.feasible);
}

TEST_CASE("report agrees with an independent straight-line recomputation") {
  SystemConfig c;
  const ChannelInstance inst = random_instance(c, 31);
  PowerAllocation alloc = PowerAllocation::zeros(2, 2);
  alloc.at(0, 0) = 0.08;
  alloc.at(0, 1) = 0.02;
  alloc.at(1, 0) = 0.01;
  alloc.at(1, 1) = 0.15;

  const LinkReport report = check_constraints(inst, alloc, c);

  const double noise = dbm_to_watt(c.noise_density_dbm_hz) * c.bandwidth_hz;
  const double cue = dbm_to_watt(c.p_cue_dbm) / c.n_channels;
  for (int i = 0; i < 2; ++i) {
    double se = 0.0;
    for (int m = 0; m < 2; ++m) {
      const int rx = i + 1;
      const int other = 1 - i;
      const double interference = alloc.at(other, m) * inst.gain(m, other + 1, rx);
      const double denom = noise + interference + cue * inst.gain(m, 0, rx);
      se += std::log2(1.0 + alloc.at(i, m) * inst.gain(m, i + 1, rx) / denom);
    }
    CHECK(report.se_per_due[i] == doctest::Approx(se).epsilon(1e-14));
    const double ee =
        c.bandwidth_hz * se / (alloc.at(i, 0) + alloc.at(i, 1) + dbm_to_watt(c.p_circuit_dbm));
    CHECK(report.ee_per_due[i] == doctest::Approx(ee).epsilon(1e-14));
    CHECK(report.total_power_w[i] == doctest::Approx(alloc.at(i, 0) + alloc.at(i, 1)));
  }
  for (int k = 0; k < 2; ++k) {
    const double ik = alloc.at(0, k) * inst.gain(k, 1, 0) + alloc.at(1, k) * inst.gain(k, 2, 0);
    CHECK(report.cue_interference_w[k] == doctest::Approx(ik).epsilon(1e-14));
  }
}

TEST_CASE("objective values line up with their definitions") {
  SystemConfig c;
  const ChannelInstance inst = random_instance(c, 37);

  const PowerAllocation zero = PowerAllocation::zeros(2, 2);
  CHECK(objective_value(Goal::kMaxSe, inst, zero, c) == 0.0);

  PowerAllocation alloc = PowerAllocation::zeros(2, 2);
  alloc.at(0, 0) = 0.1;
  alloc.at(0, 1) = 0.05;
  alloc.at(1, 0) = 0.0;
  alloc.at(1, 1) = 0.02;
  CHECK(objective_value(Goal::kMinPw, inst, alloc, c) == doctest::Approx(0.17).epsilon(1e-12));

  const auto ee = energy_efficiency(inst, alloc, c);
  CHECK(objective_value(Goal::kMaxEe, inst, alloc, c) == ee[0] + ee[1]);
  const auto se = spectral_efficiency(inst, alloc, c);
  CHECK(objective_value(Goal::kMaxSe, inst, alloc, c) == se[0] + se[1]);
}

TEST_CASE("SE accumulated per channel equals the vector output exactly") {
  SystemConfig c;
  const ChannelInstance inst = random_instance(c, 41);
  PowerAllocation alloc = PowerAllocation::zeros(2, 2);
  alloc.at(0, 0) = 0.11;
  alloc.at(0, 1) = 0.07;
  alloc.at(1, 0) = 0.021;
  alloc.at(1, 1) = 0.002;
  const auto se = spectral_efficiency(inst, alloc, c);
  for (int i = 0; i < 2; ++i) {
    double sum = 0.0;
    for (int m = 0; m < 2; ++m) sum += std::log2(1.0 + sinr(inst, alloc, i, m, c));
    CHECK(se[i] == sum);
  }
}

TEST_CASE("single link SE is strictly increasing in own power") {
  SystemConfig c = tiny_config();
  const ChannelInstance inst = tiny_instance(2e-9, 1e-12, 4e-13);
  double prev = -1.0;
  for (double p : {0.0, 0.01, 0.05, 0.1, 0.15, 0.1995}) {
    PowerAllocation alloc = PowerAllocation::zeros(1, 1);
    alloc.at(0, 0) = p;
    const double se = spectral_efficiency(inst, alloc, c)[0];
    CHECK(se > prev);
    prev = se;
  }
}

TEST_CASE("all outputs stay finite over random boxed inputs") {
  SystemConfig c;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ChannelInstance inst = random_instance(c, 1000 + seed);
    RandomStream rng(seed);
    PowerAllocation alloc = PowerAllocation::zeros(2, 2);
    const double p_max = c.p_max_w();
    for (int i = 0; i < 2; ++i) {
      const double total = rng.uniform01() * p_max;
      const double split = rng.uniform01();
      alloc.at(i, 0) = total * split;
      alloc.at(i, 1) = total * (1.0 - split);
    }
    REQUIRE(alloc.satisfies_power_constraint(c));
    const LinkReport report = check_constraints(inst, alloc, c);
    for (double v : report.se_per_due) REQUIRE(std::isfinite(v));
    for (double v : report.ee_per_due) REQUIRE(std::isfinite(v));
    for (double v : report.cue_interference_w) REQUIRE(std::isfinite(v));
    REQUIRE(std::isfinite(objective_value(Goal::kMaxEe, inst, alloc, c)));
  }
}

TEST_SUITE_END();
