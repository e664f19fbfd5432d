#include "d2dra/system_config.hpp"

#include <cmath>
#include <string>

#include "d2dra/errors.hpp"

namespace d2dra {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid SystemConfig: " + what);
}

}  // namespace

void SystemConfig::validate() const {
  require(n_due >= 1, "n_due must be >= 1");
  require(n_channels >= 1, "n_channels must be >= 1");
  require(area_d > 0.0, "area_d must be > 0");
  require(pair_dist_min_m > 0.0, "pair_dist_min_m must be > 0");
  require(pair_dist_min_m < pair_dist_max_m, "pair_dist_min_m must be < pair_dist_max_m");
  require(pair_dist_max_m <= area_d, "pair_dist_max_m must be <= area_d");
  require(std::isfinite(p_max_dbm), "p_max_dbm must be finite");
  require(std::isfinite(p_circuit_dbm), "p_circuit_dbm must be finite");
  require(std::isfinite(noise_density_dbm_hz), "noise_density_dbm_hz must be finite");
  require(std::isfinite(i_thresh_dbm), "i_thresh_dbm must be finite");
  require(std::isfinite(p_cue_dbm), "p_cue_dbm must be finite");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(r_thresh >= 0.0 && std::isfinite(r_thresh), "r_thresh must be finite and >= 0");
  require(std::isfinite(pathloss_coeff_log10), "pathloss_coeff_log10 must be finite");
  require(pathloss_exp > 0.0, "pathloss_exp must be > 0");
}

}  // namespace d2dra
