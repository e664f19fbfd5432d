#pragma once

#include <cmath>

namespace d2dra {

// dBm <-> Watt. 0 dBm = 1 mW.
inline double dbm_to_watt(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double p_w) { return 10.0 * std::log10(p_w) + 30.0; }

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace d2dra
