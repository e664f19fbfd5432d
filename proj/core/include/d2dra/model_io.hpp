#pragma once

#include <string>

#include "d2dra/ra_net.hpp"

namespace d2dra {

// Model file: a JSON document with format version, ArchConfig, SystemConfig
// snapshot, goal tag, NormStats, training metadata, and every weight/bias
// matrix as nested decimal arrays at full round-trip precision.
void save_model(const RaModel& model, const std::string& path);
RaModel load_model(const std::string& path);

}  // namespace d2dra
