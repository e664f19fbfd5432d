#pragma once

#include <string>

#include "d2dra/channel_model.hpp"

namespace d2dra {

// Dataset container: an 8-byte little-endian header length, a UTF-8 JSON
// header (format version, generator id, full SystemConfig, seed, count and
// field order), then one binary record per instance. Each record holds the
// M x (N+1) x (N+1) gains as little-endian IEEE-754 doubles in row-major
// [m][i][j] order, followed by the 2*(2N+2) node coordinates
// (due_tx xy pairs, due_rx xy pairs, cue, bs).
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

// SHA-256 of the exact bytes save_dataset would write; used to key oracle
// caches and manifests without touching disk.
std::string dataset_digest_hex(const Dataset& dataset);

// One row per instance with headered h_m_i_j columns (linear gains), followed
// by the node coordinates.
void export_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace d2dra
