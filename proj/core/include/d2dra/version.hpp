#pragma once

namespace d2dra {

inline constexpr const char* kToolVersion = "1.0.0";

// Bumped whenever the on-disk layout changes incompatibly.
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kOracleCacheFormatVersion = 1;

}  // namespace d2dra
