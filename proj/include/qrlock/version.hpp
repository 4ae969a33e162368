#pragma once

#include <string_view>

namespace qrlock {

inline constexpr std::string_view kToolName = "qrlock";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Bump when the JSON results layout changes incompatibly.
inline constexpr int kResultsSchemaVersion = 1;

// Bump when the waveform file layouts change incompatibly.
inline constexpr int kWaveformSchemaVersion = 1;

}  // namespace qrlock
