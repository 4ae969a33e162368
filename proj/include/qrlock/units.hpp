#pragma once

#include <cmath>

#include "qrlock/errors.hpp"

namespace qrlock {

inline double dbm_to_milliwatts(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double dbm_to_watts(double dbm) { return 1e-3 * dbm_to_milliwatts(dbm); }

inline double milliwatts_to_dbm(double mw) {
    if (!(mw > 0.0)) throw ParameterError("power must be positive to convert to dBm");
    return 10.0 * std::log10(mw);
}

inline double watts_to_dbm(double w) { return milliwatts_to_dbm(w * 1e3); }

/// Attenuation in dB between an input and an output power (both linear units).
inline double attenuation_db(double p_in, double p_out) {
    if (!(p_in > 0.0) || !(p_out > 0.0)) throw ParameterError("attenuation requires positive powers");
    return 10.0 * std::log10(p_in / p_out);
}

}  // namespace qrlock
