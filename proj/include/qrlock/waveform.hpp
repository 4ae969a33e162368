#pragma once

#include <cstddef>
#include <vector>

#include "qrlock/errors.hpp"

namespace qrlock {

/// Sampled heterodyne difference currents of the two quadrature channels.
struct WaveformPair {
    double sample_period_s = 0.0;
    double t0_s = 0.0;
    std::vector<double> i0_v;
    std::vector<double> i90_v;

    std::size_t size() const { return i0_v.size(); }

    void validate() const {
        if (i0_v.size() != i90_v.size())
            throw ParameterError("waveform channels must have equal length");
        if (!(sample_period_s > 0.0)) throw ParameterError("sample period must be positive");
    }
};

}  // namespace qrlock
