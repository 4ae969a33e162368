#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"

namespace qrlock {

/// Equal-width histogram over the full circle [-pi, pi).
struct PhaseHistogram {
    int bins = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double bin_width() const { return kTwoPi / bins; }

    double center(int b) const { return -kPi + (b + 0.5) * bin_width(); }

    int nonzero_bins() const {
        int n = 0;
        for (auto c : counts)
            if (c > 0) ++n;
        return n;
    }

    static PhaseHistogram from_phases(std::span<const double> phases, int bins) {
        if (bins < 4) throw ParameterError("phase histogram needs at least 4 bins");
        PhaseHistogram h;
        h.bins = bins;
        h.counts.assign(static_cast<std::size_t>(bins), 0);
        const double inv_width = bins / kTwoPi;
        for (double p : phases) {
            double w = wrap_angle(p);
            auto idx = static_cast<int>((w + kPi) * inv_width);
            if (idx < 0) idx = 0;
            if (idx >= bins) idx = bins - 1;
            ++h.counts[static_cast<std::size_t>(idx)];
        }
        h.total = phases.size();
        return h;
    }
};

}  // namespace qrlock
