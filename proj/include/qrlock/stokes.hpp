#pragma once

#include <cmath>
#include <vector>

#include "qrlock/angles.hpp"
#include "qrlock/errors.hpp"

namespace qrlock {

/// Polarization state as a point on the Poincare sphere (unit Stokes vector).
struct StokesState {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;

    double norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

    double dot(const StokesState& o) const { return s1 * o.s1 + s2 * o.s2 + s3 * o.s3; }

    static StokesState normalized(double s1, double s2, double s3) {
        StokesState s{s1, s2, s3};
        double n = s.norm();
        if (!(n > 0.0)) throw ParameterError("Stokes vector must be non-zero");
        return {s1 / n, s2 / n, s3 / n};
    }
};

/// Great-circle angle between two unit Stokes vectors.
inline double angular_distance(const StokesState& a, const StokesState& b) {
    double d = a.dot(b);
    if (d > 1.0) d = 1.0;
    if (d < -1.0) d = -1.0;
    return std::acos(d);
}

/// Power coupling of a state into the polarization mode `optimal`:
/// (1 + cos angle)/2, which is 1 aligned and 0 antipodal.
inline double coupling_efficiency(const StokesState& state, const StokesState& optimal) {
    if (std::abs(state.norm() - 1.0) > 1e-9 || std::abs(optimal.norm() - 1.0) > 1e-9)
        throw ParameterError("coupling efficiency requires unit Stokes vectors");
    return 0.5 * (1.0 + state.dot(optimal));
}

/// Near-uniform deterministic sphere covering (Fibonacci lattice).
inline std::vector<StokesState> fibonacci_sphere(std::size_t n_points) {
    if (n_points < 2) throw ParameterError("sphere lattice needs at least 2 points");
    std::vector<StokesState> pts;
    pts.reserve(n_points);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n_points; ++i) {
        double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n_points);
        double r = std::sqrt(1.0 - z * z);
        double az = golden * static_cast<double>(i);
        pts.push_back({r * std::cos(az), r * std::sin(az), z});
    }
    return pts;
}

/// Largest nearest-neighbor angle of the lattice: "one grid cell" when
/// comparing argmin locations between two maps over the same lattice.
inline double lattice_cell_angle(const std::vector<StokesState>& lattice) {
    if (lattice.size() < 2) throw ParameterError("lattice needs at least 2 points");
    double worst = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        double nearest = kPi;
        for (std::size_t j = 0; j < lattice.size(); ++j) {
            if (i == j) continue;
            double d = angular_distance(lattice[i], lattice[j]);
            if (d < nearest) nearest = d;
        }
        if (nearest > worst) worst = nearest;
    }
    return worst;
}

}  // namespace qrlock
