#pragma once

#include "hapstep/friction_profile.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace hapstep {

/// Backward (brake) and forward (drive) impulse magnitudes in N*s.
struct ImpulsePair {
    double backward = 0.0;
    double forward = 0.0;

    double total() const { return backward + forward; }
    friend bool operator==(const ImpulsePair&, const ImpulsePair&) = default;
};

struct TreadmillCorrection {
    FrictionProfile profile;
    ImpulsePair measured;  // B, F as recorded on the belt
    ImpulsePair corrected; // B' = F' = (B + F) / 2

    /// Belt contribution T, implied by B = B' + T and F = F' - T.
    double treadmill_impulse() const { return measured.backward - corrected.backward; }
};

/// One triangle of the compiled envelope. f_peak < 0 for brake, > 0 for drive.
struct TriangleRegion {
    double t_onset = 0.0;
    double t_peak = 0.0;
    double t_offset = 0.0;
    double f_peak = 0.0;

    double span() const { return t_offset - t_onset; }
    double area() const;
    double value_at(double t) const;

    friend bool operator==(const TriangleRegion&, const TriangleRegion&) = default;
};

/// Per-step command envelope: brake triangle then drive triangle.
struct TriangularProfile {
    TriangleRegion brake;
    TriangleRegion drive;
    double duration_s = 0.0;
    double speed_kmh = 0.0;

    /// Signed force at time t from the step start (zero outside both triangles).
    double force_at(double t) const { return brake.value_at(t) + drive.value_at(t); }
    std::vector<double> sample(double rate_hz) const;

    friend bool operator==(const TriangularProfile&, const TriangularProfile&) = default;
};

/// Throws PhaseInconsistency when the timing order or peak signs are violated.
void validate(const TriangularProfile& profile);

struct SpeedProfileTable {
    double device_scale = 1.0;
    std::vector<TriangularProfile> entries; // strictly increasing speed_kmh

    friend bool operator==(const SpeedProfileTable&, const SpeedProfileTable&) = default;
};

void validate(const SpeedProfileTable& table);

/// Rescales every profile (and its phase timings) to the mean duration, then
/// resamples to a common rate (the first profile's unless given).
std::vector<FrictionProfile> align_durations(std::span<const FrictionProfile> profiles,
                                             std::optional<double> rate_hz = std::nullopt);

/// Pointwise mean; phase times averaged, Step-2 kept when at least half the inputs show it.
FrictionProfile average_profiles(std::span<const FrictionProfile> aligned);

/// Trapezoidal B = int max(-f, 0), F = int max(f, 0).
ImpulsePair compute_impulses(const FrictionProfile& profile);

/// Scales the negative and positive parts separately so both enclose (B + F) / 2.
TreadmillCorrection treadmill_correct(const FrictionProfile& profile);

/// Replaces the dominant negative and the following dominant positive sign
/// region by triangles over the same zero-crossing spans, with apexes at the
/// Step-1 and Step-3 peak times and areas equal to the given impulses.
TriangularProfile compile_triangular(const FrictionProfile& profile, const ImpulsePair& impulses);

/// Shared reduction so the largest peak in the table fits the device.
SpeedProfileTable fit_device_scale(const std::map<double, TriangularProfile>& raw_table, double device_max_force_n);

/// Piecewise-linear in speed between bracketing knots, clamped outside.
TriangularProfile interpolate(const SpeedProfileTable& table, double speed_kmh);

} // namespace hapstep
