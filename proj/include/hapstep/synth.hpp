#pragma once

// Synthetic walking traces with known ground truth, for fixtures and tests.

#include "hapstep/trace_io.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hapstep::synth {

/// Sole-frame step built from half-sine bumps (seconds from step start):
/// heel brake, optional heel drive (double support), thenar drive, and the
/// terminal thenar spike.
struct StepShape {
    double brake_amp = 1.6, brake_end = 0.25;
    double heel_drive_amp = 0.25, heel_drive_start = 0.18, heel_drive_end = 0.50;
    double thenar_drive_amp = 0.45, thenar_drive_start = 0.22, thenar_drive_end = 0.82;
    double spike_amp = 4.0, spike_width = 0.10;

    double duration() const { return thenar_drive_end + spike_width; }
    double heel_at(double t) const;
    double thenar_at(double t) const;
};

/// Nominal shape for one of the measured speeds (1.0, 2.5, 4.0 km/h); other
/// speeds are interpolated.
StepShape nominal_shape(double speed_kmh);

/// Uniform scale of all times by `time_scale` and all forces by `force_scale`.
StepShape scaled(const StepShape& s, double time_scale, double force_scale);

struct WalkSpec {
    double speed_kmh = 1.0;
    int steps = 30;
    double rate_hz = 1000.0;
    double swing_s = 0.45;
    double noise_n = 0.005;
    double participant_time_scale = 1.0;
    double participant_force_scale = 1.0;
    double step_jitter = 0.03; // relative, per step
    std::string participant = "P1";
    std::uint64_t seed = 1;
};

struct Walk {
    ForceTrace trace; // sole frame
    /// [first, end) sample bounds where |thenar| + |heel| exceeds `release`,
    /// from the analytic bump shapes.
    std::vector<std::pair<std::size_t, std::size_t>> truth;
    std::vector<StepShape> shapes;
    std::vector<double> origins_s;
};

Walk make_walk(const WalkSpec& spec, double release_threshold = 0.1);

/// Four participants at each speed, like the treadmill recordings.
std::vector<ForceTrace> make_study(const std::vector<double>& speeds, int participants = 4, std::uint64_t seed = 7);

} // namespace hapstep::synth
