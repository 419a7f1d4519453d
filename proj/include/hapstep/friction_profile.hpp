#pragma once

#include <cstddef>
#include <vector>

namespace hapstep {

/// Four-phase timing of one step, seconds from the step start.
/// Brake peak (heel strike), optional double-support drive, drive peak,
/// and the onset of the terminal thenar spike that is never rendered.
struct PhaseTimings {
    double t_start = 0.0;
    double t_step1_peak = 0.0;
    bool t_step2_present = false;
    double t_step3_peak = 0.0;
    double t_step4_start = 0.0;
    double t_end = 0.0;

    friend bool operator==(const PhaseTimings&, const PhaseTimings&) = default;
};

/// Single-channel (whole sole) friction force of one step, sole frame.
struct FrictionProfile {
    double sample_rate_hz = 1000.0;
    std::vector<double> values;
    PhaseTimings phases;
    double speed_kmh = 0.0;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double duration_s() const { return static_cast<double>(values.size()) / sample_rate_hz; }
    double dt() const { return 1.0 / sample_rate_hz; }

    friend bool operator==(const FrictionProfile&, const FrictionProfile&) = default;
};

} // namespace hapstep
