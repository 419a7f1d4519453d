#pragma once

#include "hapstep/profile.hpp"
#include "hapstep/segmentation.hpp"
#include "hapstep/trace_io.hpp"

#include <span>
#include <string>
#include <vector>

namespace hapstep {

struct PipelineConfig {
    SegmentationConfig segmentation;
    PhaseConfig phases;
    int first_step = 4;
    int last_step = 13;
    double device_max_force_n = 3.0;
    std::vector<double> speeds{1.0, 2.5, 4.0};
};

void validate(const PipelineConfig& cfg);

struct StepRejection {
    std::string participant;
    double speed_kmh = 0.0;
    int step_index = 0;
    std::string reason;
};

/// Segment, keep the configured window, detect phases, combine channels.
/// Steps failing phase detection are reported in `rejected`, not patched.
std::vector<FrictionProfile> extract_step_profiles(const ForceTrace& trace, const PipelineConfig& cfg,
                                                   std::vector<StepRejection>& rejected);

struct SpeedSummary {
    double speed_kmh = 0.0;
    int participants = 0;
    int steps = 0;
    ImpulsePair measured;
    ImpulsePair corrected;
    double treadmill_impulse = 0.0;
};

struct CompiledTable {
    SpeedProfileTable table;
    std::vector<SpeedSummary> speeds;
    std::vector<StepRejection> rejected;
};

/// Per speed: each participant's steps are aligned and averaged, then the
/// participant profiles are aligned and averaged, impulse-corrected and
/// compiled to triangles; finally one device scale is fitted over all speeds.
CompiledTable compile_table(std::span<const ForceTrace> traces, const PipelineConfig& cfg);

} // namespace hapstep
