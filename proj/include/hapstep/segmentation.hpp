#pragma once

#include "hapstep/friction_profile.hpp"
#include "hapstep/trace_io.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hapstep {

struct SegmentationConfig {
    double onset_threshold_n = 0.3;
    double release_threshold_n = 0.1;
    double min_step_s = 0.2;
    /// A step closes once activity stays below release for this long.
    double release_hold_s = 0.05;
};

struct PhaseConfig {
    /// Step-4 starts where thenar force drops below -factor * |brake peak|.
    double step4_factor = 2.0;
    /// Minimum simultaneous heel+thenar drive for Step-2 to count as present.
    double step2_min_s = 0.01;
    /// Forces within +-dead_band are treated as sign-less noise.
    double dead_band_n = 0.05;
};

struct StepSegment {
    ForceTrace trace;
    int index_in_walk = 0;        // 1-based, counts kept steps only
    std::size_t first_sample = 0; // offset into the source trace

    std::size_t end_sample() const { return first_sample + trace.size(); }
};

/// Hysteresis segmentation on |thenar_y| + |heel_y|: a step opens when the
/// activity reaches onset_threshold, its start is walked back to where the
/// activity first exceeded release_threshold, and it closes at the first
/// sample of a quiet run (below release) lasting release_hold_s.
std::vector<StepSegment> segment_steps(const ForceTrace& trace, const SegmentationConfig& cfg = {});

/// Steps first..last (1-based, inclusive). Defaults keep the middle ten of a walk.
std::vector<StepSegment> select_middle(std::span<const StepSegment> segments, int first = 4, int last = 13);

PhaseTimings detect_phases(const StepSegment& segment, const PhaseConfig& cfg = {});

/// thenar_y + heel_y, truncated at the Step-4 onset.
FrictionProfile combine_channels(const StepSegment& segment, const PhaseTimings& phases);

} // namespace hapstep
