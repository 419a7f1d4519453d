#include "hapstep/pipeline.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <map>

namespace hapstep {

void validate(const PipelineConfig& cfg) {
    if (cfg.speeds.empty()) throw Error(ErrorKind::Config, "no walking speeds configured");
    for (std::size_t i = 1; i < cfg.speeds.size(); ++i)
        if (!(cfg.speeds[i] > cfg.speeds[i - 1])) throw Error(ErrorKind::Config, "speeds must be strictly increasing");
    if (!(cfg.device_max_force_n > 0.0)) throw Error(ErrorKind::Config, "device_max_force must be positive");
    if (cfg.first_step < 1 || cfg.first_step > cfg.last_step)
        throw Error(ErrorKind::Config, "step window must satisfy 1 <= first <= last");
}

std::vector<FrictionProfile> extract_step_profiles(const ForceTrace& trace, const PipelineConfig& cfg,
                                                   std::vector<StepRejection>& rejected) {
    const auto segments = segment_steps(trace, cfg.segmentation);
    const auto middle = select_middle(segments, cfg.first_step, cfg.last_step);
    std::vector<FrictionProfile> out;
    for (const auto& seg : middle) {
        try {
            const auto phases = detect_phases(seg, cfg.phases);
            out.push_back(combine_channels(seg, phases));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PhaseDetection) throw;
            rejected.push_back({trace.meta.participant_id, trace.meta.walking_speed_kmh, seg.index_in_walk, e.what()});
        }
    }
    return out;
}

CompiledTable compile_table(std::span<const ForceTrace> traces, const PipelineConfig& cfg) {
    validate(cfg);
    if (traces.empty()) throw Error(ErrorKind::EmptyInput, "no traces to compile");

    std::map<double, std::vector<const ForceTrace*>> by_speed;
    for (const auto& t : traces) {
        const double v = t.meta.walking_speed_kmh;
        if (std::find(cfg.speeds.begin(), cfg.speeds.end(), v) == cfg.speeds.end())
            throw Error(ErrorKind::Config, "trace of " + t.meta.participant_id + " at " + format_double(v) +
                                               " km/h does not match a configured speed");
        by_speed[v].push_back(&t);
    }

    CompiledTable out;
    std::map<double, TriangularProfile> raw;
    for (double speed : cfg.speeds) {
        auto it = by_speed.find(speed);
        if (it == by_speed.end())
            throw Error(ErrorKind::Config, "no trace recorded at " + format_double(speed) + " km/h");

        SpeedSummary summary;
        summary.speed_kmh = speed;
        std::vector<FrictionProfile> participant_profiles;
        for (const ForceTrace* trace : it->second) {
            auto steps = extract_step_profiles(*trace, cfg, out.rejected);
            if (steps.empty()) continue;
            summary.steps += static_cast<int>(steps.size());
            participant_profiles.push_back(average_profiles(align_durations(steps)));
        }
        if (participant_profiles.empty())
            throw Error(ErrorKind::DegenerateProfile, "every step at " + format_double(speed) + " km/h was rejected");
        summary.participants = static_cast<int>(participant_profiles.size());

        FrictionProfile mean = average_profiles(align_durations(participant_profiles));
        mean.speed_kmh = speed;
        const auto corrected = treadmill_correct(mean);
        summary.measured = corrected.measured;
        summary.corrected = corrected.corrected;
        summary.treadmill_impulse = corrected.treadmill_impulse();
        raw[speed] = compile_triangular(corrected.profile, corrected.corrected);
        out.speeds.push_back(summary);
    }
    out.table = fit_device_scale(raw, cfg.device_max_force_n);
    return out;
}

} // namespace hapstep
