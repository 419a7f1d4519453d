#include "hapstep/segmentation.hpp"

#include "hapstep/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hapstep {

namespace {

std::size_t samples_for(double seconds, double rate) {
    auto n = static_cast<std::size_t>(std::ceil(seconds * rate - 1e-9));
    return std::max<std::size_t>(n, 1);
}

void check(const SegmentationConfig& cfg) {
    if (!(cfg.onset_threshold_n > 0.0) || !(cfg.release_threshold_n > 0.0))
        throw Error(ErrorKind::Config, "segmentation thresholds must be positive");
    if (!(cfg.release_threshold_n < cfg.onset_threshold_n))
        throw Error(ErrorKind::Config, "release_threshold must be below onset_threshold");
    if (!(cfg.min_step_s > 0.0) || !(cfg.release_hold_s > 0.0))
        throw Error(ErrorKind::Config, "min_step_s and release_hold_s must be positive");
}

} // namespace

std::vector<StepSegment> segment_steps(const ForceTrace& trace, const SegmentationConfig& cfg) {
    check(cfg);
    validate(trace);

    const std::size_t n = trace.size();
    const double rate = trace.sample_rate_hz;
    const std::size_t hold = samples_for(cfg.release_hold_s, rate);

    std::vector<double> activity(n);
    for (std::size_t i = 0; i < n; ++i)
        activity[i] = std::abs(trace.samples[i].thenar_y) + std::abs(trace.samples[i].heel_y);

    std::vector<StepSegment> out;
    auto close = [&](std::size_t start, std::size_t end) {
        if (static_cast<double>(end - start) / rate < cfg.min_step_s) return;
        StepSegment seg;
        seg.trace = trace.slice(start, end - start);
        seg.first_sample = start;
        seg.index_in_walk = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(seg));
    };

    bool in_step = false;
    std::size_t start = 0;
    std::size_t floor_index = 0;
    std::size_t quiet_start = 0;
    std::size_t quiet_len = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (!in_step) {
            if (activity[i] >= cfg.onset_threshold_n) {
                in_step = true;
                start = i;
                while (start > floor_index && activity[start - 1] >= cfg.release_threshold_n) --start;
                quiet_len = 0;
            }
            continue;
        }
        if (activity[i] < cfg.release_threshold_n) {
            if (quiet_len == 0) quiet_start = i;
            if (++quiet_len >= hold) {
                close(start, quiet_start);
                in_step = false;
                floor_index = quiet_start;
            }
        } else {
            quiet_len = 0;
        }
    }
    if (in_step) close(start, quiet_len > 0 ? quiet_start : n);
    return out;
}

std::vector<StepSegment> select_middle(std::span<const StepSegment> segments, int first, int last) {
    if (first < 1 || first > last)
        throw Error(ErrorKind::Config, "step window must satisfy 1 <= first <= last");
    if (segments.size() < static_cast<std::size_t>(last)) {
        auto shortfall = static_cast<std::size_t>(last) - segments.size();
        throw Error(ErrorKind::InsufficientSteps, "need " + std::to_string(last) + " steps, found " +
                                                      std::to_string(segments.size()) + " (short by " +
                                                      std::to_string(shortfall) + ")");
    }
    std::vector<StepSegment> out;
    for (const auto& seg : segments)
        if (seg.index_in_walk >= first && seg.index_in_walk <= last) out.push_back(seg);
    return out;
}

PhaseTimings detect_phases(const StepSegment& segment, const PhaseConfig& cfg) {
    const auto& samples = segment.trace.samples;
    const std::size_t n = samples.size();
    if (n == 0) throw Error(ErrorKind::PhaseDetection, "empty step");
    const double rate = segment.trace.sample_rate_hz;
    const double db = cfg.dead_band_n;
    const std::string which = "step " + std::to_string(segment.index_in_walk) + ": ";

    std::vector<double> combined(n);
    for (std::size_t i = 0; i < n; ++i) combined[i] = samples[i].thenar_y + samples[i].heel_y;

    std::size_t first_sig = 0;
    while (first_sig < n && std::abs(combined[first_sig]) <= db) ++first_sig;
    if (first_sig == n) throw Error(ErrorKind::PhaseDetection, which + "no force above the dead band");
    if (combined[first_sig] > 0.0)
        throw Error(ErrorKind::PhaseDetection, which + "no leading brake (negative) region");

    std::size_t drive_start = first_sig + 1;
    while (drive_start < n && combined[drive_start] <= db) ++drive_start;
    if (drive_start >= n) throw Error(ErrorKind::PhaseDetection, which + "no drive (positive) region");

    auto brake_begin = combined.begin() + static_cast<std::ptrdiff_t>(first_sig);
    auto brake_end = combined.begin() + static_cast<std::ptrdiff_t>(drive_start);
    const std::size_t brake_peak = static_cast<std::size_t>(std::min_element(brake_begin, brake_end) - combined.begin());
    const double brake_mag = -combined[brake_peak];

    std::size_t step4 = n;
    const double spike = cfg.step4_factor * brake_mag;
    for (std::size_t i = drive_start; i < n; ++i) {
        if (samples[i].thenar_y < -spike) {
            step4 = i;
            while (step4 > drive_start && samples[step4 - 1].thenar_y < 0.0) --step4;
            break;
        }
    }
    if (step4 <= drive_start) throw Error(ErrorKind::PhaseDetection, which + "drive region collapses into Step-4");

    auto drive_begin = combined.begin() + static_cast<std::ptrdiff_t>(drive_start);
    auto drive_end = combined.begin() + static_cast<std::ptrdiff_t>(step4);
    const std::size_t drive_peak = static_cast<std::size_t>(std::max_element(drive_begin, drive_end) - combined.begin());

    const std::size_t need = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.step2_min_s * rate - 1e-9)));
    std::size_t run = 0;
    bool step2 = false;
    for (std::size_t i = 0; i < step4 && !step2; ++i) {
        run = (samples[i].heel_y > db && samples[i].thenar_y > db) ? run + 1 : 0;
        step2 = run >= need;
    }

    PhaseTimings p;
    p.t_start = 0.0;
    p.t_step1_peak = static_cast<double>(brake_peak) / rate;
    p.t_step2_present = step2;
    p.t_step3_peak = static_cast<double>(drive_peak) / rate;
    p.t_step4_start = static_cast<double>(step4) / rate;
    p.t_end = static_cast<double>(n) / rate;
    return p;
}

FrictionProfile combine_channels(const StepSegment& segment, const PhaseTimings& phases) {
    const auto& tr = segment.trace;
    auto keep = static_cast<std::size_t>(std::llround(phases.t_step4_start * tr.sample_rate_hz));
    keep = std::min(keep, tr.size());

    FrictionProfile out;
    out.sample_rate_hz = tr.sample_rate_hz;
    out.phases = phases;
    out.speed_kmh = tr.meta.walking_speed_kmh;
    out.values.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) out.values[i] = tr.samples[i].thenar_y + tr.samples[i].heel_y;
    return out;
}

} // namespace hapstep
