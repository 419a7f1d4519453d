#include "hapstep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hapstep::synth {

namespace {

double bump(double t, double start, double end, double amp) {
    if (t <= start || t >= end || amp == 0.0) return 0.0;
    return amp * std::sin(std::numbers::pi * (t - start) / (end - start));
}

StepShape lerp(const StepShape& a, const StepShape& b, double w) {
    auto l = [w](double x, double y) { return x + w * (y - x); };
    StepShape s;
    s.brake_amp = l(a.brake_amp, b.brake_amp);
    s.brake_end = l(a.brake_end, b.brake_end);
    s.heel_drive_amp = l(a.heel_drive_amp, b.heel_drive_amp);
    s.heel_drive_start = l(a.heel_drive_start, b.heel_drive_start);
    s.heel_drive_end = l(a.heel_drive_end, b.heel_drive_end);
    s.thenar_drive_amp = l(a.thenar_drive_amp, b.thenar_drive_amp);
    s.thenar_drive_start = l(a.thenar_drive_start, b.thenar_drive_start);
    s.thenar_drive_end = l(a.thenar_drive_end, b.thenar_drive_end);
    s.spike_amp = l(a.spike_amp, b.spike_amp);
    s.spike_width = l(a.spike_width, b.spike_width);
    return s;
}

} // namespace

double StepShape::heel_at(double t) const {
    return -bump(t, 0.0, brake_end, brake_amp) + bump(t, heel_drive_start, heel_drive_end, heel_drive_amp);
}

double StepShape::thenar_at(double t) const {
    return bump(t, thenar_drive_start, thenar_drive_end, thenar_drive_amp) -
           bump(t, thenar_drive_end, thenar_drive_end + spike_width, spike_amp);
}

StepShape nominal_shape(double speed_kmh) {
    static const StepShape slow{1.6, 0.25, 0.25, 0.18, 0.50, 0.45, 0.22, 0.82, 4.0, 0.10};
    static const StepShape medium{2.0, 0.18, 0.20, 0.15, 0.33, 0.70, 0.17, 0.62, 5.0, 0.08};
    static const StepShape fast{2.6, 0.14, 0.00, 0.10, 0.20, 1.00, 0.13, 0.50, 6.5, 0.07};
    if (speed_kmh <= 1.0) return slow;
    if (speed_kmh <= 2.5) return lerp(slow, medium, (speed_kmh - 1.0) / 1.5);
    if (speed_kmh <= 4.0) return lerp(medium, fast, (speed_kmh - 2.5) / 1.5);
    return fast;
}

StepShape scaled(const StepShape& s, double ts, double fs) {
    StepShape o = s;
    for (double* t : {&o.brake_end, &o.heel_drive_start, &o.heel_drive_end, &o.thenar_drive_start,
                      &o.thenar_drive_end, &o.spike_width})
        *t *= ts;
    for (double* f : {&o.brake_amp, &o.heel_drive_amp, &o.thenar_drive_amp, &o.spike_amp}) *f *= fs;
    return o;
}

Walk make_walk(const WalkSpec& spec, double release) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-spec.step_jitter, spec.step_jitter);
    std::uniform_real_distribution<double> noise(-spec.noise_n, spec.noise_n);

    const StepShape base = scaled(nominal_shape(spec.speed_kmh), spec.participant_time_scale,
                                  spec.participant_force_scale);
    Walk walk;
    double t = spec.swing_s * 0.5 + 0.0123;
    for (int i = 0; i < spec.steps; ++i) {
        StepShape s = scaled(base, 1.0 + jitter(rng), 1.0 + jitter(rng));
        walk.shapes.push_back(s);
        walk.origins_s.push_back(t);
        t += s.duration() + spec.swing_s * (1.0 + jitter(rng));
    }
    const double total = t + spec.swing_s * 0.5;
    const auto n = static_cast<std::size_t>(std::ceil(total * spec.rate_hz));

    ForceTrace& tr = walk.trace;
    tr.sample_rate_hz = spec.rate_hz;
    tr.meta.walking_speed_kmh = spec.speed_kmh;
    tr.meta.participant_id = spec.participant;
    tr.samples.resize(n);
    std::size_t step = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) / spec.rate_hz;
        while (step + 1 < walk.shapes.size() && tk >= walk.origins_s[step + 1]) ++step;
        const double local = tk - walk.origins_s[step];
        auto& smp = tr.samples[k];
        smp.heel_y = walk.shapes[step].heel_at(local) + noise(rng);
        smp.thenar_y = walk.shapes[step].thenar_at(local) + noise(rng);
    }

    for (std::size_t i = 0; i < walk.shapes.size(); ++i) {
        const auto& s = walk.shapes[i];
        // Activity starts on the heel brake and ends on the falling edge of the spike.
        const double rise = s.brake_end / std::numbers::pi * std::asin(release / s.brake_amp);
        const double fall = s.spike_width / std::numbers::pi * std::asin(release / s.spike_amp);
        const double t0 = walk.origins_s[i] + rise;
        const double t1 = walk.origins_s[i] + s.duration() - fall;
        walk.truth.emplace_back(static_cast<std::size_t>(std::ceil(t0 * spec.rate_hz)),
                                static_cast<std::size_t>(std::floor(t1 * spec.rate_hz)) + 1);
    }
    return walk;
}

std::vector<ForceTrace> make_study(const std::vector<double>& speeds, int participants, std::uint64_t seed) {
    std::vector<ForceTrace> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> person(-0.08, 0.08);
    std::vector<std::pair<double, double>> scales;
    for (int p = 0; p < participants; ++p) scales.emplace_back(1.0 + person(rng), 1.0 + 2.0 * person(rng));
    for (double v : speeds) {
        for (int p = 0; p < participants; ++p) {
            WalkSpec spec;
            spec.speed_kmh = v;
            spec.participant = "P" + std::to_string(p + 1);
            spec.participant_time_scale = scales[static_cast<std::size_t>(p)].first;
            spec.participant_force_scale = scales[static_cast<std::size_t>(p)].second;
            spec.seed = seed * 1000 + static_cast<std::uint64_t>(p) * 17 + static_cast<std::uint64_t>(v * 10);
            out.push_back(make_walk(spec).trace);
        }
    }
    return out;
}

} // namespace hapstep::synth
