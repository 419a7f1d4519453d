#include "hapstep/profile.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hapstep {

namespace {

double lerp(double a, double b, double w) { return a + w * (b - a); }

TriangleRegion lerp(const TriangleRegion& a, const TriangleRegion& b, double w) {
    return {lerp(a.t_onset, b.t_onset, w), lerp(a.t_peak, b.t_peak, w), lerp(a.t_offset, b.t_offset, w),
            lerp(a.f_peak, b.f_peak, w)};
}

PhaseTimings scaled(const PhaseTimings& p, double s) {
    PhaseTimings out = p;
    out.t_start *= s;
    out.t_step1_peak *= s;
    out.t_step3_peak *= s;
    out.t_step4_start *= s;
    out.t_end *= s;
    return out;
}

struct SignRun {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive
    double weight = 0.0;
};

std::vector<SignRun> sign_runs(const std::vector<double>& v, bool negative) {
    std::vector<SignRun> runs;
    for (std::size_t i = 0; i < v.size(); ++i) {
        bool in = negative ? v[i] < 0.0 : v[i] > 0.0;
        if (!in) continue;
        SignRun r{i, i, 0.0};
        while (r.last + 1 < v.size() && (negative ? v[r.last + 1] < 0.0 : v[r.last + 1] > 0.0)) ++r.last;
        for (std::size_t k = r.first; k <= r.last; ++k) r.weight += std::abs(v[k]);
        runs.push_back(r);
        i = r.last;
    }
    return runs;
}

// Zero-crossing times bounding a sign run, linearly interpolated between samples.
double onset_time(const std::vector<double>& v, std::size_t first, double rate) {
    if (first == 0) return 0.0;
    double prev = v[first - 1];
    double frac = prev / (prev - v[first]);
    return (static_cast<double>(first - 1) + frac) / rate;
}

double offset_time(const std::vector<double>& v, std::size_t last, double rate) {
    if (last + 1 >= v.size()) return static_cast<double>(last) / rate;
    double cur = v[last];
    double frac = cur / (cur - v[last + 1]);
    return (static_cast<double>(last) + frac) / rate;
}

} // namespace

double TriangleRegion::area() const { return std::abs(f_peak) * span() / 2.0; }

double TriangleRegion::value_at(double t) const {
    if (t <= t_onset || t >= t_offset) return 0.0;
    if (t <= t_peak) return f_peak * (t - t_onset) / (t_peak - t_onset);
    return f_peak * (t_offset - t) / (t_offset - t_peak);
}

std::vector<double> TriangularProfile::sample(double rate_hz) const {
    auto n = static_cast<std::size_t>(std::ceil(duration_s * rate_hz)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = force_at(static_cast<double>(k) / rate_hz);
    return out;
}

void validate(const TriangularProfile& p) {
    const auto& b = p.brake;
    const auto& d = p.drive;
    bool ordered = b.t_onset <= b.t_peak && b.t_peak <= b.t_offset && b.t_offset <= d.t_onset &&
                   d.t_onset <= d.t_peak && d.t_peak <= d.t_offset && d.t_offset <= p.duration_s && b.t_onset >= 0.0;
    if (!ordered) throw Error(ErrorKind::PhaseInconsistency, "triangle timings out of order");
    if (!(b.f_peak < 0.0) || !(d.f_peak > 0.0))
        throw Error(ErrorKind::PhaseInconsistency, "brake peak must be negative and drive peak positive");
    if (!(b.span() > 0.0) || !(d.span() > 0.0)) throw Error(ErrorKind::PhaseInconsistency, "triangle span must be positive");
}

void validate(const SpeedProfileTable& table) {
    if (table.entries.empty()) throw Error(ErrorKind::EmptyInput, "profile table has no entries");
    if (!(table.device_scale > 0.0) || table.device_scale > 1.0)
        throw Error(ErrorKind::Format, "device_scale must lie in (0, 1]");
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        validate(table.entries[i]);
        if (i > 0 && !(table.entries[i].speed_kmh > table.entries[i - 1].speed_kmh))
            throw Error(ErrorKind::Format, "table speeds must be strictly increasing");
    }
}

std::vector<FrictionProfile> align_durations(std::span<const FrictionProfile> profiles, std::optional<double> rate_hz) {
    if (profiles.empty()) throw Error(ErrorKind::EmptyInput, "no profiles to align");
    double rate = profiles.front().sample_rate_hz;
    double mean = 0.0;
    for (const auto& p : profiles) {
        if (p.empty()) throw Error(ErrorKind::EmptyInput, "cannot align an empty profile");
        rate = std::max(rate, p.sample_rate_hz);
        mean += p.duration_s();
    }
    mean /= static_cast<double>(profiles.size());
    if (rate_hz) rate = *rate_hz;
    if (!(rate > 0.0)) throw Error(ErrorKind::Config, "resampling rate must be positive");

    const auto target = static_cast<std::size_t>(std::max<long long>(1, std::llround(mean * rate)));
    const double target_duration = static_cast<double>(target) / rate;

    std::vector<FrictionProfile> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) {
        const std::size_t n = p.size();
        FrictionProfile q;
        q.sample_rate_hz = rate;
        q.speed_kmh = p.speed_kmh;
        q.phases = scaled(p.phases, target_duration / p.duration_s());
        q.values.resize(target);
        for (std::size_t k = 0; k < target; ++k) {
            // Sample k of the output sits at fractional sample k*n/N of the input.
            const double pos = static_cast<double>(k * n) / static_cast<double>(target);
            const auto i = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(i);
            const double a = p.values[std::min(i, n - 1)];
            const double b = p.values[std::min(i + 1, n - 1)];
            q.values[k] = frac == 0.0 ? a : lerp(a, b, frac);
        }
        out.push_back(std::move(q));
    }
    return out;
}

FrictionProfile average_profiles(std::span<const FrictionProfile> aligned) {
    if (aligned.empty()) throw Error(ErrorKind::EmptyInput, "no profiles to average");
    const auto& ref = aligned.front();
    for (const auto& p : aligned) {
        if (p.size() != ref.size() || p.sample_rate_hz != ref.sample_rate_hz)
            throw Error(ErrorKind::Alignment, "profiles differ in length or rate; align them first");
    }
    const double m = static_cast<double>(aligned.size());
    FrictionProfile out;
    out.sample_rate_hz = ref.sample_rate_hz;
    out.values.assign(ref.size(), 0.0);
    std::size_t step2_votes = 0;
    for (const auto& p : aligned) {
        for (std::size_t i = 0; i < p.size(); ++i) out.values[i] += p.values[i];
        out.phases.t_start += p.phases.t_start;
        out.phases.t_step1_peak += p.phases.t_step1_peak;
        out.phases.t_step3_peak += p.phases.t_step3_peak;
        out.phases.t_step4_start += p.phases.t_step4_start;
        out.phases.t_end += p.phases.t_end;
        out.speed_kmh += p.speed_kmh;
        if (p.phases.t_step2_present) ++step2_votes;
    }
    for (auto& v : out.values) v /= m;
    out.phases.t_start /= m;
    out.phases.t_step1_peak /= m;
    out.phases.t_step3_peak /= m;
    out.phases.t_step4_start /= m;
    out.phases.t_end /= m;
    out.phases.t_step2_present = 2 * step2_votes >= aligned.size();
    out.speed_kmh /= m;
    return out;
}

ImpulsePair compute_impulses(const FrictionProfile& profile) {
    if (profile.empty()) throw Error(ErrorKind::EmptyInput, "cannot integrate an empty profile");
    std::vector<double> neg(profile.size());
    std::vector<double> pos(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        neg[i] = std::max(-profile.values[i], 0.0);
        pos[i] = std::max(profile.values[i], 0.0);
    }
    return {trapezoid(neg, profile.dt()), trapezoid(pos, profile.dt())};
}

TreadmillCorrection treadmill_correct(const FrictionProfile& profile) {
    const ImpulsePair measured = compute_impulses(profile);
    if (!(measured.backward > 0.0) || !(measured.forward > 0.0))
        throw Error(ErrorKind::DegenerateProfile, "treadmill correction needs both brake and drive impulse (B=" +
                                                      format_double(measured.backward) +
                                                      ", F=" + format_double(measured.forward) + ")");
    const double target = measured.total() / 2.0;
    const double brake_scale = target / measured.backward;
    const double drive_scale = target / measured.forward;

    TreadmillCorrection out{profile, measured, {target, target}};
    for (auto& v : out.profile.values) v *= v < 0.0 ? brake_scale : drive_scale;
    return out;
}

TriangularProfile compile_triangular(const FrictionProfile& profile, const ImpulsePair& impulses) {
    if (profile.size() < 2) throw Error(ErrorKind::PhaseInconsistency, "profile too short to compile");
    const auto& v = profile.values;
    const double rate = profile.sample_rate_hz;

    auto by_weight = [](const SignRun& a, const SignRun& b) { return a.weight < b.weight; };
    auto negatives = sign_runs(v, true);
    if (negatives.empty()) throw Error(ErrorKind::PhaseInconsistency, "profile has no brake region");
    const SignRun brake = *std::max_element(negatives.begin(), negatives.end(), by_weight);

    auto positives = sign_runs(v, false);
    std::erase_if(positives, [&](const SignRun& r) { return r.first <= brake.last; });
    if (positives.empty()) throw Error(ErrorKind::PhaseInconsistency, "profile has no drive region after the brake region");
    const SignRun drive = *std::max_element(positives.begin(), positives.end(), by_weight);

    TriangularProfile out;
    out.duration_s = profile.duration_s();
    out.speed_kmh = profile.speed_kmh;

    out.brake.t_onset = onset_time(v, brake.first, rate);
    out.brake.t_offset = offset_time(v, brake.last, rate);
    out.brake.t_peak = profile.phases.t_step1_peak;
    out.drive.t_onset = onset_time(v, drive.first, rate);
    out.drive.t_offset = offset_time(v, drive.last, rate);
    out.drive.t_peak = profile.phases.t_step3_peak;

    auto check_apex = [](const TriangleRegion& r, const char* name) {
        if (r.t_peak < r.t_onset || r.t_peak > r.t_offset)
            throw Error(ErrorKind::PhaseInconsistency, std::string(name) + " apex " + format_double(r.t_peak) +
                                                           " s lies outside its region [" + format_double(r.t_onset) +
                                                           ", " + format_double(r.t_offset) + "] s");
        if (!(r.span() > 0.0)) throw Error(ErrorKind::PhaseInconsistency, std::string(name) + " region has zero span");
    };
    check_apex(out.brake, "brake");
    check_apex(out.drive, "drive");

    out.brake.f_peak = -2.0 * impulses.backward / out.brake.span();
    out.drive.f_peak = 2.0 * impulses.forward / out.drive.span();
    return out;
}

SpeedProfileTable fit_device_scale(const std::map<double, TriangularProfile>& raw_table, double device_max_force_n) {
    if (!(device_max_force_n > 0.0) || !std::isfinite(device_max_force_n))
        throw Error(ErrorKind::Config, "device_max_force must be positive");
    if (raw_table.empty()) throw Error(ErrorKind::EmptyInput, "no profiles to scale");

    double max_peak = 0.0;
    for (const auto& [speed, p] : raw_table)
        max_peak = std::max({max_peak, std::abs(p.brake.f_peak), std::abs(p.drive.f_peak)});

    SpeedProfileTable table;
    table.device_scale = max_peak > 0.0 ? std::min(1.0, device_max_force_n / max_peak) : 1.0;
    for (const auto& [speed, p] : raw_table) {
        TriangularProfile q = p;
        q.speed_kmh = speed;
        q.brake.f_peak *= table.device_scale;
        q.drive.f_peak *= table.device_scale;
        table.entries.push_back(q);
    }
    return table;
}

TriangularProfile interpolate(const SpeedProfileTable& table, double speed_kmh) {
    if (!std::isfinite(speed_kmh)) throw Error(ErrorKind::Input, "walking speed must be finite");
    const auto& e = table.entries;
    if (e.size() < 2) throw Error(ErrorKind::Input, "interpolation needs at least two table entries");

    if (speed_kmh <= e.front().speed_kmh) return e.front();
    if (speed_kmh >= e.back().speed_kmh) return e.back();
    auto hi = std::lower_bound(e.begin(), e.end(), speed_kmh,
                               [](const TriangularProfile& p, double s) { return p.speed_kmh < s; });
    if (hi->speed_kmh == speed_kmh) return *hi;
    auto lo = hi - 1;

    const double w = (speed_kmh - lo->speed_kmh) / (hi->speed_kmh - lo->speed_kmh);
    TriangularProfile out;
    out.brake = lerp(lo->brake, hi->brake, w);
    out.drive = lerp(lo->drive, hi->drive, w);
    out.duration_s = lerp(lo->duration_s, hi->duration_s, w);
    out.speed_kmh = speed_kmh;
    return out;
}

} // namespace hapstep
