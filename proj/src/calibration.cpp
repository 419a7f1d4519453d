#include "hapstep/calibration.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace hapstep {

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

Direction parse_direction(std::string_view text) {
    if (text == "forward") return Direction::Forward;
    if (text == "backward") return Direction::Backward;
    throw Error(ErrorKind::Format, "direction must be 'forward' or 'backward', got '" + std::string(text) + "'");
}

void validate(const CalibrationCurve& curve) {
    if (!(curve.slope > 0.0) || !std::isfinite(curve.slope))
        throw Error(ErrorKind::Format, "calibration slope must be positive");
    if (!std::isfinite(curve.intercept)) throw Error(ErrorKind::Format, "calibration intercept must be finite");
    if (!(curve.min_duty >= 0.0) || !(curve.min_duty < 1.0))
        throw Error(ErrorKind::Format, "min_duty must lie in [0, 1)");
}

CalibrationCurve fit_calibration(std::span<const CalibrationPoint> points, Direction direction, double min_duty) {
    std::set<double> distinct;
    for (const auto& p : points) {
        if (!std::isfinite(p.duty) || !std::isfinite(p.peak_force) || p.duty < 0.0 || p.duty > 1.0)
            throw Error(ErrorKind::Input, "calibration point out of range (duty " + format_double(p.duty) + ")");
        distinct.insert(p.duty);
    }
    if (distinct.size() < 2) throw Error(ErrorKind::UnderdeterminedFit, "need at least two distinct duty values");

    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.duty;
        my += p.peak_force;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        sxx += (p.duty - mx) * (p.duty - mx);
        sxy += (p.duty - mx) * (p.peak_force - my);
        syy += (p.peak_force - my) * (p.peak_force - my);
    }

    CalibrationCurve c;
    c.direction = direction;
    c.slope = sxy / sxx;
    c.intercept = my - c.slope * mx;
    c.min_duty = min_duty;
    double ss_res = 0.0;
    for (const auto& p : points) {
        double r = p.peak_force - (c.slope * p.duty + c.intercept);
        ss_res += r * r;
    }
    c.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    if (!(c.slope > 0.0))
        throw Error(ErrorKind::UnderdeterminedFit, "fitted slope " + format_double(c.slope) + " is not positive");
    validate(c);
    return c;
}

double duty_to_force(const CalibrationCurve& curve, double duty) { return curve.slope * duty + curve.intercept; }

double force_to_duty(const CalibrationCurve& curve, double force_magnitude) {
    if (!(force_magnitude >= 0.0)) throw Error(ErrorKind::Input, "force magnitude must be non-negative");
    if (force_magnitude == 0.0) return 0.0;
    return std::clamp((force_magnitude - curve.intercept) / curve.slope, curve.min_duty, 1.0);
}

namespace {

struct Block {
    std::size_t on = 0;  // first commanded sample of the block
    std::size_t off = 0; // first sample after the block
};

Block find_block(std::span<const CommandSample> cmd, std::size_t from, bool negative) {
    auto active = [&](std::size_t i) { return negative ? cmd[i].duty < 0.0 : cmd[i].duty > 0.0; };
    std::size_t on = from;
    while (on < cmd.size() && !active(on)) ++on;
    if (on == cmd.size())
        throw Error(ErrorKind::Analysis, std::string("no ") + (negative ? "backward" : "forward") + " command edge");
    std::size_t off = on;
    while (off < cmd.size() && active(off)) ++off;
    if (off == cmd.size())
        throw Error(ErrorKind::Analysis, std::string(negative ? "backward" : "forward") + " command never releases");
    return {on, off};
}

// First sample after `from` where the magnitude stops moving in the given
// direction: it reverses, or changes by less than ratio * (largest change so far).
std::size_t settle_index(const std::vector<double>& m, std::size_t from, std::size_t limit, bool rising, double ratio) {
    double steepest = 0.0;
    for (std::size_t k = from; k < limit; ++k) {
        double prev = k == 0 ? 0.0 : m[k - 1];
        double change = rising ? m[k] - prev : prev - m[k];
        if (k > from && (change <= 0.0 || change < ratio * steepest)) return k;
        steepest = std::max(steepest, change);
    }
    return limit;
}

double crossing_time(std::span<const CommandSample> cmd, const std::vector<double>& m, std::size_t from,
                     std::size_t limit, double level) {
    for (std::size_t k = from; k < limit; ++k) {
        if (m[k] >= level) {
            if (k == 0) return cmd[0].t;
            double prev = m[k - 1];
            double frac = m[k] == prev ? 0.0 : (level - prev) / (m[k] - prev);
            return cmd[k - 1].t + frac * (cmd[k].t - cmd[k - 1].t);
        }
    }
    throw Error(ErrorKind::Analysis, "response never reaches " + format_double(level));
}

double rise_10_90(std::span<const CommandSample> cmd, const std::vector<double>& m, const Block& b) {
    double base = b.on == 0 ? 0.0 : m[b.on - 1];
    double top = *std::max_element(m.begin() + static_cast<std::ptrdiff_t>(b.on), m.begin() + static_cast<std::ptrdiff_t>(b.off));
    if (!(top > base)) throw Error(ErrorKind::Analysis, "response does not rise during the command");
    double lo = base + 0.1 * (top - base);
    double hi = base + 0.9 * (top - base);
    return crossing_time(cmd, m, b.on, b.off, hi) - crossing_time(cmd, m, b.on, b.off, lo);
}

} // namespace

StepResponseMetrics analyze_step_response(std::span<const CommandSample> commanded, const FrictionProfile& measured,
                                          const StepResponseOptions& options) {
    if (commanded.size() != measured.size())
        throw Error(ErrorKind::Analysis, "command and response logs differ in length");
    if (commanded.size() < 3) throw Error(ErrorKind::Analysis, "logs too short for edge analysis");

    const Block back = find_block(commanded, 0, true);
    const Block fwd = find_block(commanded, back.off, false);

    std::vector<double> back_mag(measured.size());
    std::vector<double> fwd_mag(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        back_mag[i] = -measured.values[i];
        fwd_mag[i] = measured.values[i];
    }
    const double ratio = options.flatten_ratio;
    auto t = [&](std::size_t i) { return commanded[std::min(i, commanded.size() - 1)].t; };

    StepResponseMetrics out;
    out.rise_s = t(settle_index(back_mag, back.on, back.off, true, ratio)) - t(back.on);
    out.fall_s = t(settle_index(back_mag, back.off, fwd.on, false, ratio)) - t(back.off);
    out.rise_10_90_s = rise_10_90(commanded, back_mag, back);
    const std::size_t fwd_peak = settle_index(fwd_mag, fwd.on, fwd.off, true, ratio);
    out.forward_rise_s = t(fwd_peak) - t(fwd.on);
    out.forward_rise_10_90_s = rise_10_90(commanded, fwd_mag, fwd);
    out.transition_s = t(fwd_peak) - t(back.off);
    return out;
}

} // namespace hapstep
