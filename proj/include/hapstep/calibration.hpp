#pragma once

#include "hapstep/friction_profile.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hapstep {

enum class Direction { Forward, Backward };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Lowest PWM step (95 of 255) that still moves the skin of the sole.
inline constexpr double kDefaultMinDuty = 95.0 / 255.0;

/// Linear peak-force model for one towing direction: |F| = slope * duty + intercept.
struct CalibrationCurve {
    Direction direction = Direction::Forward;
    double slope = 1.0;
    double intercept = 0.0;
    double r_squared = 1.0;
    double min_duty = kDefaultMinDuty;

    friend bool operator==(const CalibrationCurve&, const CalibrationCurve&) = default;
};

struct CalibrationPair {
    CalibrationCurve forward;
    CalibrationCurve backward{Direction::Backward};

    const CalibrationCurve& for_direction(Direction d) const { return d == Direction::Forward ? forward : backward; }
};

struct CalibrationPoint {
    double duty = 0.0;
    double peak_force = 0.0;
};

void validate(const CalibrationCurve& curve);

/// Ordinary least squares over (duty, peak force).
CalibrationCurve fit_calibration(std::span<const CalibrationPoint> points, Direction direction,
                                 double min_duty = kDefaultMinDuty);

double duty_to_force(const CalibrationCurve& curve, double duty);

/// Inverse map, clamped to [min_duty, 1]; zero force stays at zero duty.
double force_to_duty(const CalibrationCurve& curve, double force_magnitude);

/// One (time, signed duty) command as logged per tick.
struct CommandSample {
    double t = 0.0;
    double duty = 0.0;
};

struct StepResponseOptions {
    /// The rise counts as finished once a sample gains less than this fraction
    /// of the steepest per-sample gain since the edge (or drops outright).
    double flatten_ratio = 0.1;
};

struct StepResponseMetrics {
    double rise_s = 0.0;        // backward edge until the response first stops rising
    double fall_s = 0.0;        // backward release until the response first stops falling
    double transition_s = 0.0;  // end of backward command to the forward peak
    double rise_10_90_s = 0.0;  // backward edge, conventional 10-90 %
    double forward_rise_s = 0.0;
    double forward_rise_10_90_s = 0.0;
};

/// `commanded[k]` and `measured.values[k]` are the same tick. The command must
/// hold one backward block (negative duty) followed by one forward block.
StepResponseMetrics analyze_step_response(std::span<const CommandSample> commanded, const FrictionProfile& measured,
                                          const StepResponseOptions& options = {});

} // namespace hapstep
