#pragma once

#include "hapstep/calibration.hpp"
#include "hapstep/profile.hpp"
#include "hapstep/renderer.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hapstep {

/// First-order plate: the force relaxes toward the calibrated target for
/// the current duty with time constant tau_s.
struct PlateModel {
    double tau_s = 0.05;
    CalibrationPair curves;
    double max_force_n = 10.0;
    double state_force_n = 0.0;
};

void validate(const PlateModel& model);

/// Steady-state force the plate settles to under a signed duty.
double plate_target(const PlateModel& model, double signed_duty);

/// Advances the plate by dt and returns the new (clamped) force.
double step_plate(PlateModel& model, double signed_duty, double dt);

/// Impulses over one step window (from its event tick to the next one).
/// "Achieved" impulses are attributed per region: the plate is linear in its
/// target, so the response splits exactly into the part driven by the brake
/// command and the part driven by the drive command (exact while the force
/// stays inside max_force_n). The sign-split figures
/// integrate max(-f, 0) and max(f, 0) of the total force instead, where the
/// lagged brake tail partly cancels the start of the drive.
struct StepImpulse {
    double t_start = 0.0;
    double commanded_brake = 0.0; // compiled triangle areas, N*s
    double commanded_drive = 0.0;
    double achieved_brake = 0.0;
    double achieved_drive = 0.0;
    double sign_split_brake = 0.0;
    double sign_split_drive = 0.0;
    double net = 0.0; // int f
};

struct SimMetrics {
    std::optional<double> rise_s;
    double per_region_impulse_error = 0.0; // worst |achieved - commanded| / commanded
    double sign_split_impulse_error = 0.0; // same, on the sign-split figures
    double net_impulse = 0.0;              // worst |net| over steps, N*s
    double net_impulse_ratio = 0.0;        // worst |net| / single-region commanded impulse
    std::vector<StepImpulse> steps;
    std::optional<StepResponseMetrics> step_response;
};

struct SimRun {
    std::vector<ActuatorCommand> commands;
    std::vector<double> force; // plate force per tick, N
    SimMetrics metrics;

    friend bool operator==(const SimRun& a, const SimRun& b);
};

struct SimOptions {
    /// Extra idle ticks after the last envelope so the lagged force can decay.
    double tail_s = 0.5;
};

/// Renderer and plate stepped in lockstep at 1 kHz.
SimRun run_closed_loop(const SpeedProfileTable& table, const CalibrationPair& curves, std::span<const GaitEvent> events,
                       PlateModel model, const SimOptions& options = {});

/// Hard-edged backward block, pause, forward block.
struct StepTestPattern {
    double duty = 1.0;
    double lead_s = 0.1;
    double hold_s = 0.5;
    double gap_s = 0.5;
    double tail_s = 0.5;
};

std::vector<ActuatorCommand> step_test_commands(const StepTestPattern& pattern);

/// Drives the plate open-loop with the step pattern and analyzes the response.
SimRun run_step_response_test(PlateModel model, const StepTestPattern& pattern = {},
                              const StepResponseOptions& analysis = {});

} // namespace hapstep
