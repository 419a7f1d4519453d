#pragma once

// Random but valid inputs for property tests.

#include "hapstep/friction_profile.hpp"
#include "hapstep/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace fixture {

/// Brake lobe then drive lobe, each a skewed bump with a random exponent,
/// optionally separated by a short zero gap. Phases point at the lobe extremes.
inline hapstep::FrictionProfile random_profile(std::mt19937_64& rng, double rate_hz = 1000.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double brake_len = 0.08 + 0.3 * u(rng);
    const double gap = u(rng) < 0.3 ? 0.02 * u(rng) : 0.0;
    const double drive_len = 0.15 + 0.5 * u(rng);
    const double brake_amp = 0.3 + 3.0 * u(rng);
    const double drive_amp = 0.2 + 2.0 * u(rng);
    const double skew_b = 0.5 + 1.5 * u(rng);
    const double skew_d = 0.5 + 1.5 * u(rng);
    const double total = brake_len + gap + drive_len + 0.01;

    hapstep::FrictionProfile p;
    p.sample_rate_hz = rate_hz;
    const auto n = static_cast<std::size_t>(std::llround(total * rate_hz));
    p.values.resize(n);
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate_hz;
        double v = 0.0;
        if (t < brake_len) {
            v = -brake_amp * std::sin(std::numbers::pi * std::pow(t / brake_len, skew_b));
        } else if (t >= brake_len + gap && t < brake_len + gap + drive_len) {
            const double x = (t - brake_len - gap) / drive_len;
            v = drive_amp * std::sin(std::numbers::pi * std::pow(x, skew_d));
        }
        p.values[i] = v;
        if (v < p.values[imin]) imin = i;
        if (v > p.values[imax]) imax = i;
    }
    p.phases.t_step1_peak = static_cast<double>(imin) / rate_hz;
    p.phases.t_step3_peak = static_cast<double>(imax) / rate_hz;
    p.phases.t_step4_start = p.duration_s();
    p.phases.t_end = p.duration_s();
    return p;
}

/// Triangular profile with consistent ordering and random geometry.
inline hapstep::TriangularProfile random_triangles(std::mt19937_64& rng, double speed = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    hapstep::TriangularProfile p;
    p.speed_kmh = speed;
    p.brake.t_onset = 0.02 * u(rng);
    p.brake.t_offset = p.brake.t_onset + 0.08 + 0.3 * u(rng);
    p.brake.t_peak = p.brake.t_onset + (0.05 + 0.9 * u(rng)) * p.brake.span();
    p.brake.f_peak = -(0.2 + 3.0 * u(rng));
    p.drive.t_onset = p.brake.t_offset + 0.02 * u(rng);
    p.drive.t_offset = p.drive.t_onset + 0.15 + 0.5 * u(rng);
    p.drive.t_peak = p.drive.t_onset + (0.05 + 0.9 * u(rng)) * p.drive.span();
    p.drive.f_peak = 0.2 + 2.0 * u(rng);
    p.duration_s = p.drive.t_offset + 0.01;
    return p;
}

} // namespace fixture
