#pragma once

#include "hapstep/calibration.hpp"
#include "hapstep/friction_profile.hpp"
#include "hapstep/plant.hpp"
#include "hapstep/profile.hpp"

#include "json.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace hapstep {

/// Phase sidecar row for one step.
struct PhaseAnnotation {
    int step_index = 0;
    PhaseTimings phases;
};

nlohmann::json to_json(std::span<const PhaseAnnotation> annotations);
std::vector<PhaseAnnotation> phases_from_json(const nlohmann::json& j);

/// `{device_scale, entries:[{speed_kmh, duration_s, brake:{...}, drive:{...}}]}`
nlohmann::json to_json(const SpeedProfileTable& table);
SpeedProfileTable table_from_json(const nlohmann::json& j);

/// `{direction, slope, intercept, r_squared, min_duty}`
nlohmann::json to_json(const CalibrationCurve& curve);
CalibrationCurve curve_from_json(const nlohmann::json& j);

/// A calibration file holds one curve object or an array of curves. A single
/// curve serves both directions.
CalibrationPair calibration_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StepResponseMetrics& m);
nlohmann::json to_json(const SimMetrics& m);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace hapstep
