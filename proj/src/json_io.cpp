#include "hapstep/json_io.hpp"

#include "hapstep/error.hpp"

#include <fstream>

namespace hapstep {

namespace {

using nlohmann::json;

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, std::string("invalid ") + what + ": " + e.what());
    }
}

json region_json(const TriangleRegion& r) {
    return {{"t_onset", r.t_onset}, {"t_peak", r.t_peak}, {"t_offset", r.t_offset}, {"f_peak", r.f_peak}};
}

TriangleRegion region_from(const json& j) {
    return {j.at("t_onset").get<double>(), j.at("t_peak").get<double>(), j.at("t_offset").get<double>(),
            j.at("f_peak").get<double>()};
}

} // namespace

json to_json(std::span<const PhaseAnnotation> annotations) {
    json out = json::array();
    for (const auto& a : annotations) {
        out.push_back({{"step_index", a.step_index},
                       {"t_start", a.phases.t_start},
                       {"t_step1_peak", a.phases.t_step1_peak},
                       {"t_step2_present", a.phases.t_step2_present},
                       {"t_step3_peak", a.phases.t_step3_peak},
                       {"t_step4_start", a.phases.t_step4_start},
                       {"t_end", a.phases.t_end}});
    }
    return out;
}

std::vector<PhaseAnnotation> phases_from_json(const json& j) {
    return guarded("phase sidecar", [&] {
        std::vector<PhaseAnnotation> out;
        for (const auto& e : j) {
            PhaseAnnotation a;
            a.step_index = e.at("step_index").get<int>();
            a.phases.t_start = e.at("t_start").get<double>();
            a.phases.t_step1_peak = e.at("t_step1_peak").get<double>();
            a.phases.t_step2_present = e.at("t_step2_present").get<bool>();
            a.phases.t_step3_peak = e.at("t_step3_peak").get<double>();
            a.phases.t_step4_start = e.at("t_step4_start").get<double>();
            a.phases.t_end = e.at("t_end").get<double>();
            out.push_back(a);
        }
        return out;
    });
}

json to_json(const SpeedProfileTable& table) {
    json entries = json::array();
    for (const auto& e : table.entries) {
        entries.push_back({{"speed_kmh", e.speed_kmh},
                           {"duration_s", e.duration_s},
                           {"brake", region_json(e.brake)},
                           {"drive", region_json(e.drive)}});
    }
    return {{"device_scale", table.device_scale}, {"entries", entries}};
}

SpeedProfileTable table_from_json(const json& j) {
    auto table = guarded("profile table", [&] {
        SpeedProfileTable t;
        t.device_scale = j.at("device_scale").get<double>();
        for (const auto& e : j.at("entries")) {
            TriangularProfile p;
            p.speed_kmh = e.at("speed_kmh").get<double>();
            p.duration_s = e.at("duration_s").get<double>();
            p.brake = region_from(e.at("brake"));
            p.drive = region_from(e.at("drive"));
            t.entries.push_back(p);
        }
        return t;
    });
    validate(table);
    return table;
}

json to_json(const CalibrationCurve& c) {
    return {{"direction", std::string(to_string(c.direction))},
            {"slope", c.slope},
            {"intercept", c.intercept},
            {"r_squared", c.r_squared},
            {"min_duty", c.min_duty}};
}

CalibrationCurve curve_from_json(const json& j) {
    auto c = guarded("calibration curve", [&] {
        CalibrationCurve c;
        c.direction = parse_direction(j.at("direction").get<std::string>());
        c.slope = j.at("slope").get<double>();
        c.intercept = j.at("intercept").get<double>();
        c.r_squared = j.value("r_squared", 1.0);
        c.min_duty = j.value("min_duty", kDefaultMinDuty);
        return c;
    });
    validate(c);
    return c;
}

CalibrationPair calibration_from_json(const json& j) {
    if (j.is_object()) {
        CalibrationCurve c = curve_from_json(j);
        CalibrationPair pair{c, c};
        pair.forward.direction = Direction::Forward;
        pair.backward.direction = Direction::Backward;
        return pair;
    }
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::Format, "calibration must be a curve or a list of curves");
    std::optional<CalibrationCurve> fwd, back;
    for (const auto& e : j) {
        CalibrationCurve c = curve_from_json(e);
        auto& slot = c.direction == Direction::Forward ? fwd : back;
        if (slot) throw Error(ErrorKind::Format, "duplicate " + std::string(to_string(c.direction)) + " curve");
        slot = c;
    }
    if (!fwd || !back) {
        CalibrationCurve c = fwd ? *fwd : *back;
        if (!fwd) fwd = c, fwd->direction = Direction::Forward;
        if (!back) back = c, back->direction = Direction::Backward;
    }
    return {*fwd, *back};
}

json to_json(const StepResponseMetrics& m) {
    return {{"rise_s", m.rise_s},
            {"fall_s", m.fall_s},
            {"transition_s", m.transition_s},
            {"rise_10_90_s", m.rise_10_90_s},
            {"forward_rise_s", m.forward_rise_s},
            {"forward_rise_10_90_s", m.forward_rise_10_90_s}};
}

json to_json(const SimMetrics& m) {
    json steps = json::array();
    for (const auto& s : m.steps) {
        steps.push_back({{"t_start", s.t_start},
                         {"commanded_brake", s.commanded_brake},
                         {"commanded_drive", s.commanded_drive},
                         {"achieved_brake", s.achieved_brake},
                         {"achieved_drive", s.achieved_drive},
                         {"sign_split_brake", s.sign_split_brake},
                         {"sign_split_drive", s.sign_split_drive},
                         {"net", s.net}});
    }
    json out = {{"rise_s", m.rise_s ? json(*m.rise_s) : json(nullptr)},
                {"per_region_impulse_error", m.per_region_impulse_error},
                {"sign_split_impulse_error", m.sign_split_impulse_error},
                {"net_impulse", m.net_impulse},
                {"net_impulse_ratio", m.net_impulse_ratio},
                {"steps", steps}};
    if (m.step_response) out["step_response"] = to_json(*m.step_response);
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace hapstep
