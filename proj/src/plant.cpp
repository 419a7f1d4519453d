#include "hapstep/plant.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace hapstep {

namespace {

bool same_metrics(const SimMetrics& a, const SimMetrics& b) {
    auto same_step = [](const StepImpulse& x, const StepImpulse& y) {
        return x.t_start == y.t_start && x.commanded_brake == y.commanded_brake &&
               x.commanded_drive == y.commanded_drive && x.achieved_brake == y.achieved_brake &&
               x.achieved_drive == y.achieved_drive && x.sign_split_brake == y.sign_split_brake &&
               x.sign_split_drive == y.sign_split_drive && x.net == y.net;
    };
    auto same_response = [](const std::optional<StepResponseMetrics>& x, const std::optional<StepResponseMetrics>& y) {
        if (x.has_value() != y.has_value()) return false;
        if (!x) return true;
        return x->rise_s == y->rise_s && x->fall_s == y->fall_s && x->transition_s == y->transition_s &&
               x->rise_10_90_s == y->rise_10_90_s && x->forward_rise_s == y->forward_rise_s &&
               x->forward_rise_10_90_s == y->forward_rise_10_90_s;
    };
    return a.rise_s == b.rise_s && a.per_region_impulse_error == b.per_region_impulse_error &&
           a.sign_split_impulse_error == b.sign_split_impulse_error &&
           a.net_impulse == b.net_impulse && a.net_impulse_ratio == b.net_impulse_ratio &&
           std::equal(a.steps.begin(), a.steps.end(), b.steps.begin(), b.steps.end(), same_step) &&
           same_response(a.step_response, b.step_response);
}

std::vector<CommandSample> as_samples(std::span<const ActuatorCommand> commands) {
    std::vector<CommandSample> out(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) out[i] = {commands[i].t, commands[i].signed_duty};
    return out;
}

} // namespace

bool operator==(const SimRun& a, const SimRun& b) {
    return a.commands == b.commands && a.force == b.force && same_metrics(a.metrics, b.metrics);
}

void validate(const PlateModel& model) {
    if (!(model.tau_s > 0.0)) throw Error(ErrorKind::Config, "plate tau_s must be positive");
    if (!(model.max_force_n > 0.0)) throw Error(ErrorKind::Config, "plate max_force must be positive");
    validate(model.curves.forward);
    validate(model.curves.backward);
}

double plate_target(const PlateModel& model, double signed_duty) {
    if (signed_duty == 0.0) return 0.0;
    const auto& curve = signed_duty > 0.0 ? model.curves.forward : model.curves.backward;
    const double mag = std::abs(signed_duty);
    if (mag < curve.min_duty) return 0.0;
    const double force = std::max(0.0, duty_to_force(curve, mag));
    return signed_duty > 0.0 ? force : -force;
}

double step_plate(PlateModel& model, double signed_duty, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::Config, "plate step dt must be positive");
    const double target = plate_target(model, signed_duty);
    model.state_force_n += (target - model.state_force_n) * (1.0 - std::exp(-dt / model.tau_s));
    model.state_force_n = std::clamp(model.state_force_n, -model.max_force_n, model.max_force_n);
    return model.state_force_n;
}

SimRun run_closed_loop(const SpeedProfileTable& table, const CalibrationPair& curves, std::span<const GaitEvent> events,
                       PlateModel model, const SimOptions& options) {
    validate(model);
    const double dt = 1.0 / kTickRateHz;
    Renderer renderer(table, curves);
    for (const auto& ev : events) renderer.on_event(ev);

    SimRun run;
    // Shadow plates see only one sign of the command each.
    PlateModel brake_plate = model;
    PlateModel drive_plate = model;
    brake_plate.state_force_n = drive_plate.state_force_n = 0.0;
    std::vector<double> brake_force, drive_force;
    const auto tail = static_cast<std::int64_t>(std::llround(options.tail_s * kTickRateHz));
    std::int64_t idle_ticks = 0;
    for (std::int64_t k = 0; idle_ticks <= tail; ++k) {
        const ActuatorCommand cmd = renderer.tick_at(k);
        run.commands.push_back(cmd);
        run.force.push_back(step_plate(model, cmd.signed_duty, dt));
        brake_force.push_back(step_plate(brake_plate, std::min(cmd.signed_duty, 0.0), dt));
        drive_force.push_back(step_plate(drive_plate, std::max(cmd.signed_duty, 0.0), dt));
        idle_ticks = renderer.idle() ? idle_ticks + 1 : 0;
    }

    const auto& applied = renderer.applied_events();
    const auto n = static_cast<std::int64_t>(run.force.size());
    auto& m = run.metrics;
    // Window [begin, end) integrated from the sample before it, so windows tile the log.
    auto window = [&](const std::vector<double>& v, std::int64_t begin, std::int64_t end) {
        std::vector<double> w(v.begin() + (begin > 0 ? begin - 1 : 0), v.begin() + end);
        if (begin == 0) w.insert(w.begin(), 0.0);
        return w;
    };
    auto worst_error = [](const StepImpulse& st, double brake, double drive) {
        return std::max(std::abs(brake - st.commanded_brake) / st.commanded_brake,
                        std::abs(drive - st.commanded_drive) / st.commanded_drive);
    };
    for (std::size_t s = 0; s < applied.size(); ++s) {
        const std::int64_t begin = applied[s].tick;
        const std::int64_t end = s + 1 < applied.size() ? applied[s + 1].tick : n;
        const auto f = window(run.force, begin, end);
        std::vector<double> neg(f.size()), pos(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            neg[i] = std::max(-f[i], 0.0);
            pos[i] = std::max(f[i], 0.0);
        }
        StepImpulse st;
        st.t_start = tick_time(begin);
        st.commanded_brake = applied[s].profile.brake.area();
        st.commanded_drive = applied[s].profile.drive.area();
        st.achieved_brake = -trapezoid(window(brake_force, begin, end), dt);
        st.achieved_drive = trapezoid(window(drive_force, begin, end), dt);
        st.sign_split_brake = trapezoid(neg, dt);
        st.sign_split_drive = trapezoid(pos, dt);
        st.net = trapezoid(f, dt);
        m.per_region_impulse_error =
            std::max(m.per_region_impulse_error, worst_error(st, st.achieved_brake, st.achieved_drive));
        m.sign_split_impulse_error =
            std::max(m.sign_split_impulse_error, worst_error(st, st.sign_split_brake, st.sign_split_drive));
        m.net_impulse = std::max(m.net_impulse, std::abs(st.net));
        m.net_impulse_ratio =
            std::max(m.net_impulse_ratio, std::abs(st.net) / std::max(st.commanded_brake, st.commanded_drive));
        m.steps.push_back(st);
    }

    if (!applied.empty()) {
        const auto begin = static_cast<std::size_t>(applied[0].tick);
        const auto end = applied.size() > 1 ? static_cast<std::size_t>(applied[1].tick) : run.force.size();
        std::span<const ActuatorCommand> cmds(run.commands.data() + begin, end - begin);
        FrictionProfile measured;
        measured.sample_rate_hz = kTickRateHz;
        measured.values.assign(run.force.begin() + static_cast<std::ptrdiff_t>(begin),
                               run.force.begin() + static_cast<std::ptrdiff_t>(end));
        try {
            auto samples = as_samples(cmds);
            m.rise_s = analyze_step_response(samples, measured).rise_s;
        } catch (const Error&) {
            // Clamped or truncated envelopes may lack a clean edge pair.
        }
    }
    return run;
}

std::vector<ActuatorCommand> step_test_commands(const StepTestPattern& p) {
    if (!(p.duty > 0.0) || p.duty > 1.0) throw Error(ErrorKind::Config, "step test duty must lie in (0, 1]");
    auto ticks = [](double s) { return static_cast<std::int64_t>(std::llround(s * kTickRateHz)); };
    const std::int64_t lead = ticks(p.lead_s), hold = ticks(p.hold_s), gap = ticks(p.gap_s), tail = ticks(p.tail_s);
    if (hold <= 0 || lead < 0 || gap <= 0 || tail <= 0) throw Error(ErrorKind::Config, "step test durations invalid");

    std::vector<ActuatorCommand> out;
    std::int64_t k = 0;
    auto emit = [&](std::int64_t count, double duty) {
        for (std::int64_t i = 0; i < count; ++i, ++k) out.push_back({tick_time(k), duty});
    };
    emit(lead, 0.0);
    emit(hold, -p.duty);
    emit(gap, 0.0);
    emit(hold, p.duty);
    emit(tail, 0.0);
    return out;
}

SimRun run_step_response_test(PlateModel model, const StepTestPattern& pattern, const StepResponseOptions& analysis) {
    validate(model);
    SimRun run;
    run.commands = step_test_commands(pattern);
    const double dt = 1.0 / kTickRateHz;
    for (const auto& c : run.commands) run.force.push_back(step_plate(model, c.signed_duty, dt));

    FrictionProfile measured;
    measured.sample_rate_hz = kTickRateHz;
    measured.values = run.force;
    auto samples = as_samples(run.commands);
    run.metrics.step_response = analyze_step_response(samples, measured, analysis);
    run.metrics.rise_s = run.metrics.step_response->rise_s;
    return run;
}

} // namespace hapstep
