#include "hapstep/renderer.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hapstep {

namespace {

constexpr double kTickSlack = 1e-6;

} // namespace

Renderer::Renderer(SpeedProfileTable table, CalibrationPair curves) : table_(std::move(table)), curves_(curves) {
    validate(table_);
    validate(curves_.forward);
    validate(curves_.backward);
}

void Renderer::on_event(const GaitEvent& event) {
    if (!std::isfinite(event.t) || !std::isfinite(event.speed_kmh))
        throw Error(ErrorKind::Input, "gait event time and speed must be finite");
    if (last_tick_ && event.t < tick_time(*last_tick_))
        throw Error(ErrorKind::Clock, "event at " + format_double(event.t) + " s arrives after tick " +
                                          format_tick_time(tick_time(*last_tick_)));
    if (!pending_.empty() && event.t < pending_.back().t)
        throw Error(ErrorKind::Clock, "events out of order at " + format_double(event.t) + " s");
    pending_.push_back(event);
}

double Renderer::duty_at(const TriangularProfile& profile, double local_s) const {
    const double force = profile.force_at(local_s);
    if (force < 0.0) return -force_to_duty(curves_.backward, -force);
    if (force > 0.0) return force_to_duty(curves_.forward, force);
    return 0.0;
}

ActuatorCommand Renderer::tick(double t) {
    const auto k = static_cast<std::int64_t>(std::llround(t * kTickRateHz));
    if (!std::isfinite(t) || std::abs(t - tick_time(k)) > kTickSlack)
        throw Error(ErrorKind::Clock, "tick time " + format_double(t) + " is not on the 1 kHz grid");
    if (last_tick_ && k != *last_tick_ + 1)
        throw Error(ErrorKind::Clock, "tick " + format_tick_time(tick_time(k)) + " does not follow " +
                                          format_tick_time(tick_time(*last_tick_)));
    last_tick_ = k;
    const double now = tick_time(k);

    while (!pending_.empty() && pending_.front().t <= now) {
        const GaitEvent ev = pending_.front();
        pending_.pop_front();
        Envelope env{interpolate(table_, ev.speed_kmh), k};
        applied_.push_back({ev, k, env.profile});
        active_ = std::move(env);
    }

    ActuatorCommand cmd{now, 0.0};
    if (active_) {
        const double local = tick_time(k - active_->start_tick);
        if (local >= active_->profile.duration_s) {
            active_.reset();
        } else {
            cmd.signed_duty = duty_at(active_->profile, local);
        }
    }
    return cmd;
}

std::vector<ActuatorCommand> render_offline(std::span<const GaitEvent> events, const SpeedProfileTable& table,
                                            const CalibrationPair& curves) {
    Renderer renderer(table, curves);
    for (const auto& ev : events) renderer.on_event(ev);
    std::vector<ActuatorCommand> log;
    for (std::int64_t k = 0;; ++k) {
        log.push_back(renderer.tick_at(k));
        if (renderer.idle()) break;
    }
    return log;
}

std::vector<VibstepCommand> to_vibstep(std::span<const ActuatorCommand> envelope) {
    std::vector<VibstepCommand> out(envelope.size());
    for (std::size_t i = 0; i < envelope.size(); ++i) out[i].t = envelope[i].t;

    std::size_t i = 0;
    while (i < envelope.size()) {
        const double d = envelope[i].signed_duty;
        if (d == 0.0) {
            ++i;
            continue;
        }
        const bool brake = d < 0.0;
        std::size_t end = i;
        double height = 0.0;
        while (end < envelope.size() && (brake ? envelope[end].signed_duty < 0.0 : envelope[end].signed_duty > 0.0)) {
            height = std::max(height, std::abs(envelope[end].signed_duty));
            ++end;
        }
        for (std::size_t k = i; k < end; ++k) (brake ? out[k].heel_duty : out[k].thenar_duty) = height;
        i = end;
    }
    return out;
}

std::string format_tick_time(double t) {
    const auto ms = std::llround(t * 1000.0);
    const auto whole = ms / 1000;
    const auto frac = std::llabs(ms % 1000);
    std::string s = (ms < 0 && whole == 0 ? "-" : "") + std::to_string(whole) + ".";
    std::string f = std::to_string(frac);
    return s + std::string(3 - f.size(), '0') + f;
}

std::string format_command_row(const ActuatorCommand& c) {
    return format_tick_time(c.t) + ',' + format_double(c.signed_duty);
}

void write_command_log(std::ostream& out, std::span<const ActuatorCommand> commands) {
    out << kCommandLogHeader << '\n';
    for (const auto& c : commands) out << format_command_row(c) << '\n';
}

std::vector<ActuatorCommand> read_command_log(std::istream& in) {
    std::vector<ActuatorCommand> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != kCommandLogHeader) throw Error(ErrorKind::Format, "expected header t,signed_duty");
            header = true;
            continue;
        }
        auto comma = line.find(',');
        ActuatorCommand c;
        if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), c.t) ||
            !parse_double(std::string_view(line).substr(comma + 1), c.signed_duty) || !std::isfinite(c.signed_duty))
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed command row");
        out.push_back(c);
    }
    if (out.empty()) throw Error(ErrorKind::EmptyInput, "command log is empty");
    return out;
}

void write_vibstep_log(std::ostream& out, std::span<const VibstepCommand> commands) {
    out << "t,heel_duty,thenar_duty\n";
    for (const auto& c : commands)
        out << format_tick_time(c.t) << ',' << format_double(c.heel_duty) << ',' << format_double(c.thenar_duty) << '\n';
}

} // namespace hapstep
