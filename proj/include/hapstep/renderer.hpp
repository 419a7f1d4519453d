#pragma once

#include "hapstep/calibration.hpp"
#include "hapstep/profile.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hapstep {

inline constexpr double kTickRateHz = 1000.0;

enum class Foot { Left, Right };

/// Foot grounded at host time t (seconds since session start).
struct GaitEvent {
    double t = 0.0;
    Foot foot = Foot::Left;
    double speed_kmh = 0.0;

    friend bool operator==(const GaitEvent&, const GaitEvent&) = default;
};

/// Positive duty drives the forward-towing motor, negative the backward one.
struct ActuatorCommand {
    double t = 0.0;
    double signed_duty = 0.0;

    friend bool operator==(const ActuatorCommand&, const ActuatorCommand&) = default;
};

struct VibstepCommand {
    double t = 0.0;
    double heel_duty = 0.0;
    double thenar_duty = 0.0;

    friend bool operator==(const VibstepCommand&, const VibstepCommand&) = default;
};

/// Tick index -> seconds. Kept integral internally so replays are bit-exact.
inline double tick_time(std::int64_t tick) { return static_cast<double>(tick) / kTickRateHz; }

/// Event-driven 1 kHz envelope scheduler. A grounded foot fetches the
/// interpolated profile for its speed and plays it from the next tick;
/// a later event replaces whatever is still playing.
///
/// Not thread-safe: one ticking context owns the instance (see LiveSession
/// for the cross-thread hand-off).
class Renderer {
public:
    struct AppliedEvent {
        GaitEvent event;
        std::int64_t tick = 0;
        TriangularProfile profile;
    };

    Renderer(SpeedProfileTable table, CalibrationPair curves);

    /// Queues an event for the first tick at or after event.t.
    void on_event(const GaitEvent& event);

    /// Advances exactly one tick (1 ms after the previous call).
    ActuatorCommand tick(double t);

    /// Convenience for callers that count ticks.
    ActuatorCommand tick_at(std::int64_t k) { return tick(tick_time(k)); }

    bool idle() const { return !active_ && pending_.empty(); }
    bool has_pending() const { return !pending_.empty(); }
    std::optional<std::int64_t> last_tick() const { return last_tick_; }
    const std::vector<AppliedEvent>& applied_events() const { return applied_; }
    const SpeedProfileTable& table() const { return table_; }
    const CalibrationPair& curves() const { return curves_; }

    /// Signed duty for a profile at `local_s` seconds into its envelope.
    double duty_at(const TriangularProfile& profile, double local_s) const;

private:
    struct Envelope {
        TriangularProfile profile;
        std::int64_t start_tick = 0;
    };

    SpeedProfileTable table_;
    CalibrationPair curves_;
    std::deque<GaitEvent> pending_;
    std::optional<Envelope> active_;
    std::optional<std::int64_t> last_tick_;
    std::vector<AppliedEvent> applied_;
};

/// Renders an event log from t = 0 until every event has played out.
std::vector<ActuatorCommand> render_offline(std::span<const GaitEvent> events, const SpeedProfileTable& table,
                                            const CalibrationPair& curves);

/// Covers each sign region with a rectangle at its peak magnitude. Brake
/// (backward) regions go to the heel vibrator, drive regions to the thenar.
std::vector<VibstepCommand> to_vibstep(std::span<const ActuatorCommand> envelope);

inline constexpr std::string_view kCommandLogHeader = "t,signed_duty";

/// One command log row without the newline; lets live sinks stream rows.
std::string format_command_row(const ActuatorCommand& c);

/// `t,signed_duty`, one row per tick.
void write_command_log(std::ostream& out, std::span<const ActuatorCommand> commands);
std::vector<ActuatorCommand> read_command_log(std::istream& in);
/// `t,heel_duty,thenar_duty`, one row per tick.
void write_vibstep_log(std::ostream& out, std::span<const VibstepCommand> commands);

/// Fixed three-decimal tick timestamp.
std::string format_tick_time(double t);

} // namespace hapstep
