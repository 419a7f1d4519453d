#pragma once

#include "hapstep/renderer.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace hapstep {

/// `{"t":<s>,"foot":"L|R","kind":"grounded","speed_kmh":<f>}`
GaitEvent parse_event_line(std::string_view line);
std::string to_ndjson(const GaitEvent& event);
std::vector<GaitEvent> read_events(std::istream& in);

/// Ordered hand-off from an intake thread to the ticking thread. Pushing
/// never waits on the consumer.
class EventChannel {
public:
    void push(const GaitEvent& event);
    void close();
    /// Moves everything queued so far into `out`; returns false once closed and empty.
    bool drain(std::vector<GaitEvent>& out);
    /// Blocks until an event later than `t` has been pushed or the channel closes.
    void wait_past(double t);

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<GaitEvent> queue_;
    double watermark_ = -1.0;
    bool closed_ = false;
};

/// Pulls one line at a time; returns false at end of stream.
using LineSource = std::function<bool(std::string&)>;

LineSource istream_lines(std::istream& in);

enum class ClockMode {
    /// Ticks as fast as possible but never past the newest delivered event,
    /// so the output matches render_offline exactly.
    Replay,
    /// Ticks paced by the steady clock; late events play from the next tick.
    Wall,
};

struct LiveOptions {
    ClockMode clock = ClockMode::Replay;
};

using CommandSink = std::function<void(const ActuatorCommand&)>;

/// Runs the intake (reads `source` on its own thread) and the ticking loop
/// (on the caller's thread) until the source ends and the renderer is idle.
void run_live(const LineSource& source, Renderer& renderer, const CommandSink& sink, const LiveOptions& options = {});

/// Single-client TCP listener delivering NDJSON lines.
class TcpLineServer {
public:
    /// Port 0 picks a free port.
    explicit TcpLineServer(std::uint16_t port, const std::string& bind_address = "127.0.0.1");
    ~TcpLineServer();
    TcpLineServer(const TcpLineServer&) = delete;
    TcpLineServer& operator=(const TcpLineServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Blocks for one client; the source reads lines until it disconnects.
    LineSource accept();

private:
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace hapstep
