#include "hapstep/live.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include "json.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <istream>
#include <memory>
#include <thread>

namespace hapstep {

GaitEvent parse_event_line(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bad event JSON: ") + e.what());
    }
    try {
        GaitEvent ev;
        ev.t = j.at("t").get<double>();
        const auto foot = j.at("foot").get<std::string>();
        if (foot == "L") ev.foot = Foot::Left;
        else if (foot == "R") ev.foot = Foot::Right;
        else throw Error(ErrorKind::Format, "foot must be \"L\" or \"R\"");
        if (j.contains("kind") && j["kind"].get<std::string>() != "grounded")
            throw Error(ErrorKind::Format, "unsupported event kind " + j["kind"].dump());
        ev.speed_kmh = j.at("speed_kmh").get<double>();
        if (!std::isfinite(ev.t) || !std::isfinite(ev.speed_kmh) || ev.speed_kmh < 0.0)
            throw Error(ErrorKind::Format, "event time must be finite and speed non-negative");
        return ev;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("bad event fields: ") + e.what());
    }
}

std::string to_ndjson(const GaitEvent& event) {
    return "{\"t\":" + format_double(event.t) + ",\"foot\":\"" + (event.foot == Foot::Left ? "L" : "R") +
           "\",\"kind\":\"grounded\",\"speed_kmh\":" + format_double(event.speed_kmh) + "}";
}

std::vector<GaitEvent> read_events(std::istream& in) {
    std::vector<GaitEvent> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_event_line(line));
        } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void EventChannel::push(const GaitEvent& event) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(event);
        watermark_ = std::max(watermark_, event.t);
    }
    cv_.notify_all();
}

void EventChannel::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool EventChannel::drain(std::vector<GaitEvent>& out) {
    std::lock_guard lock(mutex_);
    while (!queue_.empty()) {
        out.push_back(queue_.front());
        queue_.pop_front();
    }
    return !closed_;
}

void EventChannel::wait_past(double t) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return closed_ || watermark_ > t; });
}

LineSource istream_lines(std::istream& in) {
    return [&in](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
}

void run_live(const LineSource& source, Renderer& renderer, const CommandSink& sink, const LiveOptions& options) {
    // Shared with the intake thread so it can outlive this frame if ticking fails.
    struct Intake {
        LineSource source;
        EventChannel channel;
        std::exception_ptr error;
    };
    auto state = std::make_shared<Intake>();
    state->source = source;

    std::thread intake([state] {
        try {
            std::string line;
            std::size_t line_no = 0;
            while (state->source(line)) {
                ++line_no;
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                try {
                    state->channel.push(parse_event_line(line));
                } catch (const Error& e) {
                    throw Error(e.kind(), "event line " + std::to_string(line_no) + ": " + e.what());
                }
            }
        } catch (...) {
            state->error = std::current_exception();
        }
        state->channel.close();
    });

    std::vector<GaitEvent> batch;
    try {
        const auto start = std::chrono::steady_clock::now();
        for (std::int64_t k = 0;; ++k) {
            const double now = tick_time(k);
            if (options.clock == ClockMode::Replay) {
                state->channel.wait_past(now);
            } else {
                std::this_thread::sleep_until(start + std::chrono::milliseconds(k));
            }
            batch.clear();
            const bool open = state->channel.drain(batch);
            for (auto ev : batch) {
                // Wall clock: an event that missed its tick plays from this one.
                if (options.clock == ClockMode::Wall) ev.t = std::max(ev.t, now);
                renderer.on_event(ev);
            }
            sink(renderer.tick_at(k));
            if (!open && renderer.idle()) break;
        }
    } catch (...) {
        intake.detach();
        throw;
    }
    intake.join();
    if (state->error) std::rethrow_exception(state->error);
}

TcpLineServer::TcpLineServer(std::uint16_t port, const std::string& bind_address) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(ErrorKind::Io, "socket: " + std::string(std::strerror(errno)));
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw Error(ErrorKind::Config, "invalid bind address " + bind_address);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listen_fd_, 1) < 0) {
        std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw Error(ErrorKind::Io, "cannot listen on " + bind_address + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpLineServer::~TcpLineServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

LineSource TcpLineServer::accept() {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) throw Error(ErrorKind::Io, "accept: " + std::string(std::strerror(errno)));

    struct Connection {
        int fd = -1;
        std::string buffer;
        bool eof = false;
        ~Connection() {
            if (fd >= 0) ::close(fd);
        }
    };
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    return [conn](std::string& line) {
        while (true) {
            auto nl = conn->buffer.find('\n');
            if (nl != std::string::npos) {
                line = conn->buffer.substr(0, nl);
                conn->buffer.erase(0, nl + 1);
                return true;
            }
            if (conn->eof) {
                if (conn->buffer.empty()) return false;
                line = std::move(conn->buffer);
                conn->buffer.clear();
                return true;
            }
            char chunk[4096];
            ssize_t got = ::recv(conn->fd, chunk, sizeof(chunk), 0);
            if (got <= 0) conn->eof = true;
            else conn->buffer.append(chunk, static_cast<std::size_t>(got));
        }
    };
}

} // namespace hapstep
