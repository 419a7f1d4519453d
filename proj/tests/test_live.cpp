#include "hapstep/error.hpp"
#include "hapstep/live.hpp"

#include "doctest.h"
#include "tables.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <sstream>
#include <thread>

using namespace hapstep;

namespace {

std::vector<GaitEvent> mixed_events(double seconds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<GaitEvent> ev;
    double t = 0.05;
    int n = 0;
    while (t < seconds) {
        // Millisecond timestamps, some deliberately off-grid.
        const double stamp = n % 3 == 0 ? t + 0.0004 : t;
        ev.push_back({stamp, n++ % 2 ? Foot::Right : Foot::Left, 0.5 + 4.0 * u(rng)});
        t += std::round((0.25 + 0.9 * u(rng)) * 1000.0) / 1000.0;
    }
    return ev;
}

std::string ndjson(const std::vector<GaitEvent>& events) {
    std::string s;
    for (const auto& e : events) s += to_ndjson(e) + "\n";
    return s;
}

std::vector<ActuatorCommand> live(const LineSource& source, const LiveOptions& opt = {}) {
    Renderer r(fixture::knot_table(), fixture::realistic());
    std::vector<ActuatorCommand> out;
    run_live(source, r, [&](const ActuatorCommand& c) { out.push_back(c); }, opt);
    return out;
}

} // namespace

TEST_CASE("event lines parse and print") {
    const auto e = parse_event_line(R"({"t":1.25,"foot":"R","kind":"grounded","speed_kmh":2.5})");
    CHECK(e.t == 1.25);
    CHECK(e.foot == Foot::Right);
    CHECK(e.speed_kmh == 2.5);
    CHECK(parse_event_line(to_ndjson(e)) == e);
    CHECK(parse_event_line(R"({"t":0,"foot":"L","speed_kmh":1})").foot == Foot::Left);

    auto kind = [](std::string_view line) {
        try {
            parse_event_line(line);
        } catch (const Error& err) {
            return err.kind();
        }
        return ErrorKind::Io;
    };
    CHECK(kind("{not json") == ErrorKind::Parse);
    CHECK(kind(R"({"t":0,"foot":"X","speed_kmh":1})") == ErrorKind::Format);
    CHECK(kind(R"({"t":0,"foot":"L","kind":"lifted","speed_kmh":1})") == ErrorKind::Format);
    CHECK(kind(R"({"t":0,"foot":"L"})") == ErrorKind::Format);
    CHECK(kind(R"({"t":0,"foot":"L","speed_kmh":-1})") == ErrorKind::Format);
}

TEST_CASE("read_events reports the failing line") {
    std::istringstream in(ndjson(mixed_events(2.0, 1)) + "\n{bad\n");
    try {
        read_events(in);
        FAIL("accepted a bad line");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line ") == 0);
    }
}

TEST_CASE("channel hand-off") {
    EventChannel ch;
    std::thread producer([&] {
        for (int i = 1; i <= 5; ++i) ch.push({i * 0.1, Foot::Left, 1.0});
        ch.close();
    });
    ch.wait_past(0.45);
    producer.join();
    std::vector<GaitEvent> got;
    CHECK_FALSE(ch.drain(got));
    CHECK(got.size() == 5);
    CHECK(got.back().t == 0.5);
}

TEST_CASE("replay through a stream matches offline rendering") {
    const auto events = mixed_events(20.0, 7);
    const auto offline = render_offline(events, fixture::knot_table(), fixture::realistic());
    std::istringstream in(ndjson(events));
    CHECK(live(istream_lines(in)) == offline);
}

TEST_CASE("replay with a slow producer still matches") {
    const auto events = mixed_events(4.0, 9);
    const auto offline = render_offline(events, fixture::knot_table(), fixture::realistic());
    std::istringstream in(ndjson(events));
    auto slow = [&in](std::string& line) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        return static_cast<bool>(std::getline(in, line));
    };
    CHECK(live(slow) == offline);
}

TEST_CASE("replay over TCP matches offline rendering") {
    const auto events = mixed_events(10.0, 11);
    const auto offline = render_offline(events, fixture::knot_table(), fixture::realistic());
    TcpLineServer server(0);
    REQUIRE(server.port() != 0);
    const std::string payload = ndjson(events);
    std::thread client([&] {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(server.port());
        ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
        // Uneven chunks so lines straddle reads.
        for (std::size_t off = 0; off < payload.size(); off += 37) {
            const auto n = std::min<std::size_t>(37, payload.size() - off);
            ::send(fd, payload.data() + off, n, 0);
        }
        ::close(fd);
    });
    const auto got = live(server.accept());
    client.join();
    CHECK(got == offline);
}

TEST_CASE("bad bind address is a config error") {
    try {
        TcpLineServer s(0, "not-an-address");
        FAIL("bound to garbage");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("wall clock plays events no earlier than their time") {
    const std::vector<GaitEvent> events{{0.020, Foot::Left, 1.0}, {0.150, Foot::Right, 4.0}};
    std::istringstream in(ndjson(events));
    Renderer r(fixture::knot_table(), fixture::realistic());
    std::size_t ticks = 0;
    const auto start = std::chrono::steady_clock::now();
    run_live(istream_lines(in), r, [&](const ActuatorCommand&) { ++ticks; }, {ClockMode::Wall});
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(r.applied_events().size() == 2);
    CHECK(r.applied_events()[0].tick >= 20);
    CHECK(r.applied_events()[1].tick >= 150);
    CHECK(ticks >= 150 + 510);
    CHECK(elapsed >= 0.6); // paced, not free-running
}

TEST_CASE("a malformed line aborts the session with its error") {
    std::istringstream in(ndjson(mixed_events(1.0, 3)) + "{\"t\":\"soon\",\"foot\":\"L\",\"speed_kmh\":1}\n");
    try {
        live(istream_lines(in));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
    }
}

TEST_CASE("out-of-order events are clock errors") {
    std::istringstream in(ndjson({{0.5, Foot::Left, 1.0}, {0.2, Foot::Left, 1.0}}));
    try {
        live(istream_lines(in));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Clock);
    }
}
