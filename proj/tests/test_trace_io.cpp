#include "hapstep/error.hpp"
#include "hapstep/synth.hpp"
#include "hapstep/trace_io.hpp"

#include "doctest.h"

#include <cstring>
#include <sstream>

using namespace hapstep;

namespace {

ForceTrace load(const std::string& text) {
    std::istringstream in(text);
    return load_trace(in);
}

ErrorKind load_error(const std::string& text) {
    try {
        load(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("three rows at 1000 Hz") {
    const auto t = load("# rate_hz=1000 speed_kmh=2.5 participant=P7\n"
                        "t,thenar_y,heel_y\n0,0.1,0.2\n0.001,0.3,0.4\n0.002,0.5,0.6\n");
    CHECK(t.size() == 3);
    CHECK(t.sample_rate_hz == 1000.0);
    CHECK(t.meta.walking_speed_kmh == 2.5);
    CHECK(t.meta.participant_id == "P7");
    CHECK_FALSE(t.has_vertical);
}

TEST_CASE("sensor frame is negated into the sole frame") {
    const auto t = load("# rate_hz=1000\nthenar_y,heel_y,thenar_z,heel_z\n-0.5,1.0,2.0,-3.0\n");
    CHECK(t.samples[0].heel_y == -1.0);
    CHECK(t.samples[0].thenar_y == 0.5);
    CHECK(t.samples[0].thenar_z == -2.0);
    CHECK(t.samples[0].heel_z == 3.0);
    CHECK(t.has_vertical);
}

TEST_CASE("rate is inferred from the time column") {
    const auto t = load("t,thenar_y,heel_y\n0,0,0\n0.002,0,0\n0.004,0,0\n");
    CHECK(t.sample_rate_hz == doctest::Approx(500.0));
}

TEST_CASE("writer then loader reproduces a synthetic walk bit for bit") {
    synth::WalkSpec spec;
    spec.steps = 16;
    spec.participant = "P3";
    auto walk = synth::make_walk(spec);
    walk.trace.has_vertical = true;
    for (auto& s : walk.trace.samples) {
        s.thenar_z = s.thenar_y * 3.7 + 1e-17;
        s.heel_z = -s.heel_y / 3.0;
    }
    std::stringstream io;
    write_trace(io, walk.trace);
    const auto back = load_trace(io);
    REQUIRE(back.size() == walk.trace.size());
    CHECK(back.meta == walk.trace.meta);
    CHECK(back.sample_rate_hz == walk.trace.sample_rate_hz);
    bool exact = true;
    for (std::size_t i = 0; i < back.size(); ++i) {
        const auto& a = back.samples[i];
        const auto& b = walk.trace.samples[i];
        exact = exact && bit_equal(a.thenar_y, b.thenar_y) && bit_equal(a.heel_y, b.heel_y) &&
                bit_equal(a.thenar_z, b.thenar_z) && bit_equal(a.heel_z, b.heel_z);
    }
    CHECK(exact);
}

TEST_CASE("malformed input is rejected with the right kind") {
    CHECK(load_error("# rate_hz=1000\nthenar_y,heel_y\n1,x\n") == ErrorKind::Parse);
    CHECK(load_error("# rate_hz=1000\nthenar_y,heel_y\n1\n") == ErrorKind::Parse);
    CHECK(load_error("# rate_hz=1000\nthenar_y,heel_y\n1,nan\n") == ErrorKind::Parse);
    CHECK(load_error("") == ErrorKind::EmptyInput);
    CHECK(load_error("# rate_hz=1000\nthenar_y,heel_y\n") == ErrorKind::EmptyInput);
    CHECK(load_error("thenar_y,heel_y\n1,2\n") == ErrorKind::Format); // no rate anywhere
    CHECK(load_error("# rate_hz=1000\nheel_y,thenar_y\n1,2\n") == ErrorKind::Format);
    CHECK(load_error("# rate_hz=-5\nthenar_y,heel_y\n1,2\n") == ErrorKind::Format);
    // jitter beyond 1 % of the median spacing
    CHECK(load_error("t,thenar_y,heel_y\n0,0,0\n0.001,0,0\n0.0025,0,0\n0.0035,0,0\n") == ErrorKind::Format);
    // header disagrees with the time column
    CHECK(load_error("# rate_hz=500\nt,thenar_y,heel_y\n0,0,0\n0.001,0,0\n") == ErrorKind::Format);
}

TEST_CASE("parse errors name the line") {
    try {
        load("# rate_hz=1000\nthenar_y,heel_y\n1,2\n3,oops\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("writer refuses ids that would not reload") {
    ForceTrace t;
    t.samples.resize(2);
    t.meta.participant_id = "two words";
    std::ostringstream out;
    CHECK_THROWS_AS(write_trace(out, t), Error);
}

TEST_CASE("slice keeps rate and metadata") {
    ForceTrace t;
    t.sample_rate_hz = 200.0;
    t.meta.participant_id = "P1";
    for (int i = 0; i < 10; ++i) t.samples.push_back({double(i), 0, 0, 0});
    const auto s = t.slice(3, 4);
    CHECK(s.size() == 4);
    CHECK(s.samples.front().thenar_y == 3.0);
    CHECK(s.sample_rate_hz == 200.0);
    CHECK(s.meta.participant_id == "P1");
    CHECK(t.slice(8, 100).size() == 2);
}
