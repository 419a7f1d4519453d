#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"
#include "hapstep/segmentation.hpp"
#include "hapstep/synth.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <cstdlib>

using namespace hapstep;

namespace {

ForceTrace blank(std::size_t n, double rate = 1000.0) {
    ForceTrace t;
    t.sample_rate_hz = rate;
    t.samples.resize(n);
    return t;
}

StepSegment as_segment(ForceTrace t) {
    StepSegment s;
    s.trace = std::move(t);
    s.index_in_walk = 1;
    return s;
}

// Heel brake triangle [0.00, 0.20] apex 0.08 at -1 N, thenar drive triangle
// [0.20, 0.60] apex 0.40 at +1 N, thenar spike from 0.60 to 0.70 at -5 N.
StepSegment constructed_step() {
    auto t = blank(700);
    for (std::size_t i = 0; i < 700; ++i) {
        const double s = static_cast<double>(i) / 1000.0;
        t.samples[i].heel_y = oracle::triangle_at(s, 0.0, 0.08, 0.20, -1.0);
        t.samples[i].thenar_y = oracle::triangle_at(s, 0.20, 0.40, 0.60, 1.0) + oracle::triangle_at(s, 0.60, 0.65, 0.70, -5.0);
    }
    return as_segment(t);
}

} // namespace

TEST_CASE("quiet traces yield no steps") {
    CHECK(segment_steps(blank(2000)).empty());
    auto t = blank(2000);
    for (std::size_t i = 500; i < 900; ++i) t.samples[i].heel_y = 0.25; // below onset
    CHECK(segment_steps(t).empty());
}

TEST_CASE("configuration is validated") {
    SegmentationConfig bad;
    bad.onset_threshold_n = 0.0;
    CHECK_THROWS_AS(segment_steps(blank(10), bad), Error);
    bad = {};
    bad.release_threshold_n = 0.5;
    try {
        segment_steps(blank(10), bad);
        FAIL("accepted release >= onset");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("short blips are discarded") {
    auto t = blank(3000);
    for (std::size_t i = 1000; i < 1150; ++i) t.samples[i].thenar_y = 1.0; // 0.15 s < 0.2 s
    CHECK(segment_steps(t).empty());
}

TEST_CASE("a short dip does not split a step") {
    auto t = blank(3000);
    for (std::size_t i = 1000; i < 1600; ++i) t.samples[i].thenar_y = 1.0;
    for (std::size_t i = 1300; i < 1330; ++i) t.samples[i].thenar_y = 0.0; // 30 ms < release hold
    const auto steps = segment_steps(t);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].first_sample == 1000);
    CHECK(steps[0].end_sample() == 1600);
}

TEST_CASE("synthetic walks: 30 boundaries within two samples") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        for (double v : {1.0, 2.5, 4.0}) {
            synth::WalkSpec spec;
            spec.speed_kmh = v;
            spec.seed = seed;
            const auto walk = synth::make_walk(spec);
            const auto steps = segment_steps(walk.trace);
            REQUIRE(steps.size() == 30);
            for (std::size_t i = 0; i < steps.size(); ++i) {
                CHECK(std::llabs(static_cast<long long>(steps[i].first_sample) -
                                 static_cast<long long>(walk.truth[i].first)) <= 2);
                CHECK(std::llabs(static_cast<long long>(steps[i].end_sample()) -
                                 static_cast<long long>(walk.truth[i].second)) <= 2);
                CHECK(steps[i].index_in_walk == static_cast<int>(i) + 1);
                if (i > 0) CHECK(steps[i].first_sample >= steps[i - 1].end_sample());
            }
        }
    }
}

TEST_CASE("re-segmenting an isolated step returns it unchanged") {
    synth::WalkSpec spec;
    spec.seed = 4;
    const auto steps = segment_steps(synth::make_walk(spec).trace);
    for (const auto& s : steps) {
        const auto again = segment_steps(s.trace);
        REQUIRE(again.size() == 1);
        CHECK(again[0].first_sample == 0);
        CHECK(again[0].trace == s.trace);
    }
}

TEST_CASE("select_middle keeps the middle ten") {
    synth::WalkSpec spec;
    const auto steps = segment_steps(synth::make_walk(spec).trace);
    const auto mid = select_middle(steps);
    REQUIRE(mid.size() == 10);
    CHECK(mid.front().index_in_walk == 4);
    CHECK(mid.back().index_in_walk == 13);

    std::vector<StepSegment> thirteen(steps.begin(), steps.begin() + 13);
    CHECK(select_middle(thirteen).size() == 10);

    std::vector<StepSegment> nine(steps.begin(), steps.begin() + 9);
    try {
        select_middle(nine);
        FAIL("nine steps accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientSteps);
        CHECK(std::string(e.what()).find("short by 4") != std::string::npos);
    }
    CHECK_THROWS_AS(select_middle(steps, 5, 4), Error);
    CHECK_THROWS_AS(select_middle(steps, 0, 4), Error);
}

TEST_CASE("phases of a constructed step") {
    const auto p = detect_phases(constructed_step());
    CHECK(p.t_start == 0.0);
    CHECK(p.t_step1_peak == doctest::Approx(0.08));
    CHECK(p.t_step3_peak == doctest::Approx(0.40));
    CHECK(p.t_step4_start == doctest::Approx(0.60).epsilon(0.002));
    CHECK(p.t_end == doctest::Approx(0.70));
    CHECK_FALSE(p.t_step2_present);
}

TEST_CASE("overlapping heel and thenar drive marks Step-2") {
    auto seg = constructed_step();
    for (std::size_t i = 250; i < 300; ++i) seg.trace.samples[i].heel_y = 0.3; // 50 ms plateau
    CHECK(detect_phases(seg).t_step2_present);
    for (std::size_t i = 250; i < 300; ++i) seg.trace.samples[i].heel_y = i < 258 ? 0.3 : 0.0; // 8 ms
    CHECK_FALSE(detect_phases(seg).t_step2_present);
}

TEST_CASE("steps without a brake or drive region are rejected") {
    auto pos = blank(400);
    for (auto& s : pos.samples) s.thenar_y = 1.0;
    CHECK_THROWS_AS(detect_phases(as_segment(pos)), Error);

    auto neg = blank(400);
    for (auto& s : neg.samples) s.heel_y = -1.0;
    try {
        detect_phases(as_segment(neg));
        FAIL("brake-only step accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PhaseDetection);
    }
    CHECK_THROWS_AS(detect_phases(as_segment(blank(0))), Error);
}

TEST_CASE("synthetic steps: phases match the generator") {
    synth::WalkSpec spec;
    spec.speed_kmh = 2.5;
    spec.noise_n = 0.0;
    spec.seed = 9;
    const auto walk = synth::make_walk(spec);
    const auto steps = segment_steps(walk.trace);
    REQUIRE(steps.size() == walk.shapes.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto p = detect_phases(steps[i]);
        const auto& s = walk.shapes[i];
        const double offset = walk.origins_s[i] - static_cast<double>(steps[i].first_sample) / 1000.0;
        // Step-4 starts where the thenar drive hands over to the spike.
        CHECK(p.t_step4_start == doctest::Approx(s.thenar_drive_end + offset).epsilon(0.01));
        CHECK(p.t_step1_peak < p.t_step3_peak);
        CHECK(p.t_step3_peak <= p.t_step4_start);
    }
}

TEST_CASE("combined channel sums the sites and drops Step-4") {
    auto t = blank(500);
    for (auto& s : t.samples) {
        s.thenar_y = 1.0;
        s.heel_y = 0.5;
    }
    PhaseTimings ph;
    ph.t_step4_start = 0.3;
    const auto prof = combine_channels(as_segment(t), ph);
    CHECK(prof.size() == 300);
    for (double v : prof.values) CHECK(v == 1.5);

    const auto seg = constructed_step();
    const auto phases = detect_phases(seg);
    const auto c = combine_channels(seg, phases);
    double min_kept = 0.0;
    for (double v : c.values) min_kept = std::min(min_kept, v);
    CHECK(min_kept >= -1.0); // nothing from the -5 N spike

    std::vector<double> th, he;
    for (std::size_t i = 0; i < c.size(); ++i) {
        th.push_back(seg.trace.samples[i].thenar_y);
        he.push_back(seg.trace.samples[i].heel_y);
    }
    const double dt = 1e-3;
    CHECK(trapezoid(c.values, dt) == doctest::Approx(trapezoid(th, dt) + trapezoid(he, dt)).epsilon(1e-9));
}
