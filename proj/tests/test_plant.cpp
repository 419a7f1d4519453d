#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"
#include "hapstep/plant.hpp"

#include "doctest.h"
#include "oracles.hpp"
#include "tables.hpp"

#include <cmath>

using namespace hapstep;

namespace {

PlateModel plate(double tau = 0.05, CalibrationPair curves = fixture::clamp_free()) {
    PlateModel m;
    m.tau_s = tau;
    m.curves = curves;
    return m;
}

} // namespace

TEST_CASE("plate at rest stays at rest") {
    auto m = plate();
    for (int k = 0; k < 5000; ++k) CHECK(step_plate(m, 0.0, 1e-3) == 0.0);
}

TEST_CASE("constant duty settles within 1 % after 5 tau") {
    auto m = plate(0.05);
    double f = 0.0;
    for (int k = 0; k < 250; ++k) f = step_plate(m, 0.5, 1e-3);
    CHECK(f == doctest::Approx(2.0).epsilon(0.01));
    auto b = plate(0.05);
    for (int k = 0; k < 250; ++k) f = step_plate(b, -0.5, 1e-3);
    CHECK(f == doctest::Approx(-2.0).epsilon(0.01));
}

TEST_CASE("dead zone and force clamp") {
    auto m = plate(0.05, fixture::realistic());
    CHECK(plate_target(m, 0.2) == 0.0);
    CHECK(plate_target(m, -0.2) == 0.0);
    CHECK(plate_target(m, 0.5) == doctest::Approx(3.4 * 0.5 + 0.15));
    CHECK(plate_target(m, -0.5) == doctest::Approx(-(3.8 * 0.5 + 0.10)));

    auto strong = plate(0.001, fixture::clamp_free(50.0));
    strong.max_force_n = 10.0;
    for (int k = 0; k < 100; ++k) CHECK(std::abs(step_plate(strong, k % 40 < 20 ? 1.0 : -1.0, 1e-3)) <= 10.0);
    CHECK_THROWS_AS(step_plate(strong, 1.0, 0.0), Error);
}

TEST_CASE("plate validation") {
    auto m = plate();
    m.tau_s = 0.0;
    CHECK_THROWS_AS(validate(m), Error);
    m = plate();
    m.max_force_n = -1.0;
    CHECK_THROWS_AS(validate(m), Error);
}

TEST_CASE("step test: 10-90 rise matches 2.197 tau") {
    const auto run = run_step_response_test(plate(0.05));
    REQUIRE(run.metrics.step_response);
    const auto& r = *run.metrics.step_response;
    CHECK(std::abs(r.rise_10_90_s - oracle::first_order_rise_10_90(0.05)) <= 0.002);
    CHECK(std::abs(r.rise_s - 0.1) <= 0.03);
    CHECK(r.transition_s > StepTestPattern{}.gap_s);
    CHECK(run.commands.size() == run.force.size());
}

TEST_CASE("step test command pattern") {
    StepTestPattern p;
    const auto cmds = step_test_commands(p);
    CHECK(cmds.size() == static_cast<std::size_t>(std::llround((p.lead_s + 2 * p.hold_s + p.gap_s + p.tail_s) * 1000)));
    CHECK(cmds[99].signed_duty == 0.0);
    CHECK(cmds[100].signed_duty == -1.0);
    CHECK(cmds[599].signed_duty == -1.0);
    CHECK(cmds[600].signed_duty == 0.0);
    CHECK(cmds[1100].signed_duty == 1.0);
    CHECK(cmds[1600].signed_duty == 0.0);
}

TEST_CASE("no events: silent plate and zero metrics") {
    const auto run = run_closed_loop(fixture::knot_table(), fixture::clamp_free(), {}, plate());
    for (double f : run.force) CHECK(f == 0.0);
    CHECK(run.metrics.steps.empty());
    CHECK(run.metrics.per_region_impulse_error == 0.0);
    CHECK(run.metrics.net_impulse == 0.0);
    CHECK_FALSE(run.metrics.rise_s);
}

TEST_CASE("one knot event: attributed impulses follow the lag convolution") {
    const auto table = fixture::knot_table();
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        const std::vector<GaitEvent> ev{{0.1, Foot::Left, e.speed_kmh}};
        const auto run = run_closed_loop(table, fixture::clamp_free(), ev, plate(0.05));
        REQUIRE(run.metrics.steps.size() == 1);
        const auto& s = run.metrics.steps[0];
        CHECK(s.commanded_brake == doctest::Approx(e.brake.area()));

        // Window runs from the event to the end of the log.
        const double window = run.force.size() * 1e-3 - 0.1;
        const double brake = oracle::lagged_impulse([&](double t) { return -e.brake.value_at(t); }, 0.05, window);
        const double drive = oracle::lagged_impulse([&](double t) { return e.drive.value_at(t); }, 0.05, window);
        CHECK(s.achieved_brake == doctest::Approx(brake).epsilon(2e-3));
        CHECK(s.achieved_drive == doctest::Approx(drive).epsilon(2e-3));
        CHECK(run.metrics.per_region_impulse_error <= 0.05);
        CHECK(run.metrics.net_impulse_ratio <= 0.05);
        // Overlap of the lagged brake tail with the drive only ever shrinks the sign-split areas.
        CHECK(s.sign_split_brake <= s.achieved_brake + 1e-9);
        CHECK(s.sign_split_drive <= s.achieved_drive + 1e-9);
        CHECK(run.metrics.rise_s);
    }
}

TEST_CASE("fast plate converges to the commanded impulses") {
    const auto table = fixture::knot_table();
    for (const auto& e : table.entries) {
        const std::vector<GaitEvent> ev{{0.1, Foot::Left, e.speed_kmh}};
        const auto run = run_closed_loop(table, fixture::clamp_free(), ev, plate(1e-4));
        CHECK(run.metrics.per_region_impulse_error <= 0.005);
        CHECK(run.metrics.sign_split_impulse_error <= 0.005);
        CHECK(run.metrics.net_impulse_ratio <= 0.005);
    }
}

TEST_CASE("short step windows truncate the lagged tail") {
    const auto table = fixture::knot_table();
    // The second event cuts the first envelope; its leftover force lands in the next window.
    const std::vector<GaitEvent> ev{{0.1, Foot::Left, 1.0}, {0.5, Foot::Right, 1.0}};
    const auto run = run_closed_loop(table, fixture::clamp_free(), ev, plate(0.05));
    REQUIRE(run.metrics.steps.size() == 2);
    CHECK(run.metrics.steps[0].achieved_drive < 0.9 * run.metrics.steps[0].commanded_drive);
}

TEST_CASE("closed loop is deterministic") {
    const std::vector<GaitEvent> ev{{0.1, Foot::Left, 1.3}, {1.0, Foot::Right, 3.3}, {1.7, Foot::Left, 2.5}};
    const auto a = run_closed_loop(fixture::knot_table(), fixture::realistic(), ev, plate(0.05, fixture::realistic()));
    const auto b = run_closed_loop(fixture::knot_table(), fixture::realistic(), ev, plate(0.05, fixture::realistic()));
    CHECK(a == b);
    CHECK(a.commands.size() == a.force.size());
}
