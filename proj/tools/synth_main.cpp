// Writes a self-consistent synthetic dataset: study traces, calibration
// points, a gait event log and questionnaire scores.

#include "hapstep/error.hpp"
#include "hapstep/live.hpp"
#include "hapstep/numeric.hpp"
#include "hapstep/scores.hpp"
#include "hapstep/synth.hpp"
#include "hapstep/trace_io.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace hapstep;

namespace {

std::ofstream create(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

void write_points(const fs::path& path, double slope, double intercept, std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, 0.01);
    auto out = create(path);
    out << "duty,peak_force\n";
    for (int rep = 0; rep < 3; ++rep)
        for (double duty : {0.37, 0.69, 1.0})
            out << format_double(duty) << ',' << format_double((slope * duty + intercept) * (1.0 + noise(rng))) << '\n';
}

// Alternating feet; speed changes every ten seconds.
void write_events(const fs::path& path, double seconds) {
    const double speeds[] = {1.0, 2.5, 4.0, 1.75, 3.2, 0.8};
    auto out = create(path);
    double t = 0.25;
    int n = 0;
    while (t < seconds) {
        const double v = speeds[static_cast<std::size_t>(t / 10.0) % std::size(speeds)];
        out << to_ndjson({std::round(t * 1000.0) / 1000.0, n % 2 == 0 ? Foot::Left : Foot::Right, v}) << '\n';
        t += 1.15 - 0.12 * v;
        ++n;
    }
}

void write_score_grid(const fs::path& path, int participants, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> score(0, 100);
    ScoreSet set;
    for (int p = 1; p <= participants; ++p)
        for (const char* item : {"reality", "presence"})
            for (Stimulus s : {Stimulus::None, Stimulus::Vibration, Stimulus::Friction})
                for (double v : kScoreSpeeds)
                    set.push_back({"P" + std::to_string(p), item, s, v, static_cast<double>(score(rng)), std::nullopt});
    auto out = create(path);
    write_scores(out, set);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic fixture generator for the hapstep tools", "hapstep-synth"};
    std::string dir;
    std::uint64_t seed = 7;
    int participants = 4;
    double event_seconds = 60.0;
    app.add_option("--out-dir", dir, "Output directory")->required();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--participants", participants, "Participants per speed")->capture_default_str();
    app.add_option("--event-seconds", event_seconds, "Length of the event log, s")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path root(dir);
        fs::create_directories(root / "traces");
        std::mt19937_64 rng(seed);
        for (const auto& trace : synth::make_study({1.0, 2.5, 4.0}, participants, seed)) {
            const auto name = trace.meta.participant_id + "_" + format_double(trace.meta.walking_speed_kmh) + ".csv";
            write_trace(root / "traces" / name, trace);
        }
        write_points(root / "calib_forward.csv", 3.4, 0.15, rng);
        write_points(root / "calib_backward.csv", 3.8, 0.10, rng);
        write_events(root / "events.ndjson", event_seconds);
        write_score_grid(root / "scores.csv", participants, rng);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "hapstep-synth: " << e.what() << '\n';
        return 5;
    }
}
