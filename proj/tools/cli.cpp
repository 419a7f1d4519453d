#include "cli.hpp"

#include "hapstep/calibration.hpp"
#include "hapstep/error.hpp"
#include "hapstep/json_io.hpp"
#include "hapstep/live.hpp"
#include "hapstep/numeric.hpp"
#include "hapstep/pipeline.hpp"
#include "hapstep/plant.hpp"
#include "hapstep/renderer.hpp"
#include "hapstep/scores.hpp"
#include "hapstep/segmentation.hpp"
#include "hapstep/trace_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace hapstep::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Shared settings; any of them may come from the --config file.
struct Settings {
    PipelineConfig pipeline;
    double min_duty = kDefaultMinDuty;
    double tau_s = 0.05;
    double plate_max_force_n = 10.0;
};

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

// "-" selects the standard output stream.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error(ErrorKind::Io, "cannot write " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& stream() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw Error(ErrorKind::Io, "write failed: " + path_);
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void write_json(const std::string& path, const json& j, std::ostream& out) {
    Output o(path, out);
    o.stream() << j.dump(2) << '\n';
    o.finish();
}

// Two-column CSV with a fixed header.
std::vector<std::pair<double, double>> read_pairs(const fs::path& path, std::string_view header) {
    auto in = open_input(path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!seen_header) {
            if (line != header) throw Error(ErrorKind::Format, path.string() + ": expected header " + std::string(header));
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        double a = 0, b = 0;
        if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), a) ||
            !parse_double(std::string_view(line).substr(comma + 1), b) || !std::isfinite(a) || !std::isfinite(b))
            throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": malformed row");
        rows.emplace_back(a, b);
    }
    if (rows.empty()) throw Error(ErrorKind::EmptyInput, path.string() + ": no data rows");
    return rows;
}

std::vector<CalibrationPoint> read_points(const fs::path& path) {
    std::vector<CalibrationPoint> points;
    for (auto [duty, force] : read_pairs(path, "duty,peak_force")) points.push_back({duty, force});
    return points;
}

// Uniform `t,force` log, as written by `simulate`.
FrictionProfile read_force_log(const fs::path& path) {
    const auto rows = read_pairs(path, "t,force");
    FrictionProfile p;
    if (rows.size() < 2) throw Error(ErrorKind::Format, path.string() + ": need at least two samples");
    const double dt = (rows.back().first - rows.front().first) / static_cast<double>(rows.size() - 1);
    if (!(dt > 0)) throw Error(ErrorKind::Format, path.string() + ": time column must increase");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (std::abs(rows[i].first - rows[i - 1].first - dt) > 0.01 * dt)
            throw Error(ErrorKind::Format, path.string() + ": non-uniform sampling at row " + std::to_string(i + 1));
    p.sample_rate_hz = 1.0 / dt;
    for (const auto& r : rows) p.values.push_back(r.second);
    return p;
}

void write_force_log(std::ostream& out, std::span<const ActuatorCommand> commands, std::span<const double> force) {
    out << "t,force\n";
    for (std::size_t i = 0; i < force.size(); ++i)
        out << format_tick_time(commands[i].t) << ',' << format_double(force[i]) << '\n';
}

std::vector<CommandSample> to_samples(std::span<const ActuatorCommand> commands) {
    std::vector<CommandSample> out;
    out.reserve(commands.size());
    for (const auto& c : commands) out.push_back({c.t, c.signed_duty});
    return out;
}

CalibrationPair load_calibration(const fs::path& path) { return calibration_from_json(read_json_file(path)); }

SpeedProfileTable load_table(const fs::path& path) {
    auto table = table_from_json(read_json_file(path));
    validate(table);
    return table;
}

std::vector<GaitEvent> load_events(const fs::path& path) {
    auto in = open_input(path);
    return read_events(in);
}

// Curves used when `simulate` runs without a calibration file: linear,
// zero intercept, no dead zone, 4 N at full duty.
CalibrationPair builtin_curves() {
    CalibrationPair c;
    c.forward = {Direction::Forward, 4.0, 0.0, 1.0, 0.0};
    c.backward = {Direction::Backward, 4.0, 0.0, 1.0, 0.0};
    return c;
}

json segments_json(const ForceTrace& trace, std::span<const StepSegment> segments) {
    json steps = json::array();
    for (const auto& s : segments)
        steps.push_back({{"step_index", s.index_in_walk},
                         {"first_sample", s.first_sample},
                         {"end_sample", s.end_sample()},
                         {"t_start", static_cast<double>(s.first_sample) / trace.sample_rate_hz},
                         {"t_end", static_cast<double>(s.end_sample()) / trace.sample_rate_hz}});
    return {{"participant", trace.meta.participant_id},
            {"speed_kmh", trace.meta.walking_speed_kmh},
            {"sample_rate_hz", trace.sample_rate_hz},
            {"steps", steps}};
}

void print_sim_metrics(std::ostream& out, const SimMetrics& m) {
    auto row = [&](std::string_view name, const std::string& value) {
        out << name << std::string(name.size() < 28 ? 28 - name.size() : 1, ' ') << value << '\n';
    };
    if (m.rise_s) row("rise_s", format_double(*m.rise_s));
    if (m.step_response) {
        const auto& r = *m.step_response;
        row("rise_10_90_s", format_double(r.rise_10_90_s));
        row("fall_s", format_double(r.fall_s));
        row("transition_s", format_double(r.transition_s));
        row("forward_rise_s", format_double(r.forward_rise_s));
        row("forward_rise_10_90_s", format_double(r.forward_rise_10_90_s));
    }
    if (!m.steps.empty()) {
        row("steps", std::to_string(m.steps.size()));
        row("per_region_impulse_error", format_double(m.per_region_impulse_error));
        row("sign_split_impulse_error", format_double(m.sign_split_impulse_error));
        row("net_impulse", format_double(m.net_impulse));
        row("net_impulse_ratio", format_double(m.net_impulse_ratio));
    }
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return kUsage;
    case ErrorKind::Parse:
    case ErrorKind::Format:
    case ErrorKind::EmptyInput:
    case ErrorKind::Input:
    case ErrorKind::IncompleteGrid:
    case ErrorKind::Clock: return kFormat;
    case ErrorKind::InsufficientSteps:
    case ErrorKind::PhaseDetection:
    case ErrorKind::Alignment:
    case ErrorKind::DegenerateProfile:
    case ErrorKind::PhaseInconsistency:
    case ErrorKind::UnderdeterminedFit:
    case ErrorKind::Analysis: return kDegenerate;
    case ErrorKind::Io: return kIo;
    }
    return kFormat;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"HapStep friction-profile pipeline, renderer and simulator", "hapstep"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value settings file; command-line flags take precedence");

    Settings st;
    auto& seg = st.pipeline.segmentation;
    auto& ph = st.pipeline.phases;
    app.add_option("--onset", seg.onset_threshold_n, "Step onset threshold on |thenar_y|+|heel_y|, N")->capture_default_str();
    app.add_option("--release", seg.release_threshold_n, "Step release threshold, N")->capture_default_str();
    app.add_option("--min-step", seg.min_step_s, "Shortest accepted step, s")->capture_default_str();
    app.add_option("--release-hold", seg.release_hold_s, "Quiet time that closes a step, s")->capture_default_str();
    app.add_option("--step4-factor", ph.step4_factor, "Step-4 onset at thenar < -factor * |Step-1 peak|")->capture_default_str();
    app.add_option("--step2-min", ph.step2_min_s, "Shortest heel+thenar drive overlap counted as Step-2, s")->capture_default_str();
    app.add_option("--dead-band", ph.dead_band_n, "Forces within +-band count as zero, N")->capture_default_str();
    app.add_option("--first-step", st.pipeline.first_step, "First kept step of each walk (1-based)")->capture_default_str();
    app.add_option("--last-step", st.pipeline.last_step, "Last kept step of each walk (1-based)")->capture_default_str();
    app.add_option("--device-max-force", st.pipeline.device_max_force_n, "Largest force the display may render, N")->capture_default_str();
    app.add_option("--speeds", st.pipeline.speeds, "Knot speeds compiled into the table, km/h")->capture_default_str();
    app.add_option("--min-duty", st.min_duty, "Lowest duty that moves the plate")->capture_default_str();
    app.add_option("--tau", st.tau_s, "Plate time constant for simulation, s")->capture_default_str();
    app.add_option("--plate-max-force", st.plate_max_force_n, "Plate force clamp for simulation, N")->capture_default_str();

    std::function<void()> action;

    // ingest
    std::string ingest_trace, ingest_out = "-";
    auto* ingest = app.add_subcommand("ingest", "Validate a trace CSV and rewrite it canonically; summary on stderr");
    ingest->add_option("--trace", ingest_trace, "Input trace CSV")->required();
    ingest->add_option("--output,-o", ingest_out, "Canonical trace CSV ('-' for stdout)")->capture_default_str();
    ingest->callback([&] {
        action = [&] {
            const auto trace = load_trace(fs::path(ingest_trace));
            Output o(ingest_out, out);
            write_trace(o.stream(), trace);
            o.finish();
            err << "participant=" << trace.meta.participant_id << " speed_kmh=" << format_double(trace.meta.walking_speed_kmh)
                << " rate_hz=" << format_double(trace.sample_rate_hz) << " samples=" << trace.size()
                << " duration_s=" << format_double(trace.duration_s()) << '\n';
        };
    });

    // segment
    std::string segment_trace, segment_out = "-";
    auto* segment = app.add_subcommand("segment", "Cut a trace into steps; writes segments JSON");
    segment->add_option("--trace", segment_trace, "Input trace CSV")->required();
    segment->add_option("--output,-o", segment_out, "Segments JSON ('-' for stdout)")->capture_default_str();
    segment->callback([&] {
        action = [&] {
            validate(st.pipeline);
            const auto trace = load_trace(fs::path(segment_trace));
            write_json(segment_out, segments_json(trace, segment_steps(trace, seg)), out);
        };
    });

    // phases
    std::string phases_trace, phases_out = "-";
    auto* phases = app.add_subcommand("phases", "Annotate the kept steps with phase timings; rejected steps go to stderr");
    phases->add_option("--trace", phases_trace, "Input trace CSV")->required();
    phases->add_option("--output,-o", phases_out, "Phase sidecar JSON ('-' for stdout)")->capture_default_str();
    phases->callback([&] {
        action = [&] {
            validate(st.pipeline);
            const auto trace = load_trace(fs::path(phases_trace));
            const auto all = segment_steps(trace, seg);
            const auto kept = select_middle(all, st.pipeline.first_step, st.pipeline.last_step);
            std::vector<PhaseAnnotation> notes;
            for (const auto& s : kept) {
                try {
                    notes.push_back({s.index_in_walk, detect_phases(s, ph)});
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::PhaseDetection) throw;
                    err << "rejected step " << s.index_in_walk << ": " << e.what() << '\n';
                }
            }
            write_json(phases_out, to_json(notes), out);
        };
    });

    // compile
    std::vector<std::string> compile_traces;
    std::string compile_out = "-";
    auto* compile = app.add_subcommand("compile", "Compile traces into the speed profile table JSON");
    compile->add_option("--trace", compile_traces, "Trace CSV (repeat for every participant and speed)")->required();
    compile->add_option("--output,-o", compile_out, "Profile table JSON ('-' for stdout)")->capture_default_str();
    compile->callback([&] {
        action = [&] {
            std::vector<ForceTrace> traces;
            for (const auto& p : compile_traces) traces.push_back(load_trace(fs::path(p)));
            const auto compiled = compile_table(traces, st.pipeline);
            for (const auto& r : compiled.rejected)
                err << "rejected " << r.participant << " @" << format_double(r.speed_kmh) << " km/h step " << r.step_index
                    << ": " << r.reason << '\n';
            for (const auto& s : compiled.speeds)
                err << format_double(s.speed_kmh) << " km/h: participants=" << s.participants << " steps=" << s.steps
                    << " B=" << format_double(s.measured.backward) << " F=" << format_double(s.measured.forward)
                    << " T=" << format_double(s.treadmill_impulse) << '\n';
            write_json(compile_out, to_json(compiled.table), out);
        };
    });

    // calibrate
    std::string calib_fwd, calib_bwd, calib_out = "-";
    auto* calibrate = app.add_subcommand("calibrate", "Fit duty->peak-force lines; writes both curves as a JSON array");
    calibrate->add_option("--forward", calib_fwd, "Forward points CSV duty,peak_force")->required();
    calibrate->add_option("--backward", calib_bwd, "Backward points CSV duty,peak_force")->required();
    calibrate->add_option("--output,-o", calib_out, "Calibration JSON ('-' for stdout)")->capture_default_str();
    calibrate->callback([&] {
        action = [&] {
            const auto fwd = fit_calibration(read_points(calib_fwd), Direction::Forward, st.min_duty);
            const auto bwd = fit_calibration(read_points(calib_bwd), Direction::Backward, st.min_duty);
            write_json(calib_out, json::array({to_json(fwd), to_json(bwd)}), out);
        };
    });

    // step-response
    std::string sr_commands, sr_force, sr_out = "-";
    double sr_flatten = StepResponseOptions{}.flatten_ratio;
    auto* step_response = app.add_subcommand("step-response", "Rise/fall/transition times from a command log and a force log");
    step_response->add_option("--commands", sr_commands, "Command log CSV t,signed_duty")->required();
    step_response->add_option("--force", sr_force, "Force log CSV t,force, one row per command")->required();
    step_response->add_option("--flatten-ratio", sr_flatten, "Rise ends when a sample gains less than this share of the steepest gain")
        ->capture_default_str();
    step_response->add_option("--output,-o", sr_out, "Metrics JSON ('-' for stdout)")->capture_default_str();
    step_response->callback([&] {
        action = [&] {
            auto cin = open_input(sr_commands);
            const auto commands = read_command_log(cin);
            const auto force = read_force_log(sr_force);
            if (force.values.size() != commands.size())
                throw Error(ErrorKind::Input, "command and force logs differ in length");
            const auto samples = to_samples(commands);
            write_json(sr_out, to_json(analyze_step_response(samples, force, {sr_flatten})), out);
        };
    });

    // render
    std::string render_events, render_table, render_calib, render_out = "-", render_bind = "127.0.0.1", render_clock = "replay";
    std::uint16_t render_port = 0;
    auto* render = app.add_subcommand("render", "Render gait events into a 1 kHz command log");
    auto* events_opt = render->add_option("--events", render_events, "NDJSON event file (default: standard input)");
    render->add_option("--table", render_table, "Profile table JSON")->required();
    render->add_option("--calib", render_calib, "Calibration JSON")->required();
    render->add_option("--output,-o", render_out, "Command log CSV ('-' for stdout)")->capture_default_str();
    auto* listen_opt = render->add_option("--listen", render_port, "Accept NDJSON events from one TCP client on this port");
    render->add_option("--bind", render_bind, "Listen address for --listen")->capture_default_str();
    render->add_option("--clock", render_clock, "replay: tick as events allow; wall: tick in real time")
        ->check(CLI::IsMember({"replay", "wall"}))
        ->capture_default_str();
    events_opt->excludes(listen_opt);
    render->callback([&] {
        action = [&] {
            Renderer renderer(load_table(render_table), load_calibration(render_calib));
            LiveOptions options;
            options.clock = render_clock == "wall" ? ClockMode::Wall : ClockMode::Replay;
            Output o(render_out, out);
            auto& stream = o.stream();
            stream << kCommandLogHeader << '\n';
            const bool flush_rows = options.clock == ClockMode::Wall;
            auto sink = [&](const ActuatorCommand& c) {
                stream << format_command_row(c) << '\n';
                if (flush_rows) stream.flush();
            };
            if (*listen_opt) {
                TcpLineServer server(render_port, render_bind);
                err << "listening on " << render_bind << ':' << server.port() << '\n';
                run_live(server.accept(), renderer, sink, options);
            } else if (*events_opt) {
                auto file = open_input(render_events);
                run_live(istream_lines(file), renderer, sink, options);
            } else {
                run_live(istream_lines(in), renderer, sink, options);
            }
            o.finish();
        };
    });

    // vibstep
    std::string vib_commands, vib_out = "-";
    auto* vibstep = app.add_subcommand("vibstep", "Convert a command log into heel/thenar vibrator envelopes");
    vibstep->add_option("--commands", vib_commands, "Command log CSV t,signed_duty")->required();
    vibstep->add_option("--output,-o", vib_out, "VibStep log CSV ('-' for stdout)")->capture_default_str();
    vibstep->callback([&] {
        action = [&] {
            auto cin = open_input(vib_commands);
            const auto commands = read_command_log(cin);
            Output o(vib_out, out);
            write_vibstep_log(o.stream(), to_vibstep(commands));
            o.finish();
        };
    });

    // simulate
    std::string sim_events, sim_table, sim_calib, sim_dir;
    StepTestPattern pattern;
    auto* simulate = app.add_subcommand(
        "simulate", "Drive the first-order plate model; step-response test by default, closed loop with --events");
    auto* sim_events_opt = simulate->add_option("--events", sim_events, "NDJSON event file: run renderer and plate together");
    auto* sim_table_opt = simulate->add_option("--table", sim_table, "Profile table JSON (closed loop)");
    auto* sim_calib_opt = simulate->add_option("--calib", sim_calib, "Calibration JSON (default: 4 N/duty, no dead zone)");
    simulate->add_option("--duty", pattern.duty, "Step-test duty magnitude")->capture_default_str();
    simulate->add_option("--hold", pattern.hold_s, "Step-test block length, s")->capture_default_str();
    simulate->add_option("--gap", pattern.gap_s, "Step-test pause between blocks, s")->capture_default_str();
    simulate->add_option("--out-dir", sim_dir, "Directory for commands.csv, force.csv and metrics.json");
    sim_events_opt->needs(sim_table_opt);
    sim_table_opt->needs(sim_events_opt);
    simulate->callback([&] {
        action = [&] {
            PlateModel model;
            model.tau_s = st.tau_s;
            model.max_force_n = st.plate_max_force_n;
            model.curves = *sim_calib_opt ? load_calibration(sim_calib) : builtin_curves();
            SimRun sim;
            if (*sim_events_opt) {
                const auto events = load_events(sim_events);
                sim = run_closed_loop(load_table(sim_table), model.curves, events, model);
            } else {
                sim = run_step_response_test(model, pattern);
            }
            const json metrics = to_json(sim.metrics);
            if (!sim_dir.empty()) {
                std::error_code ec;
                fs::create_directories(sim_dir, ec);
                if (ec) throw Error(ErrorKind::Io, "cannot create " + sim_dir + ": " + ec.message());
                {
                    Output o((fs::path(sim_dir) / "commands.csv").string(), out);
                    write_command_log(o.stream(), sim.commands);
                    o.finish();
                }
                {
                    Output o((fs::path(sim_dir) / "force.csv").string(), out);
                    write_force_log(o.stream(), sim.commands, sim.force);
                    o.finish();
                }
                write_json((fs::path(sim_dir) / "metrics.json").string(), metrics, out);
                print_sim_metrics(out, sim.metrics);
            } else {
                out << metrics.dump(2) << '\n';
            }
        };
    });

    // normalize
    std::string norm_scores, norm_out = "-", norm_avg;
    auto* normalize = app.add_subcommand("normalize", "Min-max normalize questionnaire scores per participant and item");
    normalize->add_option("--scores", norm_scores, "Scores CSV participant,item,stimulus,speed_kmh,score")->required();
    normalize->add_option("--output,-o", norm_out, "Normalized scores CSV ('-' for stdout)")->capture_default_str();
    normalize->add_option("--average", norm_avg, "Also write per-cell means across participants to this CSV");
    normalize->callback([&] {
        action = [&] {
            const auto normalized = normalize_scores(read_scores(fs::path(norm_scores)));
            Output o(norm_out, out);
            write_scores(o.stream(), normalized);
            o.finish();
            if (!norm_avg.empty()) {
                Output a(norm_avg, out);
                write_score_means(a.stream(), average_normalized(normalized));
                a.finish();
            }
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        action();
        return kOk;
    } catch (const Error& e) {
        err << "hapstep: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const json::exception& e) {
        err << "hapstep: format: " << e.what() << '\n';
        return kFormat;
    } catch (const std::exception& e) {
        err << "hapstep: " << e.what() << '\n';
        return kIo;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cin, std::cout, std::cerr);
}

} // namespace hapstep::cli
