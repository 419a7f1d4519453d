#include "hapstep/trace_io.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace hapstep {

namespace {

constexpr double kMaxJitter = 0.01;

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct Header {
    std::optional<double> rate_hz;
    TraceMeta meta;
};

void parse_metadata(std::string_view line, std::size_t line_no, Header& header) {
    std::istringstream tokens{std::string(line.substr(1))};
    std::string token;
    while (tokens >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        std::string_view key(token.data(), eq);
        std::string_view value(token.data() + eq + 1, token.size() - eq - 1);
        double number = 0.0;
        if (key == "rate_hz") {
            if (!parse_double(value, number) || !std::isfinite(number) || number <= 0.0)
                throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": invalid rate_hz '" + std::string(value) + "'");
            header.rate_hz = number;
        } else if (key == "speed_kmh") {
            if (!parse_double(value, number) || !std::isfinite(number) || number < 0.0)
                throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": invalid speed_kmh '" + std::string(value) + "'");
            header.meta.walking_speed_kmh = number;
        } else if (key == "participant") {
            header.meta.participant_id = std::string(value);
        }
    }
}

double median(std::vector<double> v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double hi = *mid;
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace

ForceTrace ForceTrace::slice(std::size_t first, std::size_t count) const {
    ForceTrace out;
    out.sample_rate_hz = sample_rate_hz;
    out.has_vertical = has_vertical;
    out.meta = meta;
    first = std::min(first, samples.size());
    count = std::min(count, samples.size() - first);
    out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                       samples.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

void validate(const ForceTrace& trace) {
    if (!std::isfinite(trace.sample_rate_hz) || trace.sample_rate_hz <= 0.0)
        throw Error(ErrorKind::Format, "sample rate must be positive");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        if (!std::isfinite(s.thenar_y) || !std::isfinite(s.heel_y) || !std::isfinite(s.thenar_z) || !std::isfinite(s.heel_z))
            throw Error(ErrorKind::Format, "sample " + std::to_string(i) + " is not finite");
    }
}

ForceTrace load_trace(std::istream& in) {
    Header header;
    std::optional<std::vector<std::string>> columns;
    bool has_time = false;
    ForceTrace trace;
    std::vector<double> times;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (!columns) parse_metadata(line, line_no, header);
            continue;
        }
        if (!columns) {
            std::vector<std::string> names;
            for (auto field : split(line, ',')) names.emplace_back(trim(field));
            std::size_t offset = (!names.empty() && names[0] == "t") ? 1 : 0;
            std::size_t n_values = names.size() - offset;
            bool ok = (n_values == 2 || n_values == 4) && names[offset] == "thenar_y" && names[offset + 1] == "heel_y";
            if (ok && n_values == 4) ok = names[offset + 2] == "thenar_z" && names[offset + 3] == "heel_z";
            if (!ok)
                throw Error(ErrorKind::Format, "line " + std::to_string(line_no) +
                                                   ": expected columns t,thenar_y,heel_y[,thenar_z,heel_z]");
            has_time = offset == 1;
            trace.has_vertical = n_values == 4;
            columns = std::move(names);
            continue;
        }

        auto fields = split(line, ',');
        if (fields.size() != columns->size())
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(columns->size()) + " fields, got " +
                                              std::to_string(fields.size()));
        std::vector<double> values(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], values[i]) || !std::isfinite(values[i]))
                throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" +
                                                  std::string(trim(fields[i])) + "' in column " + (*columns)[i]);
        }
        std::size_t k = 0;
        if (has_time) times.push_back(values[k++]);
        ForceSample s;
        s.thenar_y = -values[k++];
        s.heel_y = -values[k++];
        if (trace.has_vertical) {
            s.thenar_z = -values[k++];
            s.heel_z = -values[k++];
        }
        trace.samples.push_back(s);
    }

    if (!columns) throw Error(ErrorKind::EmptyInput, "trace has no column header");
    if (trace.samples.empty()) throw Error(ErrorKind::EmptyInput, "trace has no samples");

    std::optional<double> rate = header.rate_hz;
    if (has_time && times.size() >= 2) {
        std::vector<double> dts(times.size() - 1);
        for (std::size_t i = 1; i < times.size(); ++i) dts[i - 1] = times[i] - times[i - 1];
        double med = median(dts);
        if (!(med > 0.0)) throw Error(ErrorKind::Format, "time column is not increasing");
        for (std::size_t i = 0; i < dts.size(); ++i) {
            if (std::abs(dts[i] - med) > kMaxJitter * med)
                throw Error(ErrorKind::Format, "non-uniform time spacing at sample " + std::to_string(i + 1) +
                                                   " (dt=" + format_double(dts[i]) + ", median " + format_double(med) + ")");
        }
        double inferred = 1.0 / med;
        if (!rate) {
            rate = inferred;
        } else if (std::abs(inferred - *rate) > kMaxJitter * *rate) {
            throw Error(ErrorKind::Format, "time column implies " + format_double(inferred) +
                                               " Hz but header declares " + format_double(*rate) + " Hz");
        }
    }
    if (!rate) throw Error(ErrorKind::Format, "sample rate missing: add rate_hz to the header or a t column");

    trace.sample_rate_hz = *rate;
    trace.meta = header.meta;
    return trace;
}

ForceTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return load_trace(in);
}

void write_trace(std::ostream& out, const ForceTrace& trace) {
    validate(trace);
    if (std::any_of(trace.meta.participant_id.begin(), trace.meta.participant_id.end(),
                    [](unsigned char c) { return std::isspace(c); }))
        throw Error(ErrorKind::Format, "participant id must not contain whitespace");
    out << "# rate_hz=" << format_double(trace.sample_rate_hz)
        << " speed_kmh=" << format_double(trace.meta.walking_speed_kmh)
        << " participant=" << trace.meta.participant_id << '\n';
    out << (trace.has_vertical ? "t,thenar_y,heel_y,thenar_z,heel_z\n" : "t,thenar_y,heel_y\n");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        out << format_double(static_cast<double>(i) / trace.sample_rate_hz) << ','
            << format_double(-s.thenar_y) << ',' << format_double(-s.heel_y);
        if (trace.has_vertical) out << ',' << format_double(-s.thenar_z) << ',' << format_double(-s.heel_z);
        out << '\n';
    }
}

void write_trace(const std::filesystem::path& path, const ForceTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_trace(out, trace);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace hapstep
