#include "hapstep/scores.hpp"

#include "hapstep/error.hpp"
#include "hapstep/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace hapstep {

namespace {

int speed_slot(double speed) {
    for (int i = 0; i < 3; ++i)
        if (speed == kScoreSpeeds[i]) return i;
    return -1;
}

} // namespace

std::string_view to_string(Stimulus s) {
    switch (s) {
    case Stimulus::None: return "none";
    case Stimulus::Vibration: return "vibration";
    case Stimulus::Friction: return "friction";
    }
    return "none";
}

Stimulus parse_stimulus(std::string_view text) {
    if (text == "none") return Stimulus::None;
    if (text == "vibration") return Stimulus::Vibration;
    if (text == "friction") return Stimulus::Friction;
    throw Error(ErrorKind::Format, "unknown stimulus '" + std::string(text) + "'");
}

ScoreSet normalize_scores(const ScoreSet& set) {
    using Key = std::pair<std::string, std::string>;
    std::map<Key, std::array<std::optional<std::size_t>, 9>> grids;

    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& r = set[i];
        if (!(r.score >= 0.0 && r.score <= 100.0))
            throw Error(ErrorKind::Input, "score " + format_double(r.score) + " outside [0, 100]");
        int slot = speed_slot(r.speed_kmh);
        if (slot < 0) throw Error(ErrorKind::Input, "speed " + format_double(r.speed_kmh) + " is not a study speed");
        auto& cell = grids[{r.participant, r.item}][static_cast<std::size_t>(static_cast<int>(r.stimulus) * 3 + slot)];
        if (cell)
            throw Error(ErrorKind::Input, "duplicate score for " + r.participant + "/" + r.item + "/" +
                                              std::string(to_string(r.stimulus)) + "/" + format_double(r.speed_kmh));
        cell = i;
    }

    ScoreSet out = set;
    for (const auto& [key, grid] : grids) {
        double lo = 100.0, hi = 0.0;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            if (!grid[c])
                throw Error(ErrorKind::IncompleteGrid,
                            "participant " + key.first + ", item " + key.second + ": missing " +
                                std::string(to_string(static_cast<Stimulus>(c / 3))) + " at " +
                                format_double(kScoreSpeeds[c % 3]) + " km/h");
            lo = std::min(lo, set[*grid[c]].score);
            hi = std::max(hi, set[*grid[c]].score);
        }
        for (const auto& idx : grid) {
            auto& r = out[*idx];
            r.normalized = hi == lo ? 0.0 : (r.score - lo) / (hi - lo);
        }
    }
    return out;
}

std::vector<ScoreMean> average_normalized(const ScoreSet& normalized) {
    std::map<std::tuple<std::string, int, int>, std::pair<double, int>> acc;
    for (const auto& r : normalized) {
        if (!r.normalized) throw Error(ErrorKind::Input, "average_normalized needs normalized scores");
        auto& a = acc[{r.item, static_cast<int>(r.stimulus), speed_slot(r.speed_kmh)}];
        a.first += *r.normalized;
        a.second += 1;
    }
    std::vector<ScoreMean> out;
    for (const auto& [key, a] : acc) {
        const auto& [item, stim, slot] = key;
        out.push_back({item, static_cast<Stimulus>(stim), kScoreSpeeds[slot], a.first / a.second, a.second});
    }
    return out;
}

ScoreSet read_scores(std::istream& in) {
    ScoreSet out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (!header) {
            if (f.size() < 5 || f[0] != "participant" || f[1] != "item" || f[2] != "stimulus" || f[3] != "speed_kmh" ||
                f[4] != "score")
                throw Error(ErrorKind::Format, "expected header participant,item,stimulus,speed_kmh,score");
            header = true;
            continue;
        }
        if (f.size() < 5 || f.size() > 6)
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 5 fields");
        ScoreRecord r;
        r.participant = f[0];
        r.item = f[1];
        try {
            r.stimulus = parse_stimulus(f[2]);
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!parse_double(f[3], r.speed_kmh) || !parse_double(f[4], r.score))
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number");
        if (f.size() == 6 && !f[5].empty()) {
            double n = 0.0;
            if (!parse_double(f[5], n)) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad normalized value");
            r.normalized = n;
        }
        out.push_back(std::move(r));
    }
    if (out.empty()) throw Error(ErrorKind::EmptyInput, "no scores");
    return out;
}

ScoreSet read_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_scores(in);
}

void write_scores(std::ostream& out, const ScoreSet& set) {
    bool with_norm = std::any_of(set.begin(), set.end(), [](const ScoreRecord& r) { return r.normalized.has_value(); });
    out << "participant,item,stimulus,speed_kmh,score" << (with_norm ? ",normalized" : "") << '\n';
    for (const auto& r : set) {
        out << r.participant << ',' << r.item << ',' << to_string(r.stimulus) << ',' << format_double(r.speed_kmh)
            << ',' << format_double(r.score);
        if (with_norm) out << ',' << (r.normalized ? format_double(*r.normalized) : "");
        out << '\n';
    }
}

void write_score_means(std::ostream& out, const std::vector<ScoreMean>& means) {
    out << "item,stimulus,speed_kmh,mean_normalized,participants\n";
    for (const auto& m : means)
        out << m.item << ',' << to_string(m.stimulus) << ',' << format_double(m.speed_kmh) << ','
            << format_double(m.mean) << ',' << m.count << '\n';
}

} // namespace hapstep
