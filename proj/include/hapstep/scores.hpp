#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hapstep {

enum class Stimulus { None, Vibration, Friction };

std::string_view to_string(Stimulus s);
Stimulus parse_stimulus(std::string_view text);

inline constexpr double kScoreSpeeds[] = {1.0, 2.5, 4.0};

/// One questionnaire answer, 0..100 relative to real walking.
struct ScoreRecord {
    std::string participant;
    std::string item;
    Stimulus stimulus = Stimulus::None;
    double speed_kmh = 0.0;
    double score = 0.0;
    std::optional<double> normalized;
};

using ScoreSet = std::vector<ScoreRecord>;

/// Min-max normalization over each participant's 3x3 (stimulus x speed)
/// grid for one item; a flat grid maps to all zeros.
ScoreSet normalize_scores(const ScoreSet& set);

struct ScoreMean {
    std::string item;
    Stimulus stimulus = Stimulus::None;
    double speed_kmh = 0.0;
    double mean = 0.0;
    int count = 0;
};

/// Mean normalized score per (item, stimulus, speed) across participants.
std::vector<ScoreMean> average_normalized(const ScoreSet& normalized);

/// CSV `participant,item,stimulus,speed_kmh,score[,normalized]`.
ScoreSet read_scores(std::istream& in);
ScoreSet read_scores(const std::filesystem::path& path);
void write_scores(std::ostream& out, const ScoreSet& set);
void write_score_means(std::ostream& out, const std::vector<ScoreMean>& means);

} // namespace hapstep
