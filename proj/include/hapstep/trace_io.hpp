#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hapstep {

/// One sample of the two sole sites. Y is longitudinal friction, Z vertical.
struct ForceSample {
    double thenar_y = 0.0;
    double heel_y = 0.0;
    double thenar_z = 0.0;
    double heel_z = 0.0;

    friend bool operator==(const ForceSample&, const ForceSample&) = default;
};

struct TraceMeta {
    static constexpr std::string_view sign_convention = "sole-frame, forward-positive";

    double walking_speed_kmh = 0.0;
    std::string participant_id;

    friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

/// Uniformly sampled two-site friction trace, stored in the sole frame
/// (positive Y pushes the sole forward). The sensor reports the reaction,
/// so the sign is flipped exactly once, on load.
struct ForceTrace {
    double sample_rate_hz = 1000.0;
    bool has_vertical = false;
    std::vector<ForceSample> samples;
    TraceMeta meta;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

    /// Copy of samples [first, first + count), same rate and metadata.
    ForceTrace slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const ForceTrace&, const ForceTrace&) = default;
};

/// Throws Error(Format) when the rate is not positive or any value is not finite.
void validate(const ForceTrace& trace);

/// Reads trace-CSV:
///   # rate_hz=<float> speed_kmh=<float> participant=<id>
///   t,thenar_y,heel_y[,thenar_z,heel_z]
/// The `t` column is optional when rate_hz is given. Values are sensor-frame.
ForceTrace load_trace(std::istream& in);
ForceTrace load_trace(const std::filesystem::path& path);

/// Writes trace-CSV in sensor frame; load_trace(write_trace(x)) == x.
void write_trace(std::ostream& out, const ForceTrace& trace);
void write_trace(const std::filesystem::path& path, const ForceTrace& trace);

} // namespace hapstep
