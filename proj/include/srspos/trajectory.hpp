#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srspos/scenario.hpp"

namespace srspos::synth {

inline constexpr double kPedestrianSpeedMps = 3.0 / 3.6;  // 3 km/h
inline constexpr double kMaxStepSpeedMps = 2.0;
inline constexpr std::int64_t kTrajectoryStepMs = 100;

enum class TrajectoryKind { dense_walk, path_back_and_forth, custom };

TrajectoryKind trajectory_kind_from_string(const std::string& s);
const char* to_string(TrajectoryKind kind);

struct TrajectorySample {
    std::int64_t utc_ms = 0;
    double x_m = 0.0;
    double y_m = 0.0;
};

struct Trajectory {
    TrajectoryKind kind = TrajectoryKind::custom;
    std::vector<TrajectorySample> samples;  // strictly increasing utc

    std::int64_t start_utc_ms() const { return samples.front().utc_ms; }
    std::int64_t end_utc_ms() const { return samples.back().utc_ms; }

    // linear interpolation; utc must lie within [start, end]
    Vec2 position_at(std::int64_t utc_ms) const;

    // strictly increasing timestamps and pedestrian step-speed bound
    void validate() const;
};

// Random walk at pedestrian speed confined to the square, reflecting at the
// boundary.
Trajectory sample_dense_walk(const SquareArea& area, double duration_s, std::uint64_t seed,
                             std::int64_t start_utc_ms);

// Constant-speed traversal of the segment, folding back at both endpoints.
Trajectory sample_path_back_and_forth(const PathSegment& path, double duration_s,
                                      std::uint64_t seed, std::int64_t start_utc_ms);

// Dispatch on kind using the scenario's walk area / path geometry.
Trajectory sample_trajectory(const Scenario& scenario, TrajectoryKind kind, double duration_s,
                             std::uint64_t seed, std::int64_t start_utc_ms);

}  // namespace srspos::synth
