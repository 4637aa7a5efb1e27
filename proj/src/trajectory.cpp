#include "srspos/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srspos/errors.hpp"
#include "srspos/rng.hpp"

namespace srspos::synth {

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
    if (s == "dense_walk") return TrajectoryKind::dense_walk;
    if (s == "path_back_and_forth") return TrajectoryKind::path_back_and_forth;
    if (s == "custom") return TrajectoryKind::custom;
    throw config_error("unknown trajectory kind '" + s + "'");
}

const char* to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::dense_walk: return "dense_walk";
        case TrajectoryKind::path_back_and_forth: return "path_back_and_forth";
        case TrajectoryKind::custom: return "custom";
    }
    return "custom";
}

Vec2 Trajectory::position_at(std::int64_t utc_ms) const {
    if (samples.empty()) {
        throw validation_error("trajectory is empty");
    }
    if (utc_ms < samples.front().utc_ms || utc_ms > samples.back().utc_ms) {
        throw validation_error("query time " + std::to_string(utc_ms) +
                               " outside trajectory span");
    }
    const auto it = std::lower_bound(
        samples.begin(), samples.end(), utc_ms,
        [](const TrajectorySample& s, std::int64_t t) { return s.utc_ms < t; });
    if (it->utc_ms == utc_ms) {
        return {it->x_m, it->y_m};
    }
    const TrajectorySample& hi = *it;
    const TrajectorySample& lo = *(it - 1);
    const double w = static_cast<double>(utc_ms - lo.utc_ms) /
                     static_cast<double>(hi.utc_ms - lo.utc_ms);
    return {lo.x_m + w * (hi.x_m - lo.x_m), lo.y_m + w * (hi.y_m - lo.y_m)};
}

void Trajectory::validate() const {
    if (samples.empty()) {
        throw validation_error("trajectory has no samples");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const TrajectorySample& a = samples[i - 1];
        const TrajectorySample& b = samples[i];
        if (b.utc_ms <= a.utc_ms) {
            throw validation_error("trajectory timestamps must be strictly increasing");
        }
        const double dt_s = static_cast<double>(b.utc_ms - a.utc_ms) / 1000.0;
        const double dist = std::hypot(b.x_m - a.x_m, b.y_m - a.y_m);
        if (dist > kMaxStepSpeedMps * dt_s * (1.0 + 1e-9)) {
            throw validation_error("trajectory exceeds the pedestrian speed bound at sample " +
                                   std::to_string(i));
        }
    }
}

Trajectory sample_dense_walk(const SquareArea& area, double duration_s, std::uint64_t seed,
                             std::int64_t start_utc_ms) {
    if (area.side_m <= 0.0) {
        throw validation_error("dense_walk square has zero area");
    }
    if (duration_s <= 0.0) {
        throw validation_error("trajectory duration must be positive");
    }
    const double half = area.side_m / 2.0;
    const double xmin = area.center.x - half;
    const double xmax = area.center.x + half;
    const double ymin = area.center.y - half;
    const double ymax = area.center.y + half;

    Rng rng(seed);
    double x = rng.uniform(xmin, xmax);
    double y = rng.uniform(ymin, ymax);
    double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double step_len = kPedestrianSpeedMps * static_cast<double>(kTrajectoryStepMs) / 1000.0;
    const auto steps = static_cast<std::int64_t>(std::floor(duration_s * 1000.0) /
                                                 static_cast<double>(kTrajectoryStepMs));

    Trajectory traj;
    traj.kind = TrajectoryKind::dense_walk;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t k = 0; k <= steps; ++k) {
        traj.samples.push_back({start_utc_ms + k * kTrajectoryStepMs, x, y});
        heading += rng.normal(0.0, 0.35);
        double nx = x + step_len * std::cos(heading);
        double ny = y + step_len * std::sin(heading);
        // reflect at the square boundary; bounded displacement keeps the
        // pedestrian speed invariant
        while (nx < xmin || nx > xmax || ny < ymin || ny > ymax) {
            if (nx < xmin) {
                nx = 2.0 * xmin - nx;
                heading = std::numbers::pi - heading;
            } else if (nx > xmax) {
                nx = 2.0 * xmax - nx;
                heading = std::numbers::pi - heading;
            }
            if (ny < ymin) {
                ny = 2.0 * ymin - ny;
                heading = -heading;
            } else if (ny > ymax) {
                ny = 2.0 * ymax - ny;
                heading = -heading;
            }
        }
        x = nx;
        y = ny;
    }
    return traj;
}

Trajectory sample_path_back_and_forth(const PathSegment& path, double duration_s,
                                      std::uint64_t seed, std::int64_t start_utc_ms) {
    (void)seed;  // the traversal is deterministic
    const double length = std::hypot(path.b.x - path.a.x, path.b.y - path.a.y);
    if (length <= 1e-9) {
        throw validation_error("path has zero length");
    }
    if (duration_s <= 0.0) {
        throw validation_error("trajectory duration must be positive");
    }
    const auto steps = static_cast<std::int64_t>(std::floor(duration_s * 1000.0) /
                                                 static_cast<double>(kTrajectoryStepMs));
    Trajectory traj;
    traj.kind = TrajectoryKind::path_back_and_forth;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t_s = static_cast<double>(k * kTrajectoryStepMs) / 1000.0;
        const double s = std::fmod(kPedestrianSpeedMps * t_s, 2.0 * length);
        const double u = s <= length ? s / length : 2.0 - s / length;
        traj.samples.push_back({start_utc_ms + k * kTrajectoryStepMs,
                                path.a.x + u * (path.b.x - path.a.x),
                                path.a.y + u * (path.b.y - path.a.y)});
    }
    return traj;
}

Trajectory sample_trajectory(const Scenario& scenario, TrajectoryKind kind, double duration_s,
                             std::uint64_t seed, std::int64_t start_utc_ms) {
    switch (kind) {
        case TrajectoryKind::dense_walk:
            return sample_dense_walk(scenario.walk_area, duration_s, seed, start_utc_ms);
        case TrajectoryKind::path_back_and_forth:
            return sample_path_back_and_forth(scenario.path, duration_s, seed, start_utc_ms);
        case TrajectoryKind::custom:
            throw config_error("custom trajectories are constructed from explicit samples");
    }
    throw config_error("unknown trajectory kind");
}

}  // namespace srspos::synth
