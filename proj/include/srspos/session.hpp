#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srspos/channel_model.hpp"
#include "srspos/srslog.hpp"
#include "srspos/trajectory.hpp"

namespace srspos::synth {

inline constexpr std::int64_t kSrsIntervalMinMs = 35;
inline constexpr std::int64_t kSrsIntervalMaxMs = 110;
inline constexpr std::int64_t kGnssIntervalMs = 1000;
inline constexpr std::int64_t kFrameMs = 10;  // NR radio frame, drives SFN

// UTC-stamped position fix in the local frame with 1-sigma horizontal accuracy.
struct GnssFix {
    std::int64_t utc_ms = 0;
    double east_m = 0.0;
    double north_m = 0.0;
    double accuracy_m = 0.0;
};

struct SessionOutput {
    srslog::SrsLog log;
    std::vector<GnssFix> gnss;
};

// One acquisition session: SRS occasions at uniformly random 35-110 ms
// intervals, each emitting a uniformly random subset (expected size 6) of the
// 12 (channel, antenna) pairs with beam amplitudes carrying a fresh random
// phase, quantized to Q15; GNSS fixes at 1 Hz with Gaussian noise of the
// session's accuracy. Deterministic given (model, trajectory, seed).
SessionOutput simulate_session(const ChannelModel& model, const Trajectory& trajectory,
                               std::uint64_t seed);

SessionOutput simulate_session(const Scenario& scenario, const Trajectory& trajectory,
                               std::uint64_t seed);

}  // namespace srspos::synth
