#include "srspos/session.hpp"

#include <cmath>
#include <numbers>

#include "srspos/errors.hpp"
#include "srspos/rng.hpp"

namespace srspos::synth {

namespace {

std::int16_t quantize_component(double v) {
    const long long raw = std::llround(v * srslog::kFixedScale);
    if (raw > 32767 || raw < -32768) {
        throw validation_error(
            "gain component exceeds the fixed-point range; lower reference_amplitude");
    }
    return static_cast<std::int16_t>(raw);
}

}  // namespace

SessionOutput simulate_session(const ChannelModel& model, const Trajectory& trajectory,
                               std::uint64_t seed) {
    if (trajectory.samples.empty()) {
        throw validation_error("cannot simulate a session over an empty trajectory");
    }
    trajectory.validate();
    const Scenario& sc = model.scenario();
    for (const TrajectorySample& s : trajectory.samples) {
        if (std::abs(s.x_m) > sc.region_half_extent_m ||
            std::abs(s.y_m) > sc.region_half_extent_m) {
            throw validation_error("trajectory leaves the scenario region");
        }
    }

    const std::int64_t t0 = trajectory.start_utc_ms();
    const std::int64_t t_end = trajectory.end_utc_ms();

    // occasion times and SFNs come from a dedicated stream so that per-occasion
    // content can be generated in parallel from derived seeds
    Rng occasion_rng(derive_seed(seed, 0));
    int sfn = static_cast<int>(occasion_rng.below(srslog::kSfnPeriod));
    std::vector<std::int64_t> times;
    std::vector<int> sfns;
    for (std::int64_t t = t0; t <= t_end;) {
        times.push_back(t);
        sfns.push_back(sfn);
        const std::int64_t dt =
            kSrsIntervalMinMs +
            static_cast<std::int64_t>(occasion_rng.below(
                static_cast<std::uint64_t>(kSrsIntervalMaxMs - kSrsIntervalMinMs + 1)));
        sfn = static_cast<int>(
            (sfn + std::llround(static_cast<double>(dt) / static_cast<double>(kFrameMs))) %
            srslog::kSfnPeriod);
        t += dt;
    }

    const std::size_t n_occasions = times.size();
    std::vector<std::vector<srslog::SrsRecord>> per_occasion(n_occasions);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_occasions); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
        const Vec2 pos = trajectory.position_at(times[idx]);

        // uniform subset of expected size 6, conditioned on being nonempty so
        // every occasion appears in the log
        bool include[srslog::kPairCount];
        bool any = false;
        while (!any) {
            for (bool& b : include) {
                b = rng.bernoulli(0.5);
                any = any || b;
            }
        }
        for (int pair = 0; pair < srslog::kPairCount; ++pair) {
            if (!include[pair]) {
                continue;
            }
            const int channel = pair / srslog::kUeAntennaCount;
            const int antenna = pair % srslog::kUeAntennaCount;
            const auto magnitudes = model.beam_amplitudes(pos, channel, antenna);

            srslog::SrsRecord rec;
            rec.utc_ms = times[idx];
            rec.sfn = sfns[idx];
            rec.pair_index = pair;
            for (int b = 0; b < srslog::kGainsPerRecord; ++b) {
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                const double mag = magnitudes[static_cast<std::size_t>(b)];
                rec.gains[static_cast<std::size_t>(b)].re =
                    quantize_component(mag * std::cos(phase));
                rec.gains[static_cast<std::size_t>(b)].im =
                    quantize_component(mag * std::sin(phase));
            }
            per_occasion[idx].push_back(rec);
        }
    }

    SessionOutput out;
    for (const auto& records : per_occasion) {
        out.log.records.insert(out.log.records.end(), records.begin(), records.end());
    }

    Rng gnss_rng(derive_seed(seed, 1));
    const double accuracy =
        sc.gnss_accuracy_mean_m + sc.gnss_accuracy_spread_m * (2.0 * gnss_rng.uniform() - 1.0);
    for (std::int64_t t = t0; t <= t_end; t += kGnssIntervalMs) {
        const Vec2 pos = trajectory.position_at(t);
        GnssFix fix;
        fix.utc_ms = t;
        fix.east_m = pos.x + gnss_rng.normal(0.0, accuracy);
        fix.north_m = pos.y + gnss_rng.normal(0.0, accuracy);
        fix.accuracy_m = accuracy;
        out.gnss.push_back(fix);
    }
    return out;
}

SessionOutput simulate_session(const Scenario& scenario, const Trajectory& trajectory,
                               std::uint64_t seed) {
    const ChannelModel model(scenario);
    return simulate_session(model, trajectory, seed);
}

}  // namespace srspos::synth
