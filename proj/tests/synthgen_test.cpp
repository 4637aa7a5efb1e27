#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>

#include "srspos/channel_model.hpp"
#include "srspos/errors.hpp"
#include "srspos/rng.hpp"
#include "srspos/session.hpp"
#include "srspos/trajectory.hpp"

using namespace srspos;
using namespace srspos::synth;

namespace {

Scenario base_scenario() {
    Scenario sc;
    sc.seed = 42;
    sc.shadowing.sigma_db = 0.0;
    sc.reflectors.clear();
    return sc;
}

// Direct-summation reference: per path, the beam response d_ij^H a(u) summed
// explicitly, then magnitudes of the path sum. Replicates the model's antenna
// offset table and gain perturbations on purpose.
std::array<double, 64> oracle_beam_amplitudes(const Scenario& sc, Vec2 ue_pos, int channel,
                                              int antenna, bool direct_blocked) {
    constexpr double kOffsets[4][2] = {{0.03, 0.0}, {0.0, 0.03}, {-0.03, 0.0}, {0.0, -0.03}};
    constexpr double kGains[4] = {1.00, 0.97, 1.02, 0.98};
    const double ue[3] = {ue_pos.x + kOffsets[antenna][0], ue_pos.y + kOffsets[antenna][1],
                          sc.ue_height_m};
    const double bs[3] = {sc.bs_position.x, sc.bs_position.y, sc.bs_position.z};
    const double k = 2.0 * std::numbers::pi / sc.wavelength_m(channel);
    const double ref = sc.reference_amplitude * sc.reference_distance_m;

    struct OraclePath {
        std::complex<double> gain;
        double ux, uy, uz;
    };
    std::vector<OraclePath> paths;
    if (!direct_blocked) {
        const double dx = ue[0] - bs[0];
        const double dy = ue[1] - bs[1];
        const double dz = ue[2] - bs[2];
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        paths.push_back({std::polar(ref / d, -k * d), dx / d, dy / d, dz / d});
    }
    for (const Reflector& r : sc.reflectors) {
        const double rx = r.position.x - bs[0];
        const double ry = r.position.y - bs[1];
        const double rz = r.position.z - bs[2];
        const double d1 = std::sqrt(rx * rx + ry * ry + rz * rz);
        const double ex = ue[0] - r.position.x;
        const double ey = ue[1] - r.position.y;
        const double ez = ue[2] - r.position.z;
        const double d2 = std::sqrt(ex * ex + ey * ey + ez * ez);
        paths.push_back(
            {std::polar(ref * r.loss / (d1 + d2), -k * (d1 + d2)), rx / d1, ry / d1, rz / d1});
    }

    const double spacing = sc.element_spacing_m();
    std::array<double, 64> out{};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            std::complex<double> acc{0.0, 0.0};
            for (const OraclePath& p : paths) {
                std::complex<double> beam{0.0, 0.0};
                for (int m = 0; m < 8; ++m) {
                    for (int n = 0; n < 8; ++n) {
                        const double steer =
                            k * ((m - 3.5) * spacing * p.ux + (n - 3.5) * spacing * p.uz);
                        const double dft = -2.0 * std::numbers::pi * (m * i + n * j) / 8.0;
                        beam += std::polar(1.0, steer + dft);
                    }
                }
                acc += p.gain * beam / 8.0;
            }
            out[static_cast<std::size_t>(i * 8 + j)] = std::abs(acc) * kGains[antenna];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("degenerate trajectory geometry is rejected") {
    CHECK_THROWS_AS(sample_dense_walk({{0, 0}, 0.0}, 10.0, 1, 0), validation_error);
    CHECK_THROWS_AS(sample_dense_walk({{0, 0}, 10.0}, 0.0, 1, 0), validation_error);
    CHECK_THROWS_AS(sample_path_back_and_forth({{0, 0}, {0, 0}}, 10.0, 1, 0), validation_error);
}

TEST_CASE("one back-and-forth cycle returns to the start") {
    // 25 m at 0.8333 m/s: a full cycle takes exactly 60 s
    const PathSegment path{{-10.0, 50.0}, {15.0, 50.0}};
    const double duration = 2.0 * 25.0 / kPedestrianSpeedMps;
    CHECK(duration == doctest::Approx(60.0));
    const Trajectory traj = sample_path_back_and_forth(path, duration, 1, 0);
    traj.validate();
    const TrajectorySample& first = traj.samples.front();
    const TrajectorySample& last = traj.samples.back();
    CHECK(last.utc_ms == 60000);
    CHECK(last.x_m == doctest::Approx(first.x_m).epsilon(1e-9));
    CHECK(last.y_m == doctest::Approx(first.y_m).epsilon(1e-9));
    // the far end is reached exactly at half time
    const Vec2 mid = traj.position_at(30000);
    CHECK(mid.x == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("dense walk stays inside the square at pedestrian speed") {
    const SquareArea area{{10.0, 70.0}, 50.0};
    for (const std::uint64_t seed : {1ULL, 7ULL, 12345ULL}) {
        const Trajectory traj = sample_dense_walk(area, 600.0, seed, 1600000000000);
        traj.validate();
        CHECK(traj.samples.size() == 6001);
        for (const TrajectorySample& s : traj.samples) {
            CHECK(s.x_m >= area.center.x - 25.0);
            CHECK(s.x_m <= area.center.x + 25.0);
            CHECK(s.y_m >= area.center.y - 25.0);
            CHECK(s.y_m <= area.center.y + 25.0);
        }
        for (std::size_t i = 1; i < traj.samples.size(); ++i) {
            const double dist = std::hypot(traj.samples[i].x_m - traj.samples[i - 1].x_m,
                                           traj.samples[i].y_m - traj.samples[i - 1].y_m);
            CHECK(dist / 0.1 <= kMaxStepSpeedMps);
        }
    }
    // determinism
    const Trajectory a = sample_dense_walk(area, 60.0, 5, 0);
    const Trajectory b = sample_dense_walk(area, 60.0, 5, 0);
    const Trajectory c = sample_dense_walk(area, 60.0, 6, 0);
    CHECK(a.samples[100].x_m == b.samples[100].x_m);
    CHECK(a.samples[100].x_m != c.samples[100].x_m);
}

TEST_CASE("boresight direct path peaks at the DC beam") {
    Scenario sc = base_scenario();
    sc.ue_height_m = sc.bs_position.z;  // level with the array: exact boresight
    const ChannelModel model(sc);
    // antenna 1 is offset along +y only, staying on the boresight axis
    const auto mags = model.beam_amplitudes({0.0, 50.0}, 1, 1);
    const double peak = mags[0];
    for (std::size_t b = 1; b < mags.size(); ++b) {
        CHECK(mags[b] < peak);
    }
}

TEST_CASE("mirrored positions mirror the horizontal beam index") {
    Scenario sc = base_scenario();
    const ChannelModel model(sc);
    const auto left = model.beam_amplitudes({-17.0, 65.0}, 2, 1);
    const auto right = model.beam_amplitudes({17.0, 65.0}, 2, 1);
    for (int i = 0; i < 8; ++i) {
        const int mi = (8 - i) % 8;
        for (int j = 0; j < 8; ++j) {
            CHECK(left[static_cast<std::size_t>(i * 8 + j)] ==
                  doctest::Approx(right[static_cast<std::size_t>(mi * 8 + j)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("beam amplitudes match the direct-summation oracle") {
    Scenario sc = base_scenario();
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.4},
                     {{-35.0, 55.0, 12.0}, 0.25},
                     {{5.0, 90.0, 3.0}, 0.5}};
    const ChannelModel model(sc);
    Rng rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const Vec2 pos{rng.uniform(-40.0, 40.0), rng.uniform(30.0, 100.0)};
        const int channel = static_cast<int>(rng.below(3));
        const int antenna = static_cast<int>(rng.below(4));
        const auto got = model.beam_amplitudes(pos, channel, antenna);
        const auto want = oracle_beam_amplitudes(sc, pos, channel, antenna, false);
        for (std::size_t b = 0; b < 64; ++b) {
            CHECK(got[b] == doctest::Approx(want[b]).epsilon(1e-9));
        }
    }
}

TEST_CASE("a blocker removes the direct path but keeps reflector paths") {
    Scenario sc = base_scenario();
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.4}};
    // a slab straddling the BS-UE ray midway
    sc.blockers = {{{-10.0, 30.0, 0.0}, {10.0, 32.0, 30.0}}};
    const ChannelModel model(sc);
    const Vec2 pos{0.0, 60.0};
    CHECK(model.direct_path_blocked(model.ue_antenna_position(pos, 0)));
    CHECK_FALSE(model.direct_path_blocked(model.ue_antenna_position({60.0, 20.0}, 0)));

    const auto got = model.beam_amplitudes(pos, 0, 0);
    const auto want = oracle_beam_amplitudes(sc, pos, 0, 0, true);
    for (std::size_t b = 0; b < 64; ++b) {
        CHECK(got[b] == doctest::Approx(want[b]).epsilon(1e-9));
    }
}

TEST_CASE("singular geometry is rejected") {
    Scenario sc = base_scenario();
    sc.ue_height_m = sc.bs_position.z;
    const ChannelModel model(sc);
    CHECK_THROWS_AS(model.beam_amplitudes({-0.03, 0.0}, 0, 0), validation_error);

    Scenario sc2 = base_scenario();
    sc2.reflectors = {{{10.0, 10.0, sc2.ue_height_m}, 0.3}};
    const ChannelModel model2(sc2);
    CHECK_THROWS_AS(model2.beam_amplitudes({10.0 - 0.03, 10.0}, 0, 0), validation_error);
}

TEST_CASE("shadow field is deterministic with the configured spread") {
    const ShadowField field(250.0, 15.0, 4.0, 99);
    const ShadowField same(250.0, 15.0, 4.0, 99);
    const ShadowField other(250.0, 15.0, 4.0, 100);
    CHECK(field.value_db(12.5, -30.0) == same.value_db(12.5, -30.0));
    CHECK(field.value_db(12.5, -30.0) != other.value_db(12.5, -30.0));

    // std over grid nodes matches sigma; node spacing is correlation/3 = 5 m
    double sum = 0.0;
    double sum2 = 0.0;
    int count = 0;
    for (double x = -250.0; x <= 250.0; x += 5.0) {
        for (double y = -250.0; y <= 250.0; y += 5.0) {
            const double v = field.value_db(x, y);
            sum += v;
            sum2 += v * v;
            ++count;
        }
    }
    const double mean = sum / count;
    const double std_dev = std::sqrt(sum2 / count - mean * mean);
    CHECK(std_dev == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-6));

    // nearby points are far more similar than antipodal ones
    double near_diff = 0.0;
    double far_diff = 0.0;
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const double x = rng.uniform(-200.0, 200.0);
        const double y = rng.uniform(-200.0, 200.0);
        near_diff += std::abs(field.value_db(x, y) - field.value_db(x + 1.0, y));
        far_diff += std::abs(field.value_db(x, y) - field.value_db(-x, -y));
    }
    CHECK(near_diff < 0.25 * far_diff);
}

TEST_CASE("session occasion count and refresh statistics match the log model") {
    Scenario sc = base_scenario();
    const ChannelModel model(sc);

    const Trajectory short_traj = sample_dense_walk(sc.walk_area, 10.0, 3, 1600000000000);
    const SessionOutput short_out = simulate_session(model, short_traj, 77);
    std::set<std::int64_t> occasions;
    for (const auto& rec : short_out.log.records) {
        occasions.insert(rec.utc_ms);
    }
    CHECK(occasions.size() >= 90);
    CHECK(occasions.size() <= 286);

    const Trajectory traj = sample_dense_walk(sc.walk_area, 90.0, 4, 1600000000000);
    const SessionOutput out = simulate_session(model, traj, 78);
    std::map<std::int64_t, int> per_occasion;
    for (const auto& rec : out.log.records) {
        per_occasion[rec.utc_ms] += 1;
    }
    CHECK(per_occasion.size() >= 1000);
    const double mean_pairs =
        static_cast<double>(out.log.records.size()) / static_cast<double>(per_occasion.size());
    CHECK(mean_pairs >= 5.5);
    CHECK(mean_pairs <= 6.5);

    // intervals stay in [35, 110] ms
    std::int64_t prev = -1;
    for (const auto& [utc, n] : per_occasion) {
        (void)n;
        if (prev >= 0) {
            CHECK(utc - prev >= 35);
            CHECK(utc - prev <= 110);
        }
        prev = utc;
    }
}

TEST_CASE("SFN advances by the elapsed 10 ms frames between occasions") {
    Scenario sc = base_scenario();
    const ChannelModel model(sc);
    const Trajectory traj = sample_dense_walk(sc.walk_area, 30.0, 5, 1600000000000);
    const SessionOutput out = simulate_session(model, traj, 5);
    std::map<std::int64_t, int> sfn_of;
    for (const auto& rec : out.log.records) {
        const auto it = sfn_of.find(rec.utc_ms);
        if (it == sfn_of.end()) {
            sfn_of[rec.utc_ms] = rec.sfn;
        } else {
            CHECK(it->second == rec.sfn);  // one SFN per occasion
        }
    }
    std::int64_t prev_t = -1;
    int prev_sfn = -1;
    for (const auto& [t, sfn] : sfn_of) {
        if (prev_t >= 0) {
            const int expect = static_cast<int>(
                (prev_sfn + std::llround(static_cast<double>(t - prev_t) / 10.0)) % 1024);
            CHECK(sfn == expect);
        }
        prev_t = t;
        prev_sfn = sfn;
    }
}

TEST_CASE("gains are quantized beam magnitudes with random phase") {
    Scenario sc = base_scenario();
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.4}};
    const ChannelModel model(sc);
    const Trajectory traj = sample_dense_walk(sc.walk_area, 5.0, 6, 1600000000000);
    const SessionOutput out = simulate_session(model, traj, 6);
    REQUIRE(!out.log.records.empty());
    for (std::size_t r = 0; r < out.log.records.size(); r += 7) {
        const auto& rec = out.log.records[r];
        const Vec2 pos = traj.position_at(rec.utc_ms);
        const auto mags = model.beam_amplitudes(pos, rec.pair_index / 4, rec.pair_index % 4);
        for (int b = 0; b < 64; ++b) {
            const double got = std::abs(rec.gains[static_cast<std::size_t>(b)].value());
            // each component is rounded to 1/32768, so the magnitude moves by
            // at most sqrt(2)/2 quantization steps
            CHECK(std::abs(got - mags[static_cast<std::size_t>(b)]) <=
                  std::numbers::sqrt2 * 0.5 / 32768.0 + 1e-12);
        }
    }
}

TEST_CASE("GNSS stream has one fix per second with zero-mean noise") {
    Scenario sc = base_scenario();
    sc.gnss_accuracy_spread_m = 0.0;  // pin accuracy at 3.5 m
    const ChannelModel model(sc);
    const Trajectory traj = sample_dense_walk(sc.walk_area, 600.0, 8, 1600000000000);
    const SessionOutput out = simulate_session(model, traj, 9);
    CHECK(out.gnss.size() == 601);

    double mean_e = 0.0;
    double mean_n = 0.0;
    for (const GnssFix& f : out.gnss) {
        CHECK(f.accuracy_m == doctest::Approx(3.5));
        const Vec2 truth = traj.position_at(f.utc_ms);
        mean_e += f.east_m - truth.x;
        mean_n += f.north_m - truth.y;
    }
    mean_e /= static_cast<double>(out.gnss.size());
    mean_n /= static_cast<double>(out.gnss.size());
    const double bound = 3.0 * 3.5 / std::sqrt(static_cast<double>(out.gnss.size()));
    CHECK(std::abs(mean_e) <= bound);
    CHECK(std::abs(mean_n) <= bound);
}

TEST_CASE("sessions are bit-deterministic in (scenario, trajectory, seed)") {
    Scenario sc = base_scenario();
    sc.shadowing.sigma_db = 3.0;
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.4}};
    const ChannelModel model(sc);
    const Trajectory traj = sample_dense_walk(sc.walk_area, 20.0, 10, 1600000000000);
    const SessionOutput a = simulate_session(model, traj, 123);
    const SessionOutput b = simulate_session(model, traj, 123);
    const SessionOutput c = simulate_session(model, traj, 124);
    CHECK(a.log == b.log);
    CHECK(a.log.records.size() > 0);
    CHECK(!(a.log == c.log));
    REQUIRE(a.gnss.size() == b.gnss.size());
    for (std::size_t i = 0; i < a.gnss.size(); ++i) {
        CHECK(a.gnss[i].east_m == b.gnss[i].east_m);
        CHECK(a.gnss[i].north_m == b.gnss[i].north_m);
    }

    CHECK_THROWS_AS(simulate_session(model, Trajectory{}, 1), validation_error);
}

TEST_CASE("fingerprints separate far positions from near ones") {
    Scenario sc = base_scenario();
    sc.shadowing.sigma_db = 4.0;
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.4}, {{-35.0, 55.0, 12.0}, 0.3}};
    const ChannelModel model(sc);

    const auto feature = [&](Vec2 pos) {
        std::vector<double> f;
        for (int c = 0; c < 3; ++c) {
            std::array<double, 64> mean{};
            for (int a = 0; a < 4; ++a) {
                const auto mags = model.beam_amplitudes(pos, c, a);
                for (std::size_t b = 0; b < 64; ++b) {
                    mean[b] += mags[b] / 4.0;
                }
            }
            f.insert(f.end(), mean.begin(), mean.end());
        }
        return f;
    };
    const auto distance = [](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            acc += (a[i] - b[i]) * (a[i] - b[i]);
        }
        return std::sqrt(acc);
    };

    Rng rng(31);
    double near_mean = 0.0;
    double far_mean = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec2 p{rng.uniform(-20.0, 20.0), rng.uniform(50.0, 90.0)};
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const Vec2 near{p.x + 0.8 * std::cos(angle), p.y + 0.8 * std::sin(angle)};
        const Vec2 far{p.x + 14.0 * std::cos(angle), p.y + 14.0 * std::sin(angle)};
        near_mean += distance(feature(p), feature(near));
        far_mean += distance(feature(p), feature(far));
    }
    CHECK(far_mean / 100.0 > near_mean / 100.0);
}
