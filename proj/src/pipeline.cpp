#include "srspos/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srspos/errors.hpp"
#include "srspos/rng.hpp"

namespace srspos::pipeline {

bool ChannelSnapshot::complete() const {
    return std::all_of(present.begin(), present.end(), [](bool p) { return p; });
}

std::vector<ChannelSnapshot> assemble_snapshots(const srslog::SrsLog& log) {
    std::vector<ChannelSnapshot> out;
    std::size_t i = 0;
    std::int64_t prev_utc = 0;
    while (i < log.records.size()) {
        const std::int64_t utc = log.records[i].utc_ms;
        if (!out.empty() && utc < prev_utc) {
            throw validation_error("log records are not time-ordered at utc " +
                                   std::to_string(utc));
        }
        ChannelSnapshot snap;
        snap.utc_ms = utc;
        snap.sfn = log.records[i].sfn;
        while (i < log.records.size() && log.records[i].utc_ms == utc) {
            const srslog::SrsRecord& rec = log.records[i];
            rec.validate();
            const auto pair = static_cast<std::size_t>(rec.pair_index);
            std::array<std::complex<double>, kBeamCount> values;
            for (int b = 0; b < kBeamCount; ++b) {
                values[static_cast<std::size_t>(b)] =
                    rec.gains[static_cast<std::size_t>(b)].value();
            }
            if (snap.fresh[pair]) {
                for (int b = 0; b < kBeamCount; ++b) {
                    if (snap.h[pair * kBeamCount + static_cast<std::size_t>(b)] !=
                        values[static_cast<std::size_t>(b)]) {
                        throw validation_error(
                            "ambiguous duplicate record for pair " + std::to_string(pair) +
                            " at utc " + std::to_string(utc));
                    }
                }
            } else {
                for (int b = 0; b < kBeamCount; ++b) {
                    snap.h[pair * kBeamCount + static_cast<std::size_t>(b)] =
                        values[static_cast<std::size_t>(b)];
                }
                snap.fresh[pair] = true;
                snap.present[pair] = true;
            }
            ++i;
        }
        prev_utc = utc;
        out.push_back(snap);
    }
    return out;
}

std::vector<ChannelSnapshot> forward_fill(const std::vector<ChannelSnapshot>& snapshots) {
    std::vector<ChannelSnapshot> out;
    std::array<std::complex<double>, kRawAmplitudeCount> last{};
    std::array<bool, kPairCount> seen{};
    for (const ChannelSnapshot& snap : snapshots) {
        for (int p = 0; p < kPairCount; ++p) {
            const auto pair = static_cast<std::size_t>(p);
            if (snap.fresh[pair]) {
                for (int b = 0; b < kBeamCount; ++b) {
                    last[pair * kBeamCount + static_cast<std::size_t>(b)] =
                        snap.h[pair * kBeamCount + static_cast<std::size_t>(b)];
                }
                seen[pair] = true;
            }
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
            continue;  // warm-up: some pair has never been observed
        }
        ChannelSnapshot filled;
        filled.utc_ms = snap.utc_ms;
        filled.sfn = snap.sfn;
        filled.fresh = snap.fresh;
        filled.h = last;
        filled.present.fill(true);
        out.push_back(filled);
    }
    return out;
}

std::array<double, kRawAmplitudeCount> amplitude(const ChannelSnapshot& snapshot) {
    if (!snapshot.complete()) {
        throw validation_error("amplitude requires a complete snapshot");
    }
    std::array<double, kRawAmplitudeCount> out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::abs(snapshot.h[i]);
    }
    return out;
}

std::array<double, kAveragedAmplitudeCount> average_ue_antennas(
    const std::array<double, kRawAmplitudeCount>& amps) {
    std::array<double, kAveragedAmplitudeCount> out{};
    for (int c = 0; c < kChannelCount; ++c) {
        for (int b = 0; b < kBeamCount; ++b) {
            double acc = 0.0;
            for (int a = 0; a < kUeAntennaCount; ++a) {
                acc += amps[static_cast<std::size_t>((c * kUeAntennaCount + a) * kBeamCount + b)];
            }
            out[static_cast<std::size_t>(c * kBeamCount + b)] =
                acc / static_cast<double>(kUeAntennaCount);
        }
    }
    return out;
}

Normalizer::Normalizer(double max_amplitude) : max_(max_amplitude), fitted_(true) {
    if (!(max_amplitude > 0.0) || !std::isfinite(max_amplitude)) {
        throw validation_error("normalizer max must be a positive finite value");
    }
}

Normalizer Normalizer::fit(std::span<const double> training_amplitudes) {
    if (training_amplitudes.empty()) {
        throw validation_error("cannot fit a normalizer on empty training data");
    }
    double max = 0.0;
    for (double v : training_amplitudes) {
        max = std::max(max, v);
    }
    if (!(max > 0.0)) {
        throw validation_error("degenerate normalizer: training amplitudes are all zero");
    }
    return Normalizer(max);
}

double Normalizer::max_amplitude() const {
    if (!fitted_) {
        throw validation_error("normalizer not fitted");
    }
    return max_;
}

void Normalizer::apply(std::span<double> values) const {
    if (!fitted_) {
        throw validation_error("normalizer not fitted");
    }
    for (double& v : values) {
        v /= max_;
    }
}

std::array<double, kFeatureWidth> root_features(
    const std::array<double, kAveragedAmplitudeCount>& scaled) {
    std::array<double, kFeatureWidth> out;
    for (int i = 0; i < kAveragedAmplitudeCount; ++i) {
        const double v = scaled[static_cast<std::size_t>(i)];
        if (v < 0.0) {
            throw validation_error("root features require nonnegative inputs");
        }
        const double s = std::sqrt(v);
        out[static_cast<std::size_t>(i)] = s;
        out[static_cast<std::size_t>(kAveragedAmplitudeCount + i)] = std::sqrt(s);
    }
    return out;
}

InterpolationResult interpolate_positions(const std::vector<synth::GnssFix>& fixes,
                                          const std::vector<std::int64_t>& query_utc_ms) {
    if (fixes.size() < 2) {
        throw validation_error("position interpolation requires at least two GNSS fixes");
    }
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        if (fixes[i].utc_ms <= fixes[i - 1].utc_ms) {
            throw validation_error("GNSS timestamps must be strictly increasing");
        }
    }
    InterpolationResult res;
    res.positions.resize(query_utc_ms.size());
    res.kept.assign(query_utc_ms.size(), false);
    for (std::size_t q = 0; q < query_utc_ms.size(); ++q) {
        const std::int64_t t = query_utc_ms[q];
        if (t < fixes.front().utc_ms || t > fixes.back().utc_ms) {
            continue;
        }
        const auto it = std::lower_bound(
            fixes.begin(), fixes.end(), t,
            [](const synth::GnssFix& f, std::int64_t tt) { return f.utc_ms < tt; });
        if (it->utc_ms == t) {
            res.positions[q] = {it->east_m, it->north_m};
        } else {
            const synth::GnssFix& hi = *it;
            const synth::GnssFix& lo = *(it - 1);
            const double w = static_cast<double>(t - lo.utc_ms) /
                             static_cast<double>(hi.utc_ms - lo.utc_ms);
            res.positions[q] = {lo.east_m + w * (hi.east_m - lo.east_m),
                                lo.north_m + w * (hi.north_m - lo.north_m)};
        }
        res.kept[q] = true;
    }
    return res;
}

std::vector<synth::GnssFix> geodetic_to_local(const std::vector<GeodeticFix>& fixes) {
    if (fixes.empty()) {
        return {};
    }
    constexpr double kEarthRadiusM = 6371000.0;
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double lat0 = fixes.front().lat_deg;
    const double lon0 = fixes.front().lon_deg;
    if (std::abs(lat0) >= 89.99) {
        throw validation_error("projection origin too close to a pole");
    }
    const double cos_lat0 = std::cos(lat0 * kDegToRad);
    std::vector<synth::GnssFix> out;
    out.reserve(fixes.size());
    for (const GeodeticFix& f : fixes) {
        synth::GnssFix g;
        g.utc_ms = f.utc_ms;
        g.east_m = (f.lon_deg - lon0) * cos_lat0 * kEarthRadiusM * kDegToRad;
        g.north_m = (f.lat_deg - lat0) * kEarthRadiusM * kDegToRad;
        g.accuracy_m = f.accuracy_m;
        out.push_back(g);
    }
    return out;
}

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "train";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "validation") return Split::validation;
    if (s == "test") return Split::test;
    throw format_error("unknown split tag '" + s + "'");
}

namespace {

RowBlock rows_from_snapshots(const std::vector<ChannelSnapshot>& filled,
                             const std::vector<synth::GnssFix>* gnss) {
    RowBlock rows;
    std::vector<std::int64_t> query;
    query.reserve(filled.size());
    for (const ChannelSnapshot& s : filled) {
        query.push_back(s.utc_ms);
    }

    std::vector<bool> kept(filled.size(), true);
    InterpolationResult interp;
    if (gnss != nullptr) {
        interp = interpolate_positions(*gnss, query);
        kept = interp.kept;
    }

    for (std::size_t i = 0; i < filled.size(); ++i) {
        if (!kept[i]) {
            continue;
        }
        rows.utc_ms.push_back(filled[i].utc_ms);
        if (gnss != nullptr) {
            rows.targets.push_back(interp.positions[i].x);
            rows.targets.push_back(interp.positions[i].y);
        }
        const auto avg = average_ue_antennas(amplitude(filled[i]));
        rows.amplitudes.insert(rows.amplitudes.end(), avg.begin(), avg.end());
    }
    return rows;
}

}  // namespace

RowBlock build_rows(const srslog::SrsLog& log, const std::vector<synth::GnssFix>& gnss) {
    const auto filled = forward_fill(assemble_snapshots(log));
    return rows_from_snapshots(filled, &gnss);
}

RowBlock build_rows_unlabeled(const srslog::SrsLog& log) {
    const auto filled = forward_fill(assemble_snapshots(log));
    return rows_from_snapshots(filled, nullptr);
}

Dataset finalize_dataset(const RowBlock& rows, const Normalizer& normalizer, Split split,
                         bool use_root_features) {
    if (rows.n_rows() == 0) {
        throw validation_error("empty dataset: no rows survive GNSS bounds and warm-up drops");
    }
    if (rows.targets.size() != 2 * rows.n_rows()) {
        throw validation_error("dataset rows are missing position targets");
    }
    Dataset ds;
    ds.split = split;
    ds.feature_width = use_root_features ? kFeatureWidth : kAveragedAmplitudeCount;
    ds.utc_ms = rows.utc_ms;
    ds.targets = rows.targets;
    ds.normalizer_max = normalizer.max_amplitude();
    ds.features.reserve(rows.n_rows() * static_cast<std::size_t>(ds.feature_width));
    std::array<double, kAveragedAmplitudeCount> scaled;
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
        std::copy_n(rows.amplitudes.begin() +
                        static_cast<std::ptrdiff_t>(r * kAveragedAmplitudeCount),
                    kAveragedAmplitudeCount, scaled.begin());
        normalizer.apply(scaled);
        if (use_root_features) {
            const auto feats = root_features(scaled);
            ds.features.insert(ds.features.end(), feats.begin(), feats.end());
        } else {
            ds.features.insert(ds.features.end(), scaled.begin(), scaled.end());
        }
    }
    return ds;
}

BuildResult build_dataset(const srslog::SrsLog& log, const std::vector<synth::GnssFix>& gnss,
                          const Normalizer* normalizer, Split split, bool use_root_features) {
    const RowBlock rows = build_rows(log, gnss);
    BuildResult result;
    if (normalizer != nullptr) {
        result.normalizer = *normalizer;
    } else {
        if (split != Split::train) {
            throw provenance_error("the normalizer may only be fitted on the train split");
        }
        result.normalizer = Normalizer::fit(rows.amplitudes);
    }
    result.dataset = finalize_dataset(rows, result.normalizer, split, use_root_features);
    return result;
}

void inject_target_noise(std::span<double> targets_xy, double sigma_m, std::uint64_t seed,
                         std::uint64_t epoch) {
    if (sigma_m < 0.0) {
        throw validation_error("target noise sigma must be nonnegative");
    }
    if (targets_xy.size() % 2 != 0) {
        throw validation_error("targets must hold an even number of coordinates");
    }
    if (sigma_m == 0.0) {
        return;
    }
    Rng rng(derive_seed(derive_seed(seed, 0x7A9),  epoch));
    for (double& v : targets_xy) {
        v += rng.normal(0.0, sigma_m);
    }
}

}  // namespace srspos::pipeline
