#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srspos/session.hpp"
#include "srspos/srslog.hpp"

namespace srspos::pipeline {

inline constexpr int kChannelCount = srslog::kChannelCount;
inline constexpr int kUeAntennaCount = srslog::kUeAntennaCount;
inline constexpr int kPairCount = srslog::kPairCount;
inline constexpr int kBeamCount = srslog::kGainsPerRecord;
inline constexpr int kRawAmplitudeCount = kPairCount * kBeamCount;          // 768
inline constexpr int kAveragedAmplitudeCount = kChannelCount * kBeamCount;  // 192
inline constexpr int kFeatureWidth = 2 * kAveragedAmplitudeCount;           // 384

// full measurement-setup capacity: 137 channels x 4 UE antennas x 64 directions
constexpr int full_capacity() { return 137 * 4 * 64; }
// sparse configuration actually logged: 3 channels x 4 antennas x 64 directions
constexpr int sparse_raw_count() { return kRawAmplitudeCount; }

// One SRS occasion: the sparse 12x8x8 channel matrix with a freshness mask.
// Entries of pairs that have no history yet are absent, not zero.
struct ChannelSnapshot {
    std::int64_t utc_ms = 0;
    int sfn = 0;
    std::array<std::complex<double>, kRawAmplitudeCount> h{};
    std::array<bool, kPairCount> fresh{};
    std::array<bool, kPairCount> present{};

    bool complete() const;
};

// Merge records sharing one occasion (identical utc) into snapshots.
std::vector<ChannelSnapshot> assemble_snapshots(const srslog::SrsLog& log);

// Impute absent sub-matrices with their most recent prior value; snapshots
// before every pair has been seen once are dropped. Never uses future values.
std::vector<ChannelSnapshot> forward_fill(const std::vector<ChannelSnapshot>& snapshots);

// Elementwise complex magnitude of a complete snapshot.
std::array<double, kRawAmplitudeCount> amplitude(const ChannelSnapshot& snapshot);

// Mean over the 4 UE antennas per (channel, beam).
std::array<double, kAveragedAmplitudeCount> average_ue_antennas(
    const std::array<double, kRawAmplitudeCount>& amps);

// Global min-0 max-1 scaling by the maximum amplitude of the training split.
class Normalizer {
  public:
    Normalizer() = default;
    explicit Normalizer(double max_amplitude);  // reload from a persisted value

    static Normalizer fit(std::span<const double> training_amplitudes);

    bool fitted() const { return fitted_; }
    double max_amplitude() const;
    void apply(std::span<double> values) const;

  private:
    double max_ = 0.0;
    bool fitted_ = false;
};

// Flatten 3x8x8 scaled amplitudes and emit [sqrt block | fourth-root block].
std::array<double, kFeatureWidth> root_features(
    const std::array<double, kAveragedAmplitudeCount>& scaled);

struct XY {
    double x = 0.0;
    double y = 0.0;
};

struct InterpolationResult {
    std::vector<XY> positions;  // one per query; meaningful only where kept
    std::vector<bool> kept;     // false = query outside GNSS coverage
};

// Piecewise-linear east/north at the query times; queries outside
// [first fix, last fix] are masked out.
InterpolationResult interpolate_positions(const std::vector<synth::GnssFix>& fixes,
                                          const std::vector<std::int64_t>& query_utc_ms);

struct GeodeticFix {
    std::int64_t utc_ms = 0;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double accuracy_m = 0.0;
};

// Equirectangular projection about the first fix.
std::vector<synth::GnssFix> geodetic_to_local(const std::vector<GeodeticFix>& fixes);

enum class Split { train, validation, test };

const char* to_string(Split split);
Split split_from_string(const std::string& s);

struct Dataset {
    Split split = Split::train;
    int feature_width = kFeatureWidth;
    std::vector<std::int64_t> utc_ms;  // N, nondecreasing
    std::vector<double> targets;       // N x 2 local XY meters
    std::vector<double> features;      // N x feature_width
    double normalizer_max = 0.0;
    // provenance: sessions the rows came from / the normalizer was fitted on
    std::vector<std::string> sessions;
    std::vector<std::string> normalizer_sessions;

    std::size_t n_rows() const { return utc_ms.size(); }
};

// Per-row pipeline product before normalization: assemble, forward-fill,
// amplitude, UE-antenna average, GNSS sync with out-of-coverage rows dropped.
struct RowBlock {
    std::vector<std::int64_t> utc_ms;
    std::vector<double> targets;     // N x 2
    std::vector<double> amplitudes;  // N x 192

    std::size_t n_rows() const { return utc_ms.size(); }
};

RowBlock build_rows(const srslog::SrsLog& log, const std::vector<synth::GnssFix>& gnss);

// Feature rows without targets (inference over a bare log).
RowBlock build_rows_unlabeled(const srslog::SrsLog& log);

Dataset finalize_dataset(const RowBlock& rows, const Normalizer& normalizer, Split split,
                         bool use_root_features);

struct BuildResult {
    Dataset dataset;
    Normalizer normalizer;
};

// Full single-session build. When `normalizer` is null the split must be
// train and the normalizer is fitted on this session's amplitudes.
BuildResult build_dataset(const srslog::SrsLog& log, const std::vector<synth::GnssFix>& gnss,
                          const Normalizer* normalizer, Split split,
                          bool use_root_features = true);

// Fresh i.i.d. Gaussian target noise per (seed, epoch); sigma 0 is identity.
void inject_target_noise(std::span<double> targets_xy, double sigma_m, std::uint64_t seed,
                         std::uint64_t epoch);

void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

// GNSS CSV with header utc_ms,east_m,north_m,accuracy_m; a geodetic header
// utc_ms,lat_deg,lon_deg,accuracy_m is accepted on read and converted about
// the first fix.
void write_gnss_csv(const std::vector<synth::GnssFix>& fixes, const std::string& path);
std::vector<synth::GnssFix> read_gnss_csv(const std::string& path);

}  // namespace srspos::pipeline
