#include "srspos/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srspos/errors.hpp"
#include "srspos/rng.hpp"

namespace srspos::synth {

namespace {

// small planar offsets (meters) of the four UE antennas around the UE point
constexpr double kUeAntennaRadius = 0.03;
constexpr double kUeAntennaOffsets[4][2] = {
    {kUeAntennaRadius, 0.0},
    {0.0, kUeAntennaRadius},
    {-kUeAntennaRadius, 0.0},
    {0.0, -kUeAntennaRadius},
};

// per-antenna gain perturbation
constexpr double kUeAntennaGain[4] = {1.00, 0.97, 1.02, 0.98};

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Path {
    std::complex<double> gain;
    Vec3 direction;  // unit vector at the BS
};

// segment-vs-AABB slab test over t in [0, 1]
bool segment_hits_box(const Vec3& p0, const Vec3& p1, const BlockerBox& box) {
    double t_lo = 0.0;
    double t_hi = 1.0;
    const double d[3] = {p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};
    const double o[3] = {p0.x, p0.y, p0.z};
    const double lo[3] = {box.min_corner.x, box.min_corner.y, box.min_corner.z};
    const double hi[3] = {box.max_corner.x, box.max_corner.y, box.max_corner.z};
    for (int axis = 0; axis < 3; ++axis) {
        if (std::abs(d[axis]) < 1e-12) {
            if (o[axis] < lo[axis] || o[axis] > hi[axis]) {
                return false;
            }
            continue;
        }
        double t0 = (lo[axis] - o[axis]) / d[axis];
        double t1 = (hi[axis] - o[axis]) / d[axis];
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        if (t_lo > t_hi) {
            return false;
        }
    }
    return true;
}

}  // namespace

ShadowField::ShadowField(double half_extent_m, double correlation_m, double sigma_db,
                         std::uint64_t seed)
    : half_extent_(half_extent_m) {
    spacing_ = std::max(correlation_m / 3.0, half_extent_m / 400.0);
    side_ = 2 * static_cast<int>(std::ceil(half_extent_m / spacing_)) + 1;
    grid_.assign(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), 0.0);
    if (sigma_db <= 0.0) {
        return;
    }

    std::vector<double> white(grid_.size());
    Rng rng(seed);
    for (double& v : white) {
        v = rng.normal();
    }

    // separable Gaussian blur, kernel sigma = correlation length
    const double sigma_cells = correlation_m / spacing_;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_cells));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (int k = -radius; k <= radius; ++k) {
        kernel[static_cast<std::size_t>(k + radius)] =
            std::exp(-0.5 * (k / sigma_cells) * (k / sigma_cells));
    }

    const int side = side_;
    std::vector<double> tmp(grid_.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int cc = c + k;
                if (cc < 0 || cc >= side) {
                    continue;
                }
                acc += kernel[static_cast<std::size_t>(k + radius)] *
                       white[static_cast<std::size_t>(r) * static_cast<std::size_t>(side) +
                             static_cast<std::size_t>(cc)];
            }
            tmp[static_cast<std::size_t>(r) * static_cast<std::size_t>(side) +
                static_cast<std::size_t>(c)] = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int c = 0; c < side; ++c) {
        for (int r = 0; r < side; ++r) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int rr = r + k;
                if (rr < 0 || rr >= side) {
                    continue;
                }
                acc += kernel[static_cast<std::size_t>(k + radius)] *
                       tmp[static_cast<std::size_t>(rr) * static_cast<std::size_t>(side) +
                           static_cast<std::size_t>(c)];
            }
            grid_[static_cast<std::size_t>(r) * static_cast<std::size_t>(side) +
                  static_cast<std::size_t>(c)] = acc;
        }
    }

    // rescale the smoothed field to the requested dB standard deviation
    double mean = 0.0;
    for (double v : grid_) {
        mean += v;
    }
    mean /= static_cast<double>(grid_.size());
    double var = 0.0;
    for (double v : grid_) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(grid_.size());
    const double std_dev = std::sqrt(var);
    if (std_dev <= 0.0) {
        std::fill(grid_.begin(), grid_.end(), 0.0);
        return;
    }
    for (double& v : grid_) {
        v = (v - mean) / std_dev * sigma_db;
    }
}

double ShadowField::value_db(double x, double y) const {
    if (grid_.empty() || side_ < 2) {
        return 0.0;
    }
    const double fx = (x + half_extent_) / spacing_;
    const double fy = (y + half_extent_) / spacing_;
    const int max_cell = side_ - 2;
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, max_cell);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, max_cell);
    const double wx = std::clamp(fx - ix, 0.0, 1.0);
    const double wy = std::clamp(fy - iy, 0.0, 1.0);
    const auto at = [&](int r, int c) {
        return grid_[static_cast<std::size_t>(r) * static_cast<std::size_t>(side_) +
                     static_cast<std::size_t>(c)];
    };
    const double v0 = at(iy, ix) * (1.0 - wx) + at(iy, ix + 1) * wx;
    const double v1 = at(iy + 1, ix) * (1.0 - wx) + at(iy + 1, ix + 1) * wx;
    return v0 * (1.0 - wy) + v1 * wy;
}

ChannelModel::ChannelModel(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    for (int c = 0; c < 3; ++c) {
        shadow_[static_cast<std::size_t>(c)] =
            ShadowField(scenario_.region_half_extent_m, scenario_.shadowing.correlation_m,
                        scenario_.shadowing.sigma_db,
                        derive_seed(scenario_.seed, 101 + static_cast<std::uint64_t>(c)));
    }
}

Vec3 ChannelModel::ue_antenna_position(Vec2 ue_position, int ue_antenna_index) const {
    const auto& off = kUeAntennaOffsets[ue_antenna_index];
    return {ue_position.x + off[0], ue_position.y + off[1], scenario_.ue_height_m};
}

bool ChannelModel::direct_path_blocked(const Vec3& ue) const {
    for (const BlockerBox& box : scenario_.blockers) {
        if (segment_hits_box(scenario_.bs_position, ue, box)) {
            return true;
        }
    }
    return false;
}

std::array<double, kBeamCount> ChannelModel::beam_amplitudes(Vec2 ue_position, int channel_index,
                                                             int ue_antenna_index) const {
    if (channel_index < 0 || channel_index >= 3) {
        throw validation_error("channel_index outside [0, 2]");
    }
    if (ue_antenna_index < 0 || ue_antenna_index >= 4) {
        throw validation_error("ue_antenna_index outside [0, 3]");
    }
    if (std::abs(ue_position.x) > scenario_.region_half_extent_m ||
        std::abs(ue_position.y) > scenario_.region_half_extent_m) {
        throw validation_error("UE position outside the scenario region");
    }

    const Vec3 ue = ue_antenna_position(ue_position, ue_antenna_index);
    const Vec3 bs = scenario_.bs_position;
    const double wavelength = scenario_.wavelength_m(channel_index);
    const double wavenumber = 2.0 * std::numbers::pi / wavelength;
    const double ref = scenario_.reference_amplitude * scenario_.reference_distance_m;

    std::vector<Path> paths;
    paths.reserve(1 + scenario_.reflectors.size());

    const Vec3 to_ue = sub(ue, bs);
    const double d_direct = norm(to_ue);
    if (d_direct < 1e-6) {
        throw validation_error("singular geometry: UE coincides with the BS");
    }
    if (!direct_path_blocked(ue)) {
        const double amp = ref / d_direct;
        paths.push_back({std::polar(amp, -wavenumber * d_direct),
                         {to_ue.x / d_direct, to_ue.y / d_direct, to_ue.z / d_direct}});
    }
    for (const Reflector& r : scenario_.reflectors) {
        const Vec3 to_refl = sub(r.position, bs);
        const double d1 = norm(to_refl);
        const double d2 = norm(sub(ue, r.position));
        if (d2 < 1e-6) {
            throw validation_error("singular geometry: UE coincides with a reflector");
        }
        const double total = d1 + d2;
        const double amp = ref * r.loss / total;
        paths.push_back({std::polar(amp, -wavenumber * total),
                         {to_refl.x / d1, to_refl.y / d1, to_refl.z / d1}});
    }

    // element responses of the 8x8 array (x horizontal, z vertical, boresight +y)
    const double spacing = scenario_.element_spacing_m();
    std::array<std::complex<double>, kBeamCount> element{};
    for (const Path& p : paths) {
        for (int m = 0; m < kArraySide; ++m) {
            const double px = (m - 3.5) * spacing;
            for (int n = 0; n < kArraySide; ++n) {
                const double pz = (n - 3.5) * spacing;
                const double phase = wavenumber * (px * p.direction.x + pz * p.direction.z);
                element[static_cast<std::size_t>(m * kArraySide + n)] +=
                    p.gain * std::polar(1.0, phase);
            }
        }
    }

    // unitary 2-D DFT into the beam grid
    std::array<std::complex<double>, 8> twiddle;
    for (int q = 0; q < 8; ++q) {
        twiddle[static_cast<std::size_t>(q)] =
            std::polar(1.0, -2.0 * std::numbers::pi * q / 8.0);
    }
    const double antenna_gain = kUeAntennaGain[ue_antenna_index];
    const double shadow_db =
        shadow_[static_cast<std::size_t>(channel_index)].value_db(ue_position.x, ue_position.y);
    const double shadow_gain = std::pow(10.0, shadow_db / 20.0);

    std::array<double, kBeamCount> magnitudes{};
    for (int i = 0; i < kArraySide; ++i) {
        for (int j = 0; j < kArraySide; ++j) {
            std::complex<double> acc{0.0, 0.0};
            for (int m = 0; m < kArraySide; ++m) {
                for (int n = 0; n < kArraySide; ++n) {
                    acc += element[static_cast<std::size_t>(m * kArraySide + n)] *
                           twiddle[static_cast<std::size_t>((m * i + n * j) % 8)];
                }
            }
            magnitudes[static_cast<std::size_t>(i * kArraySide + j)] =
                std::abs(acc) / 8.0 * antenna_gain * shadow_gain;
        }
    }
    return magnitudes;
}

}  // namespace srspos::synth
