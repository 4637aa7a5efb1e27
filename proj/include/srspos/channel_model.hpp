#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "srspos/scenario.hpp"

namespace srspos::synth {

inline constexpr int kArraySide = 8;
inline constexpr int kBeamCount = kArraySide * kArraySide;

// Spatially correlated Gaussian field in dB: seeded white grid smoothed with a
// Gaussian kernel of the configured correlation length, rescaled to sigma_db,
// sampled bilinearly.
class ShadowField {
  public:
    ShadowField() = default;
    ShadowField(double half_extent_m, double correlation_m, double sigma_db,
                std::uint64_t seed);

    double value_db(double x, double y) const;
    double half_extent_m() const { return half_extent_; }

  private:
    double half_extent_ = 0.0;
    double spacing_ = 1.0;
    int side_ = 0;
    std::vector<double> grid_;
};

// Geometric beam-domain forward model. For one (channel, UE antenna) the
// element response is the complex sum over the direct path and the reflector
// paths of (path gain x planar-array steering response); beams are the unitary
// 2-D DFT of the 8x8 element grid; per-beam magnitudes are scaled by the
// per-channel shadowing field.
class ChannelModel {
  public:
    explicit ChannelModel(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }

    // 8x8 nonnegative per-beam magnitudes, row-major
    std::array<double, kBeamCount> beam_amplitudes(Vec2 ue_position, int channel_index,
                                                   int ue_antenna_index) const;

    // UE antenna position for a given antenna index (small deterministic
    // offsets around the UE point; the per-antenna perturbation)
    Vec3 ue_antenna_position(Vec2 ue_position, int ue_antenna_index) const;

    bool direct_path_blocked(const Vec3& ue) const;

  private:
    Scenario scenario_;
    std::array<ShadowField, 3> shadow_;
};

}  // namespace srspos::synth
