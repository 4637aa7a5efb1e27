#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace srspos::synth {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Point scatterer; the BS sees its reflected energy arriving from the
// reflector direction. loss is an amplitude factor in (0, 1].
struct Reflector {
    Vec3 position;
    double loss = 0.3;
};

// Axis-aligned box that blocks the direct BS-UE ray only; reflector paths are
// unaffected.
struct BlockerBox {
    Vec3 min_corner;
    Vec3 max_corner;
};

struct Shadowing {
    double sigma_db = 3.0;
    double correlation_m = 15.0;  // > 0
};

struct SquareArea {
    Vec2 center;
    double side_m = 50.0;
};

struct PathSegment {
    Vec2 a;
    Vec2 b;
};

// Desk-scale substitute for the measurement environment: an 8x8 half-wavelength
// planar array on a rooftop BS, three carrier frequencies spanning the band,
// point reflectors, optional blockers and a correlated log-normal shadowing
// field.
struct Scenario {
    Vec3 bs_position{0.0, 0.0, 20.0};
    double center_frequency_hz = 3.85e9;
    double bandwidth_hz = 100e6;
    // lowest, middle, highest sub-channel; strictly increasing
    std::array<double, 3> channel_frequencies_hz{3.80e9, 3.85e9, 3.90e9};
    double ue_height_m = 1.5;
    // direct-path amplitude at reference_distance_m, before shadowing
    double reference_amplitude = 0.05;
    double reference_distance_m = 20.0;
    std::vector<Reflector> reflectors;
    std::vector<BlockerBox> blockers;
    Shadowing shadowing;
    // half-extent of the simulated region around the BS; trajectories and the
    // shadowing field must stay inside
    double region_half_extent_m = 250.0;

    // default trajectory geometry for generated sessions
    SquareArea walk_area{{0.0, 70.0}, 50.0};
    PathSegment path{{-25.0, 70.0}, {25.0, 70.0}};

    double gnss_accuracy_mean_m = 3.5;
    double gnss_accuracy_spread_m = 0.5;  // accuracy drawn from mean +- spread

    std::uint64_t seed = 1;

    double wavelength_m(int channel) const;
    double element_spacing_m() const;  // half wavelength at the center frequency

    void validate() const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

}  // namespace srspos::synth
