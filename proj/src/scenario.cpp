#include "srspos/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "srspos/errors.hpp"

namespace srspos::synth {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) {
            throw config_error("unknown key '" + path + key + "'");
        }
    }
}

Vec3 parse_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) {
        throw config_error("'" + path + "' must be an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 parse_vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
        throw config_error("'" + path + "' must be an array of 2 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

double Scenario::wavelength_m(int channel) const {
    return kSpeedOfLight / channel_frequencies_hz[static_cast<std::size_t>(channel)];
}

double Scenario::element_spacing_m() const {
    return 0.5 * kSpeedOfLight / center_frequency_hz;
}

void Scenario::validate() const {
    if (center_frequency_hz <= 0.0 || bandwidth_hz <= 0.0) {
        throw config_error("center_frequency_hz and bandwidth_hz must be positive");
    }
    if (!(channel_frequencies_hz[0] < channel_frequencies_hz[1] &&
          channel_frequencies_hz[1] < channel_frequencies_hz[2])) {
        throw config_error("channel_frequencies_hz must be strictly increasing");
    }
    for (double f : channel_frequencies_hz) {
        if (f <= 0.0) {
            throw config_error("channel frequencies must be positive");
        }
    }
    if (shadowing.correlation_m <= 0.0) {
        throw config_error("shadowing.correlation_m must be > 0");
    }
    if (shadowing.sigma_db < 0.0) {
        throw config_error("shadowing.sigma_db must be >= 0");
    }
    if (reference_amplitude <= 0.0 || reference_amplitude >= 1.0) {
        throw config_error("reference_amplitude must be in (0, 1)");
    }
    if (reference_distance_m <= 0.0) {
        throw config_error("reference_distance_m must be > 0");
    }
    if (region_half_extent_m <= 0.0) {
        throw config_error("region_half_extent_m must be > 0");
    }
    for (std::size_t i = 0; i < reflectors.size(); ++i) {
        const Reflector& r = reflectors[i];
        if (r.loss <= 0.0 || r.loss > 1.0) {
            throw config_error("reflectors[" + std::to_string(i) + "].loss must be in (0, 1]");
        }
        const double dx = r.position.x - bs_position.x;
        const double dy = r.position.y - bs_position.y;
        const double dz = r.position.z - bs_position.z;
        if (std::sqrt(dx * dx + dy * dy + dz * dz) < 1e-6) {
            throw config_error("reflectors[" + std::to_string(i) + "] coincides with the BS");
        }
    }
    for (std::size_t i = 0; i < blockers.size(); ++i) {
        const BlockerBox& b = blockers[i];
        if (b.min_corner.x > b.max_corner.x || b.min_corner.y > b.max_corner.y ||
            b.min_corner.z > b.max_corner.z) {
            throw config_error("blockers[" + std::to_string(i) +
                               "]: min_corner must not exceed max_corner");
        }
    }
    if (gnss_accuracy_mean_m <= 0.0 || gnss_accuracy_spread_m < 0.0 ||
        gnss_accuracy_mean_m - gnss_accuracy_spread_m <= 0.0) {
        throw config_error("GNSS accuracy must stay positive over mean +- spread");
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open scenario file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("scenario file '" + path + "': " + e.what());
    }

    Scenario sc;
    try {
        reject_unknown_keys(
            j,
            {"bs_position", "center_frequency_hz", "bandwidth_hz", "channel_frequencies_hz",
             "ue_height_m", "reference_amplitude", "reference_distance_m", "reflectors",
             "blockers", "shadowing", "region_half_extent_m", "walk_area", "path",
             "gnss_accuracy_mean_m", "gnss_accuracy_spread_m", "seed"},
            "");
        if (j.contains("bs_position")) sc.bs_position = parse_vec3(j["bs_position"], "bs_position");
        if (j.contains("center_frequency_hz")) sc.center_frequency_hz = j["center_frequency_hz"];
        if (j.contains("bandwidth_hz")) sc.bandwidth_hz = j["bandwidth_hz"];
        if (j.contains("channel_frequencies_hz")) {
            const json& cf = j["channel_frequencies_hz"];
            if (!cf.is_array() || cf.size() != 3) {
                throw config_error("'channel_frequencies_hz' must hold exactly 3 frequencies");
            }
            for (int c = 0; c < 3; ++c) {
                sc.channel_frequencies_hz[static_cast<std::size_t>(c)] = cf[static_cast<std::size_t>(c)];
            }
        }
        if (j.contains("ue_height_m")) sc.ue_height_m = j["ue_height_m"];
        if (j.contains("reference_amplitude")) sc.reference_amplitude = j["reference_amplitude"];
        if (j.contains("reference_distance_m")) sc.reference_distance_m = j["reference_distance_m"];
        if (j.contains("reflectors")) {
            for (std::size_t i = 0; i < j["reflectors"].size(); ++i) {
                const json& rj = j["reflectors"][i];
                const std::string rpath = "reflectors[" + std::to_string(i) + "].";
                reject_unknown_keys(rj, {"position", "loss"}, rpath);
                Reflector r;
                r.position = parse_vec3(rj.at("position"), rpath + "position");
                if (rj.contains("loss")) r.loss = rj["loss"];
                sc.reflectors.push_back(r);
            }
        }
        if (j.contains("blockers")) {
            for (std::size_t i = 0; i < j["blockers"].size(); ++i) {
                const json& bj = j["blockers"][i];
                const std::string bpath = "blockers[" + std::to_string(i) + "].";
                reject_unknown_keys(bj, {"min_corner", "max_corner"}, bpath);
                BlockerBox b;
                b.min_corner = parse_vec3(bj.at("min_corner"), bpath + "min_corner");
                b.max_corner = parse_vec3(bj.at("max_corner"), bpath + "max_corner");
                sc.blockers.push_back(b);
            }
        }
        if (j.contains("shadowing")) {
            const json& sj = j["shadowing"];
            reject_unknown_keys(sj, {"sigma_db", "correlation_m"}, "shadowing.");
            if (sj.contains("sigma_db")) sc.shadowing.sigma_db = sj["sigma_db"];
            if (sj.contains("correlation_m")) sc.shadowing.correlation_m = sj["correlation_m"];
        }
        if (j.contains("region_half_extent_m")) sc.region_half_extent_m = j["region_half_extent_m"];
        if (j.contains("walk_area")) {
            const json& wj = j["walk_area"];
            reject_unknown_keys(wj, {"center", "side_m"}, "walk_area.");
            if (wj.contains("center")) sc.walk_area.center = parse_vec2(wj["center"], "walk_area.center");
            if (wj.contains("side_m")) sc.walk_area.side_m = wj["side_m"];
        }
        if (j.contains("path")) {
            const json& pj = j["path"];
            reject_unknown_keys(pj, {"a", "b"}, "path.");
            if (pj.contains("a")) sc.path.a = parse_vec2(pj["a"], "path.a");
            if (pj.contains("b")) sc.path.b = parse_vec2(pj["b"], "path.b");
        }
        if (j.contains("gnss_accuracy_mean_m")) sc.gnss_accuracy_mean_m = j["gnss_accuracy_mean_m"];
        if (j.contains("gnss_accuracy_spread_m")) sc.gnss_accuracy_spread_m = j["gnss_accuracy_spread_m"];
        if (j.contains("seed")) sc.seed = j["seed"];
    } catch (const json::exception& e) {
        throw config_error("scenario file '" + path + "': " + e.what());
    }

    sc.validate();
    return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    json j;
    j["bs_position"] = {sc.bs_position.x, sc.bs_position.y, sc.bs_position.z};
    j["center_frequency_hz"] = sc.center_frequency_hz;
    j["bandwidth_hz"] = sc.bandwidth_hz;
    j["channel_frequencies_hz"] = sc.channel_frequencies_hz;
    j["ue_height_m"] = sc.ue_height_m;
    j["reference_amplitude"] = sc.reference_amplitude;
    j["reference_distance_m"] = sc.reference_distance_m;
    j["reflectors"] = json::array();
    for (const Reflector& r : sc.reflectors) {
        j["reflectors"].push_back(
            {{"position", {r.position.x, r.position.y, r.position.z}}, {"loss", r.loss}});
    }
    j["blockers"] = json::array();
    for (const BlockerBox& b : sc.blockers) {
        j["blockers"].push_back(
            {{"min_corner", {b.min_corner.x, b.min_corner.y, b.min_corner.z}},
             {"max_corner", {b.max_corner.x, b.max_corner.y, b.max_corner.z}}});
    }
    j["shadowing"] = {{"sigma_db", sc.shadowing.sigma_db},
                      {"correlation_m", sc.shadowing.correlation_m}};
    j["region_half_extent_m"] = sc.region_half_extent_m;
    j["walk_area"] = {{"center", {sc.walk_area.center.x, sc.walk_area.center.y}},
                      {"side_m", sc.walk_area.side_m}};
    j["path"] = {{"a", {sc.path.a.x, sc.path.a.y}}, {"b", {sc.path.b.x, sc.path.b.y}}};
    j["gnss_accuracy_mean_m"] = sc.gnss_accuracy_mean_m;
    j["gnss_accuracy_spread_m"] = sc.gnss_accuracy_spread_m;
    j["seed"] = sc.seed;

    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create scenario file '" + path + "'");
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw io_error("failed writing scenario file '" + path + "'");
    }
}

}  // namespace srspos::synth
