#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srspos/errors.hpp"
#include "srspos/pipeline.hpp"

namespace srspos::pipeline {

namespace {

constexpr char kDatasetMagic[] = "# srspos-dataset v1";

void append_double(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

double parse_double(std::string_view field, const std::string& context) {
    double v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw format_error(context + ": invalid number '" + std::string(field) + "'");
    }
    return v;
}

std::int64_t parse_int64(std::string_view field, const std::string& context) {
    std::int64_t v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw format_error(context + ": invalid integer '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        out += names[i];
    }
    return out;
}

std::vector<std::string> split_names(const std::string& joined) {
    std::vector<std::string> names;
    if (joined.empty()) {
        return names;
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = joined.find(',', start);
        if (comma == std::string::npos) {
            names.push_back(joined.substr(start));
            return names;
        }
        names.push_back(joined.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
    for (std::size_t i = 1; i < ds.n_rows(); ++i) {
        if (ds.utc_ms[i] < ds.utc_ms[i - 1]) {
            throw validation_error("dataset rows must be time-ordered");
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create dataset file '" + path + "'");
    }
    std::string header;
    header += kDatasetMagic;
    header += "\n# split=";
    header += to_string(ds.split);
    header += "\n# feature_width=" + std::to_string(ds.feature_width);
    header += "\n# normalizer_max=";
    append_double(header, ds.normalizer_max);
    header += "\n# sessions=" + join_names(ds.sessions);
    header += "\n# normalizer_sessions=" + join_names(ds.normalizer_sessions);
    header += "\nutc_ms,x_m,y_m";
    for (int f = 0; f < ds.feature_width; ++f) {
        header += ",f" + std::to_string(f);
    }
    header += "\n";
    out << header;

    std::string line;
    const auto width = static_cast<std::size_t>(ds.feature_width);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        line.clear();
        line += std::to_string(ds.utc_ms[r]);
        line.push_back(',');
        append_double(line, ds.targets[2 * r]);
        line.push_back(',');
        append_double(line, ds.targets[2 * r + 1]);
        for (std::size_t f = 0; f < width; ++f) {
            line.push_back(',');
            append_double(line, ds.features[r * width + f]);
        }
        line.push_back('\n');
        out << line;
    }
    out.flush();
    if (!out) {
        throw io_error("failed writing dataset file '" + path + "'");
    }
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open dataset file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != kDatasetMagic) {
        throw format_error("dataset file '" + path + "' has an unsupported header");
    }

    Dataset ds;
    bool have_split = false;
    bool have_width = false;
    bool have_max = false;
    while (in.peek() == '#') {
        std::getline(in, line);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || line.size() < 3) {
            throw format_error("dataset header line '" + line + "' is malformed");
        }
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        if (key == "split") {
            ds.split = split_from_string(value);
            have_split = true;
        } else if (key == "feature_width") {
            ds.feature_width = static_cast<int>(parse_int64(value, "feature_width"));
            have_width = true;
        } else if (key == "normalizer_max") {
            ds.normalizer_max = parse_double(value, "normalizer_max");
            have_max = true;
        } else if (key == "sessions") {
            ds.sessions = split_names(value);
        } else if (key == "normalizer_sessions") {
            ds.normalizer_sessions = split_names(value);
        } else {
            throw format_error("unknown dataset header key '" + key + "'");
        }
    }
    if (!have_split || !have_width || !have_max) {
        throw format_error("dataset file '" + path + "' is missing header fields");
    }
    if (ds.feature_width <= 0) {
        throw format_error("dataset feature width must be positive");
    }
    if (!std::getline(in, line)) {
        throw format_error("dataset file '" + path + "' is truncated before the column header");
    }

    const auto width = static_cast<std::size_t>(ds.feature_width);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 3 + width) {
            throw format_error("dataset row " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(3 + width));
        }
        const std::string ctx = "dataset row " + std::to_string(line_no);
        ds.utc_ms.push_back(parse_int64(fields[0], ctx));
        ds.targets.push_back(parse_double(fields[1], ctx));
        ds.targets.push_back(parse_double(fields[2], ctx));
        for (std::size_t f = 0; f < width; ++f) {
            ds.features.push_back(parse_double(fields[3 + f], ctx));
        }
    }
    for (std::size_t i = 1; i < ds.n_rows(); ++i) {
        if (ds.utc_ms[i] < ds.utc_ms[i - 1]) {
            throw validation_error("dataset rows must be time-ordered");
        }
    }
    return ds;
}

void write_gnss_csv(const std::vector<synth::GnssFix>& fixes, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create GNSS file '" + path + "'");
    }
    out << "utc_ms,east_m,north_m,accuracy_m\n";
    std::string line;
    for (const synth::GnssFix& f : fixes) {
        line.clear();
        line += std::to_string(f.utc_ms);
        line.push_back(',');
        append_double(line, f.east_m);
        line.push_back(',');
        append_double(line, f.north_m);
        line.push_back(',');
        append_double(line, f.accuracy_m);
        line.push_back('\n');
        out << line;
    }
    out.flush();
    if (!out) {
        throw io_error("failed writing GNSS file '" + path + "'");
    }
}

std::vector<synth::GnssFix> read_gnss_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open GNSS file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw format_error("GNSS file '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    bool geodetic = false;
    if (line == "utc_ms,east_m,north_m,accuracy_m") {
        geodetic = false;
    } else if (line == "utc_ms,lat_deg,lon_deg,accuracy_m") {
        geodetic = true;
    } else {
        throw format_error("GNSS file '" + path + "' has an unknown column header");
    }

    std::vector<synth::GnssFix> local;
    std::vector<GeodeticFix> geo;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw format_error("GNSS line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected 4");
        }
        const std::string ctx = "GNSS line " + std::to_string(line_no);
        const std::int64_t utc = parse_int64(fields[0], ctx);
        const double a = parse_double(fields[1], ctx);
        const double b = parse_double(fields[2], ctx);
        const double acc = parse_double(fields[3], ctx);
        if (!(acc > 0.0)) {
            throw validation_error(ctx + ": accuracy must be positive");
        }
        if (geodetic) {
            geo.push_back({utc, a, b, acc});
        } else {
            local.push_back({utc, a, b, acc});
        }
    }
    if (geodetic) {
        return geodetic_to_local(geo);
    }
    return local;
}

}  // namespace srspos::pipeline
