#include "srspos/srslog.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "srspos/errors.hpp"

namespace srspos::srslog {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

constexpr char kHexDigits[] = "0123456789ABCDEF";

void append_hex16(std::string& out, std::uint16_t v) {
    out.push_back(kHexDigits[(v >> 12) & 0xF]);
    out.push_back(kHexDigits[(v >> 8) & 0xF]);
    out.push_back(kHexDigits[(v >> 4) & 0xF]);
    out.push_back(kHexDigits[v & 0xF]);
}

template <typename T>
T parse_int_field(std::string_view field, std::size_t line_no, const char* name) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw format_error("line " + std::to_string(line_no) + ": invalid " + name + " field '" +
                           std::string(field) + "'");
    }
    return value;
}

}  // namespace

void SrsRecord::validate() const {
    if (sfn < 0 || sfn >= kSfnPeriod) {
        throw validation_error("sfn " + std::to_string(sfn) + " outside [0, 1023]");
    }
    if (pair_index < 0 || pair_index >= kPairCount) {
        throw validation_error("pair_index " + std::to_string(pair_index) + " outside [0, 11]");
    }
}

FixedComplex decode_gain(std::string_view hex8) {
    if (hex8.size() != 8) {
        throw format_error("gain field has length " + std::to_string(hex8.size()) +
                           ", expected 8 hex digits");
    }
    std::uint32_t raw = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        const int d = hex_digit(hex8[i]);
        if (d < 0) {
            throw format_error(std::string("non-hex character '") + hex8[i] +
                               "' at byte offset " + std::to_string(i));
        }
        raw = (raw << 4) | static_cast<std::uint32_t>(d);
    }
    FixedComplex g;
    g.re = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw >> 16));
    g.im = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw & 0xFFFF));
    return g;
}

std::string encode_gain(FixedComplex g) {
    std::string out;
    out.reserve(8);
    append_hex16(out, static_cast<std::uint16_t>(g.re));
    append_hex16(out, static_cast<std::uint16_t>(g.im));
    return out;
}

SrsLog parse_log(std::istream& in) {
    SrsLog log;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t prev_utc = 0;
    bool have_prev = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }

        // split on commas; expect utc, sfn, pair_index and 64 gain fields
        std::array<std::string_view, 3 + kGainsPerRecord> fields;
        std::size_t field_count = 0;
        std::size_t start = 0;
        const std::string_view sv(line);
        while (true) {
            const std::size_t comma = sv.find(',', start);
            const std::string_view field =
                comma == std::string_view::npos ? sv.substr(start) : sv.substr(start, comma - start);
            if (field_count >= fields.size()) {
                throw format_error("line " + std::to_string(line_no) + ": too many fields");
            }
            fields[field_count++] = field;
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (field_count != fields.size()) {
            throw format_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(fields.size()) + " fields, got " +
                               std::to_string(field_count));
        }

        SrsRecord rec;
        rec.utc_ms = parse_int_field<std::int64_t>(fields[0], line_no, "utc_ms");
        rec.sfn = parse_int_field<int>(fields[1], line_no, "sfn");
        rec.pair_index = parse_int_field<int>(fields[2], line_no, "pair_index");
        try {
            rec.validate();
        } catch (const validation_error& e) {
            throw validation_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        for (int g = 0; g < kGainsPerRecord; ++g) {
            try {
                rec.gains[static_cast<std::size_t>(g)] = decode_gain(fields[3 + g]);
            } catch (const format_error& e) {
                throw format_error("line " + std::to_string(line_no) + ", gain " +
                                   std::to_string(g) + ": " + e.what());
            }
        }
        if (have_prev && rec.utc_ms < prev_utc) {
            throw validation_error("line " + std::to_string(line_no) +
                                   ": utc_ms decreases from " + std::to_string(prev_utc) +
                                   " to " + std::to_string(rec.utc_ms));
        }
        prev_utc = rec.utc_ms;
        have_prev = true;
        log.records.push_back(rec);
    }
    return log;
}

void write_log(const SrsLog& log, std::ostream& out) {
    std::string line;
    line.reserve(32 + 9 * kGainsPerRecord);
    for (const SrsRecord& rec : log.records) {
        line.clear();
        line += std::to_string(rec.utc_ms);
        line.push_back(',');
        line += std::to_string(rec.sfn);
        line.push_back(',');
        line += std::to_string(rec.pair_index);
        for (const FixedComplex& g : rec.gains) {
            line.push_back(',');
            append_hex16(line, static_cast<std::uint16_t>(g.re));
            append_hex16(line, static_cast<std::uint16_t>(g.im));
        }
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        if (!out) {
            throw io_error("failed writing SRS log line");
        }
    }
}

SrsLog read_log_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open SRS log '" + path + "'");
    }
    return parse_log(in);
}

void write_log_file(const SrsLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create SRS log '" + path + "'");
    }
    write_log(log, out);
    out.flush();
    if (!out) {
        throw io_error("failed writing SRS log '" + path + "'");
    }
}

}  // namespace srspos::srslog
