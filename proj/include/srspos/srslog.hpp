#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace srspos::srslog {

inline constexpr int kBeamRows = 8;
inline constexpr int kBeamCols = 8;
inline constexpr int kGainsPerRecord = kBeamRows * kBeamCols;
inline constexpr int kChannelCount = 3;   // lowest, middle, highest sub-channel
inline constexpr int kUeAntennaCount = 4;
inline constexpr int kPairCount = kChannelCount * kUeAntennaCount;
inline constexpr int kSfnPeriod = 1024;
inline constexpr double kFixedScale = 32768.0;

// One complex channel gain in Q15 fixed point: 16-bit two's complement raw
// components, value = raw / 32768, hence in [-1, 1).
struct FixedComplex {
    std::int16_t re = 0;
    std::int16_t im = 0;

    double real_value() const { return static_cast<double>(re) / kFixedScale; }
    double imag_value() const { return static_cast<double>(im) / kFixedScale; }
    std::complex<double> value() const { return {real_value(), imag_value()}; }

    bool operator==(const FixedComplex&) const = default;
};

// One log line: the channel estimate of a single (frequency channel, UE
// antenna) pair over the 8x8 BS beam grid, row-major.
struct SrsRecord {
    std::int64_t utc_ms = 0;
    int sfn = 0;         // [0, 1023]
    int pair_index = 0;  // channel * 4 + antenna, [0, 11]
    std::array<FixedComplex, kGainsPerRecord> gains{};

    void validate() const;
    bool operator==(const SrsRecord&) const = default;
};

// Records in nondecreasing utc order. Ties are legal: one SRS occasion emits
// up to twelve records sharing a timestamp.
struct SrsLog {
    std::vector<SrsRecord> records;

    bool operator==(const SrsLog&) const = default;
};

// "RRRRIIII": real then imaginary raw component, 4 uppercase hex digits each.
FixedComplex decode_gain(std::string_view hex8);
std::string encode_gain(FixedComplex g);

// Line format: <utc_ms>,<sfn>,<pair_index>,<g0>,...,<g63>
SrsLog parse_log(std::istream& in);
void write_log(const SrsLog& log, std::ostream& out);

SrsLog read_log_file(const std::string& path);
void write_log_file(const SrsLog& log, const std::string& path);

}  // namespace srspos::srslog
