#include <cstdint>
#include <cstring>
#include <fstream>

#include "srspos/dnn.hpp"
#include "srspos/errors.hpp"

namespace srspos::dnn {

namespace {

constexpr char kMagic[8] = {'S', 'R', 'S', 'P', 'O', 'S', 'C', 'K'};
constexpr char kTrailer[8] = {'S', 'R', 'S', 'P', 'O', 'S', 'N', 'D'};
constexpr std::uint32_t kVersion = 1;

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) {
            throw io_error("cannot create checkpoint '" + path + "'");
        }
    }

    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out_) {
            throw io_error("failed writing checkpoint '" + path_ + "'");
        }
    }

    void u32(std::uint32_t v) { bytes(&v, sizeof v); }
    void i32(std::int32_t v) { bytes(&v, sizeof v); }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void i64(std::int64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { bytes(&v, sizeof v); }
    void u8(std::uint8_t v) { bytes(&v, sizeof v); }

    void doubles(const std::vector<double>& v) {
        u64(v.size());
        bytes(v.data(), v.size() * sizeof(double));
    }

    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    void finish() {
        out_.flush();
        if (!out_) {
            throw io_error("failed writing checkpoint '" + path_ + "'");
        }
    }

  private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
  public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) {
            throw io_error("cannot open checkpoint '" + path + "'");
        }
    }

    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw format_error("truncated checkpoint '" + path_ + "'");
        }
    }

    std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
    std::int32_t i32() { std::int32_t v; bytes(&v, sizeof v); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof v); return v; }
    std::int64_t i64() { std::int64_t v; bytes(&v, sizeof v); return v; }
    double f64() { double v; bytes(&v, sizeof v); return v; }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, sizeof v); return v; }

    std::vector<double> doubles(std::size_t limit) {
        const std::uint64_t n = u64();
        if (n > limit) {
            throw format_error("checkpoint '" + path_ + "' declares an implausible array size");
        }
        std::vector<double> v(n);
        bytes(v.data(), n * sizeof(double));
        return v;
    }

    std::string str() {
        const std::uint32_t n = u32();
        if (n > 4096) {
            throw format_error("checkpoint '" + path_ + "' declares an implausible string size");
        }
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    void expect_eof() {
        char c;
        in_.read(&c, 1);
        if (!in_.eof()) {
            throw format_error("trailing bytes in checkpoint '" + path_ + "'");
        }
    }

  private:
    std::ifstream in_;
    std::string path_;
};

void write_layers(Writer& w, const std::vector<Layer>& layers) {
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (const Layer& l : layers) {
        w.i32(l.in);
        w.i32(l.out);
        w.doubles(l.w);
        w.doubles(l.b);
    }
}

std::vector<Layer> read_layers(Reader& r) {
    const std::uint32_t n = r.u32();
    if (n > 64) {
        throw format_error("checkpoint declares an implausible layer count");
    }
    std::vector<Layer> layers(n);
    for (Layer& l : layers) {
        l.in = r.i32();
        l.out = r.i32();
        if (l.in < 1 || l.out < 1 || l.in > 1 << 20 || l.out > 1 << 20) {
            throw format_error("checkpoint layer has invalid dimensions");
        }
        l.w = r.doubles(static_cast<std::size_t>(l.in) * static_cast<std::size_t>(l.out));
        l.b = r.doubles(static_cast<std::size_t>(l.out));
        if (l.w.size() != static_cast<std::size_t>(l.in) * static_cast<std::size_t>(l.out) ||
            l.b.size() != static_cast<std::size_t>(l.out)) {
            throw format_error("checkpoint layer arrays do not match their dimensions");
        }
    }
    return layers;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kVersion);

    const Architecture& arch = ckpt.net.arch;
    w.u32(static_cast<std::uint32_t>(arch.input_block.size()));
    for (int v : arch.input_block) {
        w.i32(v);
    }
    w.i32(arch.center_layers);
    w.i32(arch.center_width);
    w.u32(static_cast<std::uint32_t>(arch.positioning_block.size()));
    for (int v : arch.positioning_block) {
        w.i32(v);
    }
    w.f64(arch.dropout_hidden);
    w.doubles(arch.dropout_p);

    w.u64(ckpt.net.dropout_seed);
    w.i64(ckpt.net.step);
    write_layers(w, ckpt.net.layers);
    write_layers(w, ckpt.net.moment1);
    write_layers(w, ckpt.net.moment2);

    w.f64(ckpt.normalizer_max);
    w.u8(ckpt.root_features ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(ckpt.sessions_seen.size()));
    for (const std::string& s : ckpt.sessions_seen) {
        w.str(s);
    }
    w.bytes(kTrailer, sizeof kTrailer);
    w.finish();
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw format_error("'" + path + "' is not a checkpoint file");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw format_error("unsupported checkpoint version " + std::to_string(version));
    }

    Checkpoint ckpt;
    Architecture& arch = ckpt.net.arch;
    const std::uint32_t n_input = r.u32();
    if (n_input > 64) {
        throw format_error("checkpoint declares an implausible input block");
    }
    arch.input_block.resize(n_input);
    for (int& v : arch.input_block) {
        v = r.i32();
    }
    arch.center_layers = r.i32();
    arch.center_width = r.i32();
    const std::uint32_t n_pos = r.u32();
    if (n_pos > 64) {
        throw format_error("checkpoint declares an implausible positioning block");
    }
    arch.positioning_block.resize(n_pos);
    for (int& v : arch.positioning_block) {
        v = r.i32();
    }
    arch.dropout_hidden = r.f64();
    arch.dropout_p = r.doubles(64);

    ckpt.net.dropout_seed = r.u64();
    ckpt.net.step = r.i64();
    ckpt.net.layers = read_layers(r);
    ckpt.net.moment1 = read_layers(r);
    ckpt.net.moment2 = read_layers(r);

    ckpt.normalizer_max = r.f64();
    ckpt.root_features = r.u8() != 0;
    const std::uint32_t n_sessions = r.u32();
    if (n_sessions > 4096) {
        throw format_error("checkpoint declares an implausible session count");
    }
    ckpt.sessions_seen.resize(n_sessions);
    for (std::string& s : ckpt.sessions_seen) {
        s = r.str();
    }
    char trailer[8];
    r.bytes(trailer, sizeof trailer);
    if (std::memcmp(trailer, kTrailer, sizeof kTrailer) != 0) {
        throw format_error("checkpoint '" + path + "' is missing its end marker");
    }
    r.expect_eof();

    arch.validate();
    const std::vector<int> widths = arch.widths();
    if (ckpt.net.layers.size() + 1 != widths.size()) {
        throw format_error("checkpoint layers do not match the declared architecture");
    }
    for (std::size_t l = 0; l < ckpt.net.layers.size(); ++l) {
        if (ckpt.net.layers[l].in != widths[l] || ckpt.net.layers[l].out != widths[l + 1]) {
            throw format_error("checkpoint layer " + std::to_string(l) +
                               " does not match the declared architecture");
        }
    }
    return ckpt;
}

}  // namespace srspos::dnn
