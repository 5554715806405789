#include "trexd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "trexd/errors.hpp"

namespace trexd {

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_mean_std(double mean, double stddev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, stddev);
    return buf;
}

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
    if (image.ndim() != 2) throw DimensionError("PGM export expects a 2-D image");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
    std::vector<unsigned char> row(image.cols());
    for (std::size_t r = 0; r < image.rows(); ++r) {
        for (std::size_t c = 0; c < image.cols(); ++c) {
            const double v = std::clamp(image.at(r, c), 0.0, 1.0);
            row[c] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

Tensor read_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    std::string magic;
    is >> magic;
    if (magic != "P5") throw CorruptFileError(path.string() + ": not a binary PGM");
    std::size_t w = 0, h = 0;
    int maxval = 0;
    is >> w >> h >> maxval;
    if (!is || w == 0 || h == 0 || maxval != 255) throw CorruptFileError(path.string() + ": bad PGM header");
    is.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(w * h);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(is.gcount()) != raw.size())
        throw CorruptFileError(path.string() + ": truncated PGM payload");
    std::vector<double> v(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) v[i] = raw[i] / 255.0;
    return Tensor({h, w}, std::move(v));
}

void ByteWriter::u8(std::uint8_t v) { buf_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
}

void ByteWriter::bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
}

void ByteWriter::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
}

ByteReader ByteReader::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
    return ByteReader(std::move(data));
}

void ByteReader::need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw CorruptFileError("unexpected end of file");
}

std::uint8_t ByteReader::u8() {
    need(1);
    return buf_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * i);
    return v;
}

double ByteReader::f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void ByteReader::bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace trexd
