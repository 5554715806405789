#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trexd/tensor.hpp"

namespace trexd {

// FNV-1a 64-bit over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xCBF29CE484222325ULL);

// Shortest round-trip style float formatting used by every CSV we emit
// (17 significant digits).
std::string format_double(double v);

// "0.97 ± 0.03" style mean/std cell.
std::string format_mean_std(double mean, double stddev);

// Binary PGM (P5, maxval 255). Values are clamped to [0,1] then quantized.
void write_pgm(const std::filesystem::path& path, const Tensor& image);
Tensor read_pgm(const std::filesystem::path& path);

// Little-endian primitive framing for checkpoint files.
class ByteWriter {
  public:
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void bytes(const void* data, std::size_t n);
    const std::vector<std::uint8_t>& buffer() const { return buf_; }
    void save(const std::filesystem::path& path) const;

  private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
  public:
    explicit ByteReader(std::vector<std::uint8_t> data) : buf_(std::move(data)) {}
    static ByteReader load(const std::filesystem::path& path);

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    void bytes(void* out, std::size_t n);
    std::size_t offset() const { return pos_; }
    std::size_t size() const { return buf_.size(); }
    const std::vector<std::uint8_t>& buffer() const { return buf_; }

  private:
    void need(std::size_t n) const;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace trexd
