#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ttrnn/errors.hpp"

/// Little-endian scalar IO, written byte by byte so the encoding does not
/// depend on the host. Readers throw FormatError naming the context on
/// truncation.
namespace ttrnn::bytes {

inline void write_bytes(std::ostream& os, const unsigned char* p, std::size_t n) {
    os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void write_u16(std::ostream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    write_bytes(os, b, 2);
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(os, b, 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(os, b, 8);
}

inline void write_f32(std::ostream& os, float v) { write_u32(os, std::bit_cast<std::uint32_t>(v)); }

inline void write_f64(std::ostream& os, double v) { write_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void read_bytes(std::istream& is, unsigned char* p, std::size_t n, const std::string& what) {
    is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw FormatError("truncated while reading " + what);
}

inline std::uint16_t read_u16(std::istream& is, const std::string& what) {
    unsigned char b[2];
    read_bytes(is, b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t read_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    read_bytes(is, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline std::uint64_t read_u64(std::istream& is, const std::string& what) {
    unsigned char b[8];
    read_bytes(is, b, 8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline float read_f32(std::istream& is, const std::string& what) {
    return std::bit_cast<float>(read_u32(is, what));
}

inline double read_f64(std::istream& is, const std::string& what) {
    return std::bit_cast<double>(read_u64(is, what));
}

} // namespace ttrnn::bytes
