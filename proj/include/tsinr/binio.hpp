#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tsinr/errors.hpp"

// Little-endian primitives for the binary model containers. Byte order is
// written out explicitly so files are portable across hosts.

namespace tsinr::binio {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f64_vec(std::ostream& out, const std::vector<double>& v) {
    write_u64(out, v.size());
    for (double x : v) write_f64(out, x);
}

inline void read_exact(std::istream& in, char* buf, std::size_t n, const char* what) {
    in.read(buf, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw ValidationError(std::string("truncated file while reading ") + what);
}

inline std::uint32_t read_u32(std::istream& in, const char* what = "u32") {
    unsigned char b[4];
    read_exact(in, reinterpret_cast<char*>(b), 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& in, const char* what = "u64") {
    unsigned char b[8];
    read_exact(in, reinterpret_cast<char*>(b), 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& in, const char* what = "f64") {
    return std::bit_cast<double>(read_u64(in, what));
}

inline std::string read_string(std::istream& in, const char* what = "string") {
    const std::uint32_t n = read_u32(in, what);
    std::string s(n, '\0');
    if (n > 0) read_exact(in, s.data(), n, what);
    return s;
}

inline std::vector<double> read_f64_vec(std::istream& in, const char* what = "f64 vector") {
    const std::uint64_t n = read_u64(in, what);
    std::vector<double> v(n);
    for (double& x : v) x = read_f64(in, what);
    return v;
}

inline void expect_magic(std::istream& in, const char* magic) {
    char got[8] = {};
    const std::size_t n = std::char_traits<char>::length(magic);
    read_exact(in, got, n, "magic bytes");
    if (std::string(got, n) != magic)
        throw ValidationError(std::string("bad magic bytes: expected '") + magic + "', got '" +
                              std::string(got, n) + "'");
}

} // namespace tsinr::binio
