#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "tfit/errors.hpp"

namespace tfit::detail {

inline std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0) {
    static const auto table = [] {
        std::vector<std::uint32_t> t(256);
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = seed ^ 0xFFFFFFFFu;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

// Little-endian append-only buffer used by the store writers.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) { fixed(&v, 4); }
    void u64(std::uint64_t v) { fixed(&v, 8); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            u8(static_cast<std::uint8_t>(v) | 0x80u);
            v >>= 7;
        }
        u8(static_cast<std::uint8_t>(v));
    }
    void str(std::string_view s) {
        varint(s.size());
        buf_.append(s.data(), s.size());
    }
    void raw(const void* data, std::size_t len) { buf_.append(static_cast<const char*>(data), len); }

    void patch_u64(std::size_t offset, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_[offset + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }

    std::size_t size() const { return buf_.size(); }
    const std::string& data() const { return buf_; }

private:
    void fixed(const void* v, int n) {
        std::uint64_t x = 0;
        std::memcpy(&x, v, n);
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
    }
    std::string buf_;
};

// Bounds-checked reader over a loaded store image. Overruns mean the declared
// sizes lied about the payload, which reads as truncation.
class ByteReader {
public:
    ByteReader(const char* data, std::size_t len) : p_(data), end_(data + len) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(*p_++);
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(fixed(4)); }
    std::uint64_t u64() { return fixed(8); }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        int shift = 0;
        for (;;) {
            std::uint8_t b = u8();
            if (shift >= 63 && (b & 0x7Fu) > 1)
                throw load_error(load_error_kind::truncated, "store file: varint overflow");
            v |= static_cast<std::uint64_t>(b & 0x7Fu) << shift;
            if (!(b & 0x80u)) return v;
            shift += 7;
        }
    }
    std::string str() {
        auto n = varint();
        need(n);
        std::string s(p_, n);
        p_ += n;
        return s;
    }
    std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

private:
    void need(std::uint64_t n) {
        if (n > remaining())
            throw load_error(load_error_kind::truncated, "store file: unexpected end of data");
    }
    std::uint64_t fixed(int n) {
        need(n);
        std::uint64_t x = 0;
        for (int i = 0; i < n; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(p_[i])) << (8 * i);
        p_ += n;
        return x;
    }
    const char* p_;
    const char* end_;
};

}  // namespace tfit::detail
