#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hsplab/error.hpp"

namespace hsplab {

/// Fixed-length bitstring. Bit 0 is the most significant bit of byte 0, so
/// comparing the packed bytes lexicographically is the same as comparing the
/// bitstrings lexicographically. That order is the fixed total order used
/// for canonical coset labels.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t length) : length_(length), bytes_((length + 7) / 8, 0) {}

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  bool get(std::size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1u; }
  void set(std::size_t i, bool v) {
    const auto mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
    if (v) {
      bytes_[i / 8] |= mask;
    } else {
      bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
    }
  }

  /// Reads `width` bits starting at `offset` as an unsigned big-endian field.
  std::uint64_t field(std::size_t offset, std::size_t width) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(get(offset + i));
    return v;
  }
  void set_field(std::size_t offset, std::size_t width, std::uint64_t value) {
    for (std::size_t i = 0; i < width; ++i) set(offset + width - 1 - i, (value >> i) & 1u);
  }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  Bits concat(const Bits& other) const {
    Bits out(length_ + other.length_);
    for (std::size_t i = 0; i < length_; ++i) out.set(i, get(i));
    for (std::size_t i = 0; i < other.length_; ++i) out.set(length_ + i, other.get(i));
    return out;
  }
  Bits slice(std::size_t offset, std::size_t width) const {
    Bits out(width);
    for (std::size_t i = 0; i < width; ++i) out.set(i, get(offset + i));
    return out;
  }

  Bits operator^(const Bits& other) const {
    Bits out = *this;
    for (std::size_t i = 0; i < bytes_.size(); ++i) out.bytes_[i] ^= other.bytes_[i];
    return out;
  }

  std::string to_binary() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) s[i] = get(i) ? '1' : '0';
    return s;
  }

  /// Hex of the packed bytes; the trailing partial byte is zero padded.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes_.size() * 2);
    for (auto b : bytes_) {
      s.push_back(kDigits[b >> 4]);
      s.push_back(kDigits[b & 15]);
    }
    return s;
  }

  static Bits from_binary(std::string_view s) {
    Bits out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') fail(ErrorCode::InvalidEncoding, "not a binary string: " + std::string(s));
      out.set(i, s[i] == '1');
    }
    return out;
  }

  static Bits from_hex(std::string_view s, std::size_t length) {
    if (s.size() != (length + 7) / 8 * 2) fail(ErrorCode::InvalidEncoding, "hex length mismatch: " + std::string(s));
    Bits out(length);
    for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
      auto nibble = [&](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        fail(ErrorCode::InvalidEncoding, "bad hex digit");
      };
      out.bytes_[i] = static_cast<std::uint8_t>(nibble(s[2 * i]) << 4 | nibble(s[2 * i + 1]));
    }
    if (length % 8 != 0 && (out.bytes_.back() & ((1u << (8 - length % 8)) - 1)) != 0) {
      fail(ErrorCode::InvalidEncoding, "nonzero padding bits");
    }
    return out;
  }

  friend bool operator==(const Bits&, const Bits&) = default;
  friend std::strong_ordering operator<=>(const Bits& a, const Bits& b) {
    if (auto c = a.bytes_ <=> b.bytes_; c != 0) return c;
    return a.length_ <=> b.length_;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ length_;
    for (auto b : bytes_) h = (h ^ b) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }

 private:
  std::size_t length_ = 0;
  std::vector<std::uint8_t> bytes_;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept { return b.hash(); }
};

using Element = Bits;
using Label = Bits;

}  // namespace hsplab
