#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hsplab/bits.hpp"
#include "hsplab/error.hpp"
#include "hsplab/group.hpp"

namespace hsplab {

namespace detail {

/// Bits needed to store values in [0, count); at least one.
inline std::size_t width_for(std::uint64_t count) {
  std::size_t w = 1;
  while (w < 64 && (std::uint64_t{1} << w) < count) ++w;
  return w;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t sat_lcm(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return sat_mul(a / std::gcd(a, b), b);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) fail(ErrorCode::InvalidEncoding, "not an integer: " + std::string(s));
  return v;
}

/// "(a,b,c)" -> {a,b,c}
inline std::vector<std::int64_t> parse_tuple(std::string_view s) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') fail(ErrorCode::InvalidEncoding, "expected a tuple: " + std::string(s));
  s = s.substr(1, s.size() - 2);
  std::vector<std::int64_t> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(parse_int(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_tuple(const std::vector<std::uint64_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + ")";
}

inline std::uint64_t mod(std::int64_t a, std::uint64_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((a % mm) + mm) % mm);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Permutations of {0..n-1}, composed with the left-action convention
// (g·h)(x) = g(h(x)). Text form is 1-based cycle notation.

class PermutationBackend final : public Backend {
 public:
  static constexpr std::size_t kMaxDegree = 20;

  explicit PermutationBackend(std::size_t degree) : n_(degree), w_(detail::width_for(degree)) {
    if (degree < 1 || degree > kMaxDegree) fail(ErrorCode::BadSpec, "permutation degree out of range: " + std::to_string(degree));
  }

  std::size_t degree() const noexcept { return n_; }

  std::string_view kind() const override { return "permutation"; }
  std::size_t encoding_length() const override { return n_ * w_; }

  Element encode(const std::vector<std::size_t>& images) const {
    if (images.size() != n_) fail(ErrorCode::InvalidEncoding, "permutation length mismatch");
    Element e(n_ * w_);
    for (std::size_t i = 0; i < n_; ++i) e.set_field(i * w_, w_, images[i]);
    return e;
  }
  std::vector<std::size_t> decode(const Element& e) const {
    std::vector<std::size_t> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = e.field(i * w_, w_);
    return out;
  }

  Element identity() const override {
    std::vector<std::size_t> id(n_);
    std::iota(id.begin(), id.end(), 0);
    return encode(id);
  }
  Element multiply(const Element& a, const Element& b) const override {
    const auto g = decode(a);
    const auto h = decode(b);
    std::vector<std::size_t> out(n_);
    for (std::size_t x = 0; x < n_; ++x) out[x] = g[h[x]];
    return encode(out);
  }
  Element invert(const Element& a) const override {
    const auto g = decode(a);
    std::vector<std::size_t> out(n_);
    for (std::size_t x = 0; x < n_; ++x) out[g[x]] = x;
    return encode(out);
  }
  bool is_valid(const Element& a) const override {
    std::vector<bool> seen(n_, false);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto v = a.field(i * w_, w_);
      if (v >= n_ || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }
  std::uint64_t order_hint() const override {
    std::uint64_t f = 1;
    for (std::uint64_t i = 2; i <= n_; ++i) f = detail::sat_mul(f, i);
    return f;
  }
  std::uint64_t exponent_hint() const override {
    std::uint64_t l = 1;
    for (std::uint64_t i = 2; i <= n_; ++i) l = detail::sat_lcm(l, i);
    return l;
  }

  std::string format(const Element& a) const override { return format_cycles(decode(a)); }
  Element parse_native(std::string_view text) const override { return encode(parse_cycles(text, n_)); }

  static std::string format_cycles(const std::vector<std::size_t>& g) {
    std::string s;
    std::vector<bool> done(g.size(), false);
    for (std::size_t start = 0; start < g.size(); ++start) {
      if (done[start] || g[start] == start) continue;
      s += '(';
      std::size_t x = start;
      bool first = true;
      while (!done[x]) {
        done[x] = true;
        if (!first) s += ' ';
        s += std::to_string(x + 1);
        first = false;
        x = g[x];
      }
      s += ')';
    }
    return s.empty() ? "()" : s;
  }

  /// Product of cycles, applied right to left as functions.
  static std::vector<std::size_t> parse_cycles(std::string_view text, std::size_t n) {
    std::vector<std::size_t> result(n);
    std::iota(result.begin(), result.end(), 0);
    std::vector<std::vector<std::size_t>> cycles;
    std::size_t i = 0;
    text = detail::trim(text);
    while (i < text.size()) {
      if (text[i] == ' ') {
        ++i;
        continue;
      }
      if (text[i] != '(') fail(ErrorCode::InvalidEncoding, "bad cycle notation: " + std::string(text));
      const auto close = text.find(')', i);
      if (close == std::string_view::npos) fail(ErrorCode::InvalidEncoding, "unclosed cycle: " + std::string(text));
      std::vector<std::size_t> cyc;
      std::string body(text.substr(i + 1, close - i - 1));
      std::replace(body.begin(), body.end(), ',', ' ');
      std::istringstream in(body);
      std::string tok;
      while (in >> tok) {
        const auto p = detail::parse_int(tok);
        if (p < 1 || static_cast<std::size_t>(p) > n) fail(ErrorCode::InvalidEncoding, "point out of range: " + tok);
        cyc.push_back(static_cast<std::size_t>(p - 1));
      }
      std::vector<bool> seen(n, false);
      for (auto x : cyc) {
        if (seen[x]) fail(ErrorCode::InvalidEncoding, "repeated point in cycle: " + std::string(text));
        seen[x] = true;
      }
      cycles.push_back(std::move(cyc));
      i = close + 1;
    }
    // Rightmost cycle acts first.
    for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
      std::vector<std::size_t> c(n);
      std::iota(c.begin(), c.end(), 0);
      for (std::size_t k = 0; k < it->size(); ++k) c[(*it)[k]] = (*it)[(k + 1) % it->size()];
      std::vector<std::size_t> next(n);
      for (std::size_t x = 0; x < n; ++x) next[x] = c[result[x]];
      result = std::move(next);
    }
    return result;
  }

 private:
  std::size_t n_;
  std::size_t w_;
};

// ---------------------------------------------------------------------------
// Invertible d×d matrices over GF(2), row-major bits.

class Gf2MatrixBackend final : public Backend {
 public:
  static constexpr std::size_t kMaxDim = 8;
  using Rows = std::vector<std::uint32_t>;  // bit j of row i (from the left) is entry (i,j)

  explicit Gf2MatrixBackend(std::size_t dim) : d_(dim) {
    if (dim < 1 || dim > kMaxDim) fail(ErrorCode::BadSpec, "matrix dimension out of range: " + std::to_string(dim));
  }

  std::size_t dim() const noexcept { return d_; }
  std::string_view kind() const override { return "gf2matrix"; }
  std::size_t encoding_length() const override { return d_ * d_; }

  Element encode(const Rows& rows) const {
    Element e(d_ * d_);
    for (std::size_t i = 0; i < d_; ++i) e.set_field(i * d_, d_, rows[i]);
    return e;
  }
  Rows decode(const Element& e) const {
    Rows r(d_);
    for (std::size_t i = 0; i < d_; ++i) r[i] = static_cast<std::uint32_t>(e.field(i * d_, d_));
    return r;
  }

  static Rows identity_rows(std::size_t d) {
    Rows r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = 1u << (d - 1 - i);
    return r;
  }
  static Rows mul(const Rows& a, const Rows& b, std::size_t d) {
    Rows out(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        if ((a[i] >> (d - 1 - k)) & 1u) out[i] ^= b[k];
      }
    }
    return out;
  }
  static std::size_t rank(Rows r, std::size_t d) {
    std::size_t rk = 0;
    for (std::size_t col = 0; col < d && rk < r.size(); ++col) {
      const std::uint32_t bit = 1u << (d - 1 - col);
      std::size_t piv = rk;
      while (piv < r.size() && !(r[piv] & bit)) ++piv;
      if (piv == r.size()) continue;
      std::swap(r[rk], r[piv]);
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i != rk && (r[i] & bit)) r[i] ^= r[rk];
      }
      ++rk;
    }
    return rk;
  }
  static Rows inverse(const Rows& a, std::size_t d) {
    Rows m = a;
    Rows inv = identity_rows(d);
    for (std::size_t col = 0; col < d; ++col) {
      const std::uint32_t bit = 1u << (d - 1 - col);
      std::size_t piv = col;
      while (piv < d && !(m[piv] & bit)) ++piv;
      if (piv == d) fail(ErrorCode::InvalidEncoding, "singular matrix");
      std::swap(m[col], m[piv]);
      std::swap(inv[col], inv[piv]);
      for (std::size_t i = 0; i < d; ++i) {
        if (i != col && (m[i] & bit)) {
          m[i] ^= m[col];
          inv[i] ^= inv[col];
        }
      }
    }
    return inv;
  }

  Element identity() const override { return encode(identity_rows(d_)); }
  Element multiply(const Element& a, const Element& b) const override { return encode(mul(decode(a), decode(b), d_)); }
  Element invert(const Element& a) const override { return encode(inverse(decode(a), d_)); }
  bool is_valid(const Element& a) const override { return rank(decode(a), d_) == d_; }

  std::uint64_t order_hint() const override {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < d_; ++i) n = detail::sat_mul(n, (std::uint64_t{1} << d_) - (std::uint64_t{1} << i));
    return n;
  }
  /// Semisimple parts have order dividing some 2^i - 1 (i <= d); unipotent
  /// parts divide 2^ceil(log2 d).
  std::uint64_t exponent_hint() const override {
    std::uint64_t l = 1;
    for (std::size_t i = 1; i <= d_; ++i) l = detail::sat_lcm(l, (std::uint64_t{1} << i) - 1);
    std::uint64_t two = 1;
    while (two < d_) two <<= 1;
    return detail::sat_mul(l, two);
  }

  std::string format(const Element& a) const override {
    const auto r = decode(a);
    std::string s;
    for (std::size_t i = 0; i < d_; ++i) {
      if (i) s += '/';
      for (std::size_t j = 0; j < d_; ++j) s += ((r[i] >> (d_ - 1 - j)) & 1u) ? '1' : '0';
    }
    return s;
  }
  Element parse_native(std::string_view text) const override { return encode(parse_rows(text, d_)); }

  static Rows parse_rows(std::string_view text, std::size_t d) {
    text = detail::trim(text);
    Rows rows;
    std::size_t start = 0;
    for (;;) {
      const auto slash = text.find('/', start);
      const auto row = detail::trim(text.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
      if (row.size() != d) fail(ErrorCode::InvalidEncoding, "matrix row has wrong length: " + std::string(row));
      std::uint32_t v = 0;
      for (char c : row) {
        if (c != '0' && c != '1') fail(ErrorCode::InvalidEncoding, "matrix rows are bitstrings: " + std::string(row));
        v = (v << 1) | static_cast<std::uint32_t>(c == '1');
      }
      rows.push_back(v);
      if (slash == std::string_view::npos) break;
      start = slash + 1;
    }
    if (rows.size() != d) fail(ErrorCode::InvalidEncoding, "matrix has wrong number of rows: " + std::string(text));
    return rows;
  }

 private:
  std::size_t d_;
};

// ---------------------------------------------------------------------------
// Z_2^k wr Z_2 as (v, w, s): base Z_2^k x Z_2^k, s swaps the two halves.
// (x, s)(x', s') = (x + sigma^s(x'), s + s').

class WreathBackend final : public Backend {
 public:
  explicit WreathBackend(std::size_t k) : k_(k) {
    if (k < 1 || k > 16) fail(ErrorCode::BadSpec, "wreath k out of range: " + std::to_string(k));
  }

  std::size_t k() const noexcept { return k_; }
  std::string_view kind() const override { return "wreath"; }
  std::size_t encoding_length() const override { return 2 * k_ + 1; }

  Element make(std::uint64_t v, std::uint64_t w, bool s) const {
    Element e(2 * k_ + 1);
    e.set_field(0, k_, v);
    e.set_field(k_, k_, w);
    e.set(2 * k_, s);
    return e;
  }

  Element identity() const override { return Element(2 * k_ + 1); }
  Element multiply(const Element& a, const Element& b) const override {
    const auto v = a.field(0, k_), w = a.field(k_, k_);
    auto v2 = b.field(0, k_), w2 = b.field(k_, k_);
    if (a.get(2 * k_)) std::swap(v2, w2);
    return make(v ^ v2, w ^ w2, a.get(2 * k_) != b.get(2 * k_));
  }
  Element invert(const Element& a) const override {
    auto v = a.field(0, k_), w = a.field(k_, k_);
    if (a.get(2 * k_)) std::swap(v, w);
    return make(v, w, a.get(2 * k_));
  }
  bool is_valid(const Element&) const override { return true; }
  std::uint64_t order_hint() const override { return std::uint64_t{1} << (2 * k_ + 1); }
  std::uint64_t exponent_hint() const override { return 4; }

  std::string format(const Element& a) const override {
    const auto s = a.to_binary();
    return s.substr(0, k_) + "|" + s.substr(k_, k_) + "|" + s.substr(2 * k_);
  }
  Element parse_native(std::string_view text) const override {
    std::string s;
    for (char c : text) {
      if (c != '|' && c != ' ') s += c;
    }
    if (s.size() != 2 * k_ + 1) fail(ErrorCode::InvalidEncoding, "wreath element needs v|w|s: " + std::string(text));
    return Bits::from_binary(s);
  }

 private:
  std::size_t k_;
};

// ---------------------------------------------------------------------------
// Extra-special groups of order p^3, p an odd prime.
//   heisenberg (exponent p):   (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a b')
//   metacyclic (exponent p^2): (x,y)(x',y') = (x + x'(1+p)^y mod p^2, y+y')

enum class ExtraSpecialVariant { heisenberg, metacyclic };

class ExtraSpecialBackend final : public Backend {
 public:
  ExtraSpecialBackend(std::uint64_t p, ExtraSpecialVariant variant) : p_(p), variant_(variant) {
    if (!is_odd_prime(p) || p > 251) fail(ErrorCode::BadSpec, "extra-special needs an odd prime p <= 251, got " + std::to_string(p));
    wp_ = detail::width_for(p);
    wp2_ = detail::width_for(p * p);
  }

  static bool is_odd_prime(std::uint64_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= p; d += 2) {
      if (p % d == 0) return false;
    }
    return true;
  }

  std::uint64_t p() const noexcept { return p_; }
  ExtraSpecialVariant variant() const noexcept { return variant_; }

  std::string_view kind() const override { return "extraspecial"; }
  std::size_t encoding_length() const override {
    return variant_ == ExtraSpecialVariant::heisenberg ? 3 * wp_ : wp2_ + wp_;
  }

  Element make(std::vector<std::uint64_t> coords) const {
    Element e(encoding_length());
    if (variant_ == ExtraSpecialVariant::heisenberg) {
      for (std::size_t i = 0; i < 3; ++i) e.set_field(i * wp_, wp_, coords.at(i) % p_);
    } else {
      e.set_field(0, wp2_, coords.at(0) % (p_ * p_));
      e.set_field(wp2_, wp_, coords.at(1) % p_);
    }
    return e;
  }
  std::vector<std::uint64_t> coords(const Element& e) const {
    if (variant_ == ExtraSpecialVariant::heisenberg) return {e.field(0, wp_), e.field(wp_, wp_), e.field(2 * wp_, wp_)};
    return {e.field(0, wp2_), e.field(wp2_, wp_)};
  }

  Element identity() const override { return Element(encoding_length()); }
  Element multiply(const Element& x, const Element& y) const override {
    const auto a = coords(x), b = coords(y);
    if (variant_ == ExtraSpecialVariant::heisenberg) {
      return make({(a[0] + b[0]) % p_, (a[1] + b[1]) % p_, (a[2] + b[2] + a[0] * b[1]) % p_});
    }
    const std::uint64_t q = p_ * p_;
    return make({(a[0] + b[0] * twist(a[1])) % q, (a[1] + b[1]) % p_});
  }
  Element invert(const Element& x) const override {
    const auto a = coords(x);
    if (variant_ == ExtraSpecialVariant::heisenberg) {
      const std::uint64_t na = (p_ - a[0]) % p_, nb = (p_ - a[1]) % p_;
      // (a,b,c)^-1 = (-a, -b, -c + a b)
      return make({na, nb, (p_ - a[2] % p_ + a[0] * a[1] % p_) % p_});
    }
    const std::uint64_t q = p_ * p_;
    const std::uint64_t ny = (p_ - a[1]) % p_;
    return make({(q - a[0] * twist(ny) % q) % q, ny});
  }
  bool is_valid(const Element& x) const override {
    const auto a = coords(x);
    if (variant_ == ExtraSpecialVariant::heisenberg) return a[0] < p_ && a[1] < p_ && a[2] < p_;
    return a[0] < p_ * p_ && a[1] < p_;
  }
  std::uint64_t order_hint() const override { return p_ * p_ * p_; }
  std::uint64_t exponent_hint() const override { return variant_ == ExtraSpecialVariant::heisenberg ? p_ : p_ * p_; }

  std::string format(const Element& x) const override { return detail::format_tuple(coords(x)); }
  Element parse_native(std::string_view text) const override {
    const auto t = detail::parse_tuple(text);
    const std::size_t arity = variant_ == ExtraSpecialVariant::heisenberg ? 3 : 2;
    if (t.size() != arity) fail(ErrorCode::InvalidEncoding, "wrong tuple arity: " + std::string(text));
    std::vector<std::uint64_t> c;
    for (std::size_t i = 0; i < arity; ++i) {
      const std::uint64_t m = (variant_ == ExtraSpecialVariant::metacyclic && i == 0) ? p_ * p_ : p_;
      c.push_back(detail::mod(t[i], m));
    }
    return make(c);
  }

 private:
  /// (1+p)^y mod p^2 = 1 + y p
  std::uint64_t twist(std::uint64_t y) const { return (1 + y * p_) % (p_ * p_); }

  std::uint64_t p_;
  ExtraSpecialVariant variant_;
  std::size_t wp_ = 0;
  std::size_t wp2_ = 0;
};

// ---------------------------------------------------------------------------
// Z_{m1} x ... x Z_{mk} as a tuple of fixed-width fields. With all moduli 2
// the encoding is a plain bitstring and multiplication is xor.

class AbelianBackend final : public Backend {
 public:
  explicit AbelianBackend(std::vector<std::uint64_t> moduli) : moduli_(std::move(moduli)) {
    if (moduli_.empty() || moduli_.size() > 64) fail(ErrorCode::BadSpec, "abelian group needs 1..64 moduli");
    for (auto m : moduli_) {
      if (m < 1 || m > (std::uint64_t{1} << 32)) fail(ErrorCode::BadSpec, "cyclic modulus out of range");
      offsets_.push_back(len_);
      widths_.push_back(detail::width_for(m));
      len_ += widths_.back();
    }
  }

  const std::vector<std::uint64_t>& moduli() const noexcept { return moduli_; }
  std::string_view kind() const override { return "abelian"; }
  std::size_t encoding_length() const override { return len_; }

  Element make(const std::vector<std::uint64_t>& t) const {
    Element e(len_);
    for (std::size_t i = 0; i < moduli_.size(); ++i) e.set_field(offsets_[i], widths_[i], t.at(i) % moduli_[i]);
    return e;
  }
  std::vector<std::uint64_t> coords(const Element& e) const {
    std::vector<std::uint64_t> t(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) t[i] = e.field(offsets_[i], widths_[i]);
    return t;
  }

  Element identity() const override { return Element(len_); }
  Element multiply(const Element& a, const Element& b) const override {
    auto x = coords(a);
    const auto y = coords(b);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] + y[i]) % moduli_[i];
    return make(x);
  }
  Element invert(const Element& a) const override {
    auto x = coords(a);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (moduli_[i] - x[i]) % moduli_[i];
    return make(x);
  }
  bool is_valid(const Element& a) const override {
    const auto x = coords(a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] >= moduli_[i]) return false;
    }
    return true;
  }
  std::uint64_t order_hint() const override {
    std::uint64_t n = 1;
    for (auto m : moduli_) n = detail::sat_mul(n, m);
    return n;
  }
  std::uint64_t exponent_hint() const override {
    std::uint64_t l = 1;
    for (auto m : moduli_) l = detail::sat_lcm(l, m);
    return l;
  }

  std::string format(const Element& a) const override { return detail::format_tuple(coords(a)); }
  Element parse_native(std::string_view text) const override {
    const auto t = detail::parse_tuple(text);
    if (t.size() != moduli_.size()) fail(ErrorCode::InvalidEncoding, "wrong tuple arity: " + std::string(text));
    std::vector<std::uint64_t> c;
    for (std::size_t i = 0; i < t.size(); ++i) c.push_back(detail::mod(t[i], moduli_[i]));
    return make(c);
  }

 private:
  std::vector<std::uint64_t> moduli_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> widths_;
  std::size_t len_ = 0;
};

// ---------------------------------------------------------------------------
// Direct product; encodings are concatenated. Text form "{e1}{e2}...".

class DirectProductBackend final : public Backend {
 public:
  explicit DirectProductBackend(std::vector<std::shared_ptr<const Backend>> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) fail(ErrorCode::BadSpec, "direct product needs at least one factor");
    for (const auto& f : factors_) {
      offsets_.push_back(len_);
      len_ += f->encoding_length();
    }
  }

  const std::vector<std::shared_ptr<const Backend>>& factors() const noexcept { return factors_; }
  std::string_view kind() const override { return "product"; }
  std::size_t encoding_length() const override { return len_; }

  Element part(const Element& e, std::size_t i) const { return e.slice(offsets_[i], factors_[i]->encoding_length()); }
  Element join(const std::vector<Element>& parts) const {
    Element out;
    for (const auto& p : parts) out = out.concat(p);
    return out;
  }
  /// Embeds a factor element, identity elsewhere.
  Element inject(std::size_t i, const Element& x) const {
    std::vector<Element> parts;
    for (std::size_t j = 0; j < factors_.size(); ++j) parts.push_back(j == i ? x : factors_[j]->identity());
    return join(parts);
  }

  Element identity() const override { return map([](const Backend& f, std::size_t) { return f.identity(); }); }
  Element multiply(const Element& a, const Element& b) const override {
    return map([&](const Backend& f, std::size_t i) { return f.multiply(part(a, i), part(b, i)); });
  }
  Element invert(const Element& a) const override {
    return map([&](const Backend& f, std::size_t i) { return f.invert(part(a, i)); });
  }
  bool is_valid(const Element& a) const override {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (!factors_[i]->is_valid(part(a, i))) return false;
    }
    return true;
  }
  bool unique_encoding() const override {
    return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f->unique_encoding(); });
  }
  Element canonical(const Element& a) const override {
    return map([&](const Backend& f, std::size_t i) { return f.canonical(part(a, i)); });
  }
  std::uint64_t order_hint() const override {
    std::uint64_t n = 1;
    for (const auto& f : factors_) n = detail::sat_mul(n, f->order_hint());
    return n;
  }
  std::uint64_t exponent_hint() const override {
    std::uint64_t l = 1;
    for (const auto& f : factors_) l = detail::sat_lcm(l, f->exponent_hint());
    return l;
  }

  std::string format(const Element& a) const override {
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) s += "{" + factors_[i]->format(part(a, i)) + "}";
    return s;
  }
  Element parse_native(std::string_view text) const override {
    text = detail::trim(text);
    std::vector<Element> parts;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == ' ') {
        ++i;
        continue;
      }
      if (text[i] != '{') fail(ErrorCode::InvalidEncoding, "product element needs {..}{..}: " + std::string(text));
      int depth = 0;
      std::size_t j = i;
      for (; j < text.size(); ++j) {
        if (text[j] == '{') ++depth;
        if (text[j] == '}' && --depth == 0) break;
      }
      if (j == text.size()) fail(ErrorCode::InvalidEncoding, "unbalanced braces: " + std::string(text));
      if (parts.size() >= factors_.size()) fail(ErrorCode::InvalidEncoding, "too many product components");
      const auto inner = text.substr(i + 1, j - i - 1);
      const auto& f = *factors_[parts.size()];
      if (inner.starts_with("0x")) {
        parts.push_back(Bits::from_hex(inner.substr(2), f.encoding_length()));
      } else {
        parts.push_back(f.parse_native(inner));
      }
      i = j + 1;
    }
    if (parts.size() != factors_.size()) fail(ErrorCode::InvalidEncoding, "too few product components");
    return join(parts);
  }

 private:
  template <class F>
  Element map(F&& f) const {
    std::vector<Element> parts;
    for (std::size_t i = 0; i < factors_.size(); ++i) parts.push_back(f(*factors_[i], i));
    return join(parts);
  }

  std::vector<std::shared_ptr<const Backend>> factors_;
  std::vector<std::size_t> offsets_;
  std::size_t len_ = 0;
};

// ---------------------------------------------------------------------------
// G/K for an enumerated normal subgroup K, reusing G's encodings. Encodings
// are not unique: every element of the coset gK encodes the same element.

class QuotientViewBackend final : public Backend {
 public:
  QuotientViewBackend(const BlackBoxGroup& base, std::span<const Element> kernel_gens,
                      std::size_t bound = default_enum_bound())
      : base_(base.backend_ptr()) {
    BlackBoxGroup G = base;
    kernel_ = enumerate_closure(G, kernel_gens, bound);
    const ElementSet K = closure_set(G, kernel_gens, bound);
    for (const auto& g : G.generators()) {
      for (const auto& k : kernel_gens) {
        if (!K.contains(G, G.conjugate(k, g))) fail(ErrorCode::NotNormal, "quotient by a non-normal subgroup");
      }
    }
  }

  std::size_t kernel_size() const noexcept { return kernel_.size(); }

  std::string_view kind() const override { return "quotient-view"; }
  std::size_t encoding_length() const override { return base_->encoding_length(); }
  Element identity() const override { return base_->identity(); }
  Element multiply(const Element& a, const Element& b) const override { return base_->multiply(a, b); }
  Element invert(const Element& a) const override { return base_->invert(a); }
  bool is_valid(const Element& a) const override { return base_->is_valid(a); }
  bool unique_encoding() const override { return false; }
  Element canonical(const Element& a) const override {
    Element best;
    bool first = true;
    for (const auto& k : kernel_) {
      Element y = base_->canonical(base_->multiply(a, k));
      if (first || y < best) {
        best = std::move(y);
        first = false;
      }
    }
    return best;
  }
  std::uint64_t order_hint() const override { return base_->order_hint(); }
  std::uint64_t exponent_hint() const override { return base_->exponent_hint(); }
  std::string format(const Element& a) const override { return base_->format(a); }
  Element parse_native(std::string_view text) const override { return base_->parse_native(text); }

 private:
  std::shared_ptr<const Backend> base_;
  std::vector<Element> kernel_;
};

}  // namespace hsplab
