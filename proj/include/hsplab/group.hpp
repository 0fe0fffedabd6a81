#pragma once

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hsplab/bits.hpp"
#include "hsplab/error.hpp"

namespace hsplab {

/// Concrete realization of the black-box oracles. Implementations may assume
/// their arguments passed `is_valid`; BlackBoxGroup performs that check.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string_view kind() const = 0;
  virtual std::size_t encoding_length() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element invert(const Element& a) const = 0;
  virtual bool is_valid(const Element& a) const = 0;

  virtual bool unique_encoding() const { return true; }
  /// Representative shared by all encodings of the same element.
  virtual Element canonical(const Element& a) const { return a; }
  /// A known multiple of the group order (saturates at UINT64_MAX).
  virtual std::uint64_t order_hint() const = 0;
  /// A known multiple of every element order.
  virtual std::uint64_t exponent_hint() const { return order_hint(); }

  virtual std::string format(const Element& a) const { return "0x" + a.to_hex(); }
  virtual Element parse_native(std::string_view text) const {
    fail(ErrorCode::InvalidEncoding, "no native element syntax for " + std::string(kind()) + ": " + std::string(text));
  }
};

/// Oracle bundle plus metadata. Group-operation calls are counted; the
/// counter is not synchronized, so one instance belongs to one logical thread.
class BlackBoxGroup {
 public:
  BlackBoxGroup(std::shared_ptr<const Backend> backend, std::vector<Element> generators,
                std::string name = {})
      : backend_(std::move(backend)), generators_(std::move(generators)), name_(std::move(name)) {
    if (generators_.empty()) generators_.push_back(backend_->identity());
    for (const auto& g : generators_) check(g);
  }

  const Backend& backend() const noexcept { return *backend_; }
  std::shared_ptr<const Backend> backend_ptr() const noexcept { return backend_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t encoding_length() const { return backend_->encoding_length(); }
  const std::vector<Element>& generators() const noexcept { return generators_; }
  bool unique_encoding() const { return backend_->unique_encoding(); }
  std::uint64_t order_hint() const { return backend_->order_hint(); }
  std::uint64_t exponent_hint() const { return exponent_override_ ? exponent_override_ : backend_->exponent_hint(); }
  void set_exponent_hint(std::uint64_t m) { exponent_override_ = m; }

  /// Generators of a normal subgroup declared alongside the group (used by
  /// the elementary-Abelian-2 solvers); empty when none was declared.
  const std::vector<Element>& declared_normal() const noexcept { return declared_normal_; }
  void set_declared_normal(std::vector<Element> gens) {
    for (const auto& g : gens) check(g);
    declared_normal_ = std::move(gens);
  }

  Element identity() const { return backend_->identity(); }

  Element multiply(const Element& a, const Element& b) const {
    check(a);
    check(b);
    ++ops_;
    return backend_->multiply(a, b);
  }

  Element invert(const Element& a) const {
    check(a);
    ++ops_;
    return backend_->invert(a);
  }

  bool equal(const Element& a, const Element& b) const {
    if (backend_->unique_encoding()) return a == b;
    return backend_->canonical(a) == backend_->canonical(b);
  }

  bool is_identity(const Element& a) const { return equal(a, identity()); }
  Element canonical(const Element& a) const { return backend_->canonical(a); }

  /// Square-and-multiply; negative exponents go through invert.
  Element power(const Element& g, std::int64_t k) const {
    Element base = k < 0 ? invert(g) : g;
    std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
    Element acc = identity();
    while (e > 0) {
      if (e & 1u) acc = multiply(acc, base);
      e >>= 1;
      if (e > 0) base = multiply(base, base);
    }
    return acc;
  }

  /// a b a^-1 b^-1
  Element commutator(const Element& a, const Element& b) const {
    return multiply(multiply(a, b), multiply(invert(a), invert(b)));
  }

  /// by x by^-1
  Element conjugate(const Element& x, const Element& by) const { return multiply(multiply(by, x), invert(by)); }

  bool commute(const Element& a, const Element& b) const { return equal(multiply(a, b), multiply(b, a)); }

  std::uint64_t group_ops() const noexcept { return ops_; }

  std::string format(const Element& a) const { return backend_->format(a); }

  /// Accepts the backend's native syntax, `0x<hex>` or `0b<bits>`.
  Element parse(std::string_view text) const {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    Element e;
    if (text.starts_with("0x")) {
      e = Bits::from_hex(text.substr(2), encoding_length());
    } else if (text.starts_with("0b")) {
      e = Bits::from_binary(text.substr(2));
    } else {
      e = backend_->parse_native(text);
    }
    check(e);
    return e;
  }

 private:
  void check(const Element& a) const {
    if (a.size() != backend_->encoding_length() || !backend_->is_valid(a)) {
      fail(ErrorCode::InvalidEncoding, "malformed element " + a.to_binary() + " for " + std::string(backend_->kind()));
    }
  }

  std::shared_ptr<const Backend> backend_;
  std::vector<Element> generators_;
  std::string name_;
  std::vector<Element> declared_normal_;
  std::uint64_t exponent_override_ = 0;
  mutable std::uint64_t ops_ = 0;
};

/// Default enumeration bound; the HSPLAB_MAX_ENUM environment variable
/// overrides it.
inline std::size_t default_enum_bound() {
  if (const char* env = std::getenv("HSPLAB_MAX_ENUM")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 20;
}

/// An enumerated subgroup (or any finite element set) with membership by
/// canonical key.
class ElementSet {
 public:
  ElementSet() = default;

  bool insert(const BlackBoxGroup& G, const Element& g) {
    if (!keys_.insert(G.canonical(g)).second) return false;
    elements_.push_back(g);
    return true;
  }
  bool contains(const BlackBoxGroup& G, const Element& g) const { return keys_.contains(G.canonical(g)); }

  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  const std::unordered_set<Bits, BitsHash>& keys() const noexcept { return keys_; }

  /// Same element set (by canonical keys).
  friend bool operator==(const ElementSet& a, const ElementSet& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<Element> elements_;
  std::unordered_set<Bits, BitsHash> keys_;
};

/// Breadth-first closure of `seeds`; every element of <seeds> exactly once,
/// identity first.
inline ElementSet closure_set(const BlackBoxGroup& G, std::span<const Element> seeds,
                              std::size_t bound = default_enum_bound()) {
  ElementSet out;
  out.insert(G, G.identity());
  std::vector<Element> gens;
  for (const auto& s : seeds) {
    if (!G.is_identity(s)) gens.push_back(s);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Element x = out.elements()[i];
    for (const auto& s : gens) {
      if (out.insert(G, G.multiply(x, s)) && out.size() > bound) {
        fail(ErrorCode::BoundExceeded, "subgroup larger than " + std::to_string(bound));
      }
    }
  }
  return out;
}

inline std::vector<Element> enumerate_closure(const BlackBoxGroup& G, std::span<const Element> seeds,
                                              std::size_t bound = default_enum_bound()) {
  return closure_set(G, seeds, bound).elements();
}

/// Adds `g` to an enumerated subgroup, keeping it closed. Old elements only
/// need right multiplication by g; new ones by every generator.
inline void extend_closure(const BlackBoxGroup& G, ElementSet& subgroup, std::vector<Element>& gens,
                           const Element& g, std::size_t bound = default_enum_bound()) {
  if (subgroup.contains(G, g)) return;
  gens.push_back(g);
  const std::size_t old = subgroup.size();
  auto grow = [&](const Element& y) {
    if (subgroup.insert(G, y) && subgroup.size() > bound) {
      fail(ErrorCode::BoundExceeded, "subgroup larger than " + std::to_string(bound));
    }
  };
  for (std::size_t i = 0; i < old; ++i) grow(G.multiply(subgroup.elements()[i], g));
  for (std::size_t i = old; i < subgroup.size(); ++i) {
    const Element x = subgroup.elements()[i];
    for (const auto& s : gens) grow(G.multiply(x, s));
  }
}

/// Minimum canonical encoding over the coset x·S.
inline Label coset_min(const BlackBoxGroup& G, const Element& x, std::span<const Element> subgroup) {
  Label best;
  bool first = true;
  for (const auto& s : subgroup) {
    Element y = G.canonical(G.multiply(x, s));
    if (first || y < best) {
      best = std::move(y);
      first = false;
    }
  }
  return best;
}

inline bool is_abelian(const BlackBoxGroup& G, std::span<const Element> gens) {
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (!G.commute(gens[i], gens[j])) return false;
    }
  }
  return true;
}

/// Order of g by repeated multiplication (brute force; used by harness code).
inline std::uint64_t brute_order(const BlackBoxGroup& G, const Element& g, std::uint64_t limit) {
  Element x = g;
  for (std::uint64_t k = 1; k <= limit; ++k) {
    if (G.is_identity(x)) return k;
    x = G.multiply(x, g);
  }
  fail(ErrorCode::BoundExceeded, "element order exceeds " + std::to_string(limit));
}

}  // namespace hsplab
