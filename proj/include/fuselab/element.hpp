#pragma once

#include <map>
#include <string>

#include "fuselab/label.hpp"
#include "fuselab/rational.hpp"

namespace fuselab {

/// Finitely supported Label -> Coeff map. Zero coefficients are never
/// stored, so support() is always the true support.
template <class Coeff>
class Expansion {
 public:
  using Terms = std::map<Label, Coeff>;

  Expansion() = default;

  static Expansion basis(Label l, Coeff c = Coeff(1)) {
    Expansion e;
    e.add(l, c);
    return e;
  }

  void add(Label l, const Coeff& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(l, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Coeff coeff(Label l) const {
    auto it = terms_.find(l);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  bool zero() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  Expansion& operator+=(const Expansion& other) {
    for (const auto& [l, c] : other.terms_) add(l, c);
    return *this;
  }

  Expansion& operator-=(const Expansion& other) {
    for (const auto& [l, c] : other.terms_) add(l, -c);
    return *this;
  }

  Expansion& operator*=(const Coeff& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [l, c] : terms_) c *= s;
    return *this;
  }

  friend Expansion operator+(Expansion a, const Expansion& b) { return a += b; }
  friend Expansion operator-(Expansion a, const Expansion& b) { return a -= b; }
  friend Expansion operator*(const Coeff& s, Expansion a) { return a *= s; }
  friend bool operator==(const Expansion&, const Expansion&) = default;

  /// Display against a basis, e.g. "2*u1 + u3". Zero prints as "0".
  std::string display(const Basis& basis) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [l, c] : terms_) {
      if (!out.empty()) out += " + ";
      if (c == Coeff(1)) {
        out += basis.name(l);
      } else {
        out += coeff_string(c) + "*" + basis.name(l);
      }
    }
    return out;
  }

 private:
  static std::string coeff_string(const Int& c) { return to_string(c); }
  static std::string coeff_string(const Rational& c) { return to_string(c); }

  Terms terms_;
};

using RingElement = Expansion<Int>;
using ModuleElement = Expansion<Rational>;

inline ModuleElement to_module_element(const RingElement& r) {
  ModuleElement m;
  for (const auto& [l, c] : r.terms()) m.add(l, Rational(c));
  return m;
}

}  // namespace fuselab
