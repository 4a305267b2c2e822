#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fuselab/errors.hpp"

namespace fuselab {

/// A basis label. The integer index is the identity; display names and
/// membership come from the owning Basis. Distinct basis elements always
/// carry distinct indices.
struct Label {
  std::int64_t idx = 0;
  friend constexpr auto operator<=>(const Label&, const Label&) = default;
};

struct LabelHash {
  std::size_t operator()(Label l) const { return std::hash<std::int64_t>{}(static_cast<std::int64_t>(l.idx)); }
};

/// Immutable basis descriptor: either an explicit finite list of names, or a
/// lazily enumerated integer-indexed family (countable bases). All queries
/// are pure, so a Basis is safe to share across threads.
class Basis {
 public:
  enum class Kind {
    finite_named,  // labels 0..n-1 with explicit names
    nonneg_indexed,  // prefix0, prefix1, ... (countably infinite)
    int_indexed,  // ..., prefix-1, prefix0, prefix1, ... (countably infinite)
  };

  static Basis finite(std::vector<std::string> names) {
    Basis b;
    b.kind_ = Kind::finite_named;
    auto lookup = std::make_shared<std::unordered_map<std::string, std::int64_t>>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto [it, inserted] = lookup->emplace(names[i], static_cast<std::int64_t>(i));
      if (!inserted) raise(Errc::unknown_label, "duplicate basis name '" + names[i] + "'");
    }
    b.names_ = std::make_shared<std::vector<std::string>>(std::move(names));
    b.lookup_ = std::move(lookup);
    return b;
  }

  static Basis nonneg_indexed(std::string prefix) {
    Basis b;
    b.kind_ = Kind::nonneg_indexed;
    b.prefix_ = std::move(prefix);
    return b;
  }

  static Basis int_indexed(std::string prefix) {
    Basis b;
    b.kind_ = Kind::int_indexed;
    b.prefix_ = std::move(prefix);
    return b;
  }

  Kind kind() const { return kind_; }
  bool finite_basis() const { return kind_ == Kind::finite_named; }

  std::optional<std::size_t> size() const {
    if (kind_ == Kind::finite_named) return names_->size();
    return std::nullopt;
  }

  bool contains(Label l) const {
    switch (kind_) {
      case Kind::finite_named:
        return l.idx >= 0 && static_cast<std::size_t>(l.idx) < names_->size();
      case Kind::nonneg_indexed:
        return l.idx >= 0;
      case Kind::int_indexed:
        return true;
    }
    return false;
  }

  std::string name(Label l) const {
    if (!contains(l)) raise(Errc::unknown_label, "label index " + std::to_string(l.idx) + " outside basis");
    if (kind_ == Kind::finite_named) return (*names_)[static_cast<std::size_t>(l.idx)];
    return prefix_ + std::to_string(l.idx);
  }

  std::optional<Label> find(std::string_view name) const {
    if (kind_ == Kind::finite_named) {
      auto it = lookup_->find(std::string(name));
      if (it == lookup_->end()) return std::nullopt;
      return Label{it->second};
    }
    if (name.size() <= prefix_.size() || name.substr(0, prefix_.size()) != prefix_) return std::nullopt;
    std::string_view tail = name.substr(prefix_.size());
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
    if (ec != std::errc{} || ptr != tail.data() + tail.size()) return std::nullopt;
    if (!contains(Label{value})) return std::nullopt;
    // reject non-canonical spellings like "u007"
    if (name != prefix_ + std::to_string(value)) return std::nullopt;
    return Label{value};
  }

  Label parse(std::string_view name) const {
    auto l = find(name);
    if (!l) raise(Errc::unknown_label, "'" + std::string(name) + "' is not a basis label");
    return *l;
  }

  /// Finite bases only: all labels in index order.
  std::vector<Label> labels() const {
    if (kind_ != Kind::finite_named) raise(Errc::not_finite, "basis is not finite");
    std::vector<Label> out;
    out.reserve(names_->size());
    for (std::size_t i = 0; i < names_->size(); ++i) out.push_back(Label{static_cast<std::int64_t>(i)});
    return out;
  }

 private:
  Kind kind_ = Kind::finite_named;
  std::string prefix_;
  std::shared_ptr<const std::vector<std::string>> names_;
  std::shared_ptr<const std::unordered_map<std::string, std::int64_t>> lookup_;
};

}  // namespace fuselab
