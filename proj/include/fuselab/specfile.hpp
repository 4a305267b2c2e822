#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fuselab/algebra.hpp"
#include "fuselab/catalog.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/label.hpp"
#include "fuselab/module.hpp"
#include "fuselab/rational.hpp"

namespace fuselab {

struct SpecRule {
  std::string left, right;
  std::vector<std::pair<std::string, Int>> result;  // sorted by label
  friend bool operator==(const SpecRule&, const SpecRule&) = default;
};

/// Parsed structure of a user definition file: exactly one constructor call
/// (catalog delegation or explicit tables).
struct SpecFile {
  std::string kind;  // "algebra" | "module"
  std::optional<std::string> catalog;            // algebra: delegate to the catalog
  std::optional<std::string> algebra_id;         // module: catalog reference
  std::shared_ptr<SpecFile> algebra_inline;      // module: inline algebra definition
  std::vector<std::string> basis;
  std::string unit;  // algebra
  std::string seed;  // module
  std::vector<SpecRule> rules;
  std::vector<std::pair<std::string, std::string>> involution;  // sorted by source label
  std::vector<std::pair<std::string, Rational>> dims;           // sorted by label
  std::vector<std::string> generators;

  friend bool operator==(const SpecFile& a, const SpecFile& b) {
    auto inline_equal = [](const std::shared_ptr<SpecFile>& x, const std::shared_ptr<SpecFile>& y) {
      if (!x && !y) return true;
      if (!x || !y) return false;
      return *x == *y;
    };
    return a.kind == b.kind && a.catalog == b.catalog && a.algebra_id == b.algebra_id &&
           inline_equal(a.algebra_inline, b.algebra_inline) && a.basis == b.basis && a.unit == b.unit &&
           a.seed == b.seed && a.rules == b.rules && a.involution == b.involution && a.dims == b.dims &&
           a.generators == b.generators;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      raise(Errc::unknown_key, "unknown key '" + it.key() + "' in " + where);
}

inline std::string require_string(const nlohmann::json& j, const std::string& key,
                                  const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    raise(Errc::syntax_error, "missing or non-string '" + key + "' in " + where);
  return j.at(key).get<std::string>();
}

inline std::vector<std::string> parse_basis(const nlohmann::json& j, const std::string& where) {
  if (!j.contains("basis") || !j.at("basis").is_array())
    raise(Errc::syntax_error, "missing or non-array 'basis' in " + where);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : j.at("basis")) {
    if (!item.is_string()) raise(Errc::syntax_error, "basis labels must be strings in " + where);
    std::string name = item.get<std::string>();
    if (!seen.insert(name).second)
      raise(Errc::syntax_error, "duplicate basis label '" + name + "' in " + where);
    out.push_back(std::move(name));
  }
  if (out.empty()) raise(Errc::syntax_error, "empty basis in " + where);
  return out;
}

inline std::vector<SpecRule> parse_rules(const nlohmann::json& j, const std::string& where) {
  std::vector<SpecRule> out;
  if (!j.contains("rules")) return out;
  if (!j.at("rules").is_array()) raise(Errc::syntax_error, "'rules' must be an array in " + where);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& item : j.at("rules")) {
    if (!item.is_object()) raise(Errc::syntax_error, "each rule must be an object in " + where);
    check_keys(item, {"left", "right", "result"}, "rule of " + where);
    SpecRule rule;
    rule.left = require_string(item, "left", "rule of " + where);
    rule.right = require_string(item, "right", "rule of " + where);
    if (!seen.insert({rule.left, rule.right}).second)
      raise(Errc::duplicate_rule, "duplicate rule for (" + rule.left + ", " + rule.right + ")");
    if (!item.contains("result") || !item.at("result").is_object())
      raise(Errc::syntax_error, "rule for (" + rule.left + ", " + rule.right + ") lacks a result object");
    for (auto it = item.at("result").begin(); it != item.at("result").end(); ++it) {
      if (!it.value().is_number_integer() || it.value().get<std::int64_t>() <= 0)
        raise(Errc::multiplicity_not_positive_integer,
              "multiplicity of " + it.key() + " in rule (" + rule.left + ", " + rule.right +
                  ") must be a positive integer");
      rule.result.emplace_back(it.key(), Int(it.value().get<std::int64_t>()));
    }
    std::sort(rule.result.begin(), rule.result.end());
    out.push_back(std::move(rule));
  }
  std::sort(out.begin(), out.end(), [](const SpecRule& a, const SpecRule& b) {
    return std::tie(a.left, a.right) < std::tie(b.left, b.right);
  });
  return out;
}

inline std::vector<std::pair<std::string, Rational>> parse_dims(const nlohmann::json& j,
                                                                const std::string& where) {
  std::vector<std::pair<std::string, Rational>> out;
  if (!j.contains("dims")) return out;
  if (!j.at("dims").is_object()) raise(Errc::syntax_error, "'dims' must be an object in " + where);
  for (auto it = j.at("dims").begin(); it != j.at("dims").end(); ++it) {
    if (it.value().is_number_integer()) {
      out.emplace_back(it.key(), Rational(it.value().get<std::int64_t>()));
    } else if (it.value().is_string()) {
      out.emplace_back(it.key(), parse_rational(it.value().get<std::string>()));
    } else {
      raise(Errc::syntax_error,
            "dimension of " + it.key() + " must be an integer or a rational string in " + where);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline SpecFile parse_spec_json(const nlohmann::json& j, const std::string& where);

inline SpecFile parse_algebra_json(const nlohmann::json& j, const std::string& where) {
  SpecFile s;
  s.kind = "algebra";
  if (j.contains("catalog")) {
    check_keys(j, {"kind", "catalog"}, where);
    if (!j.at("catalog").is_string()) raise(Errc::syntax_error, "'catalog' must be a string in " + where);
    s.catalog = j.at("catalog").get<std::string>();
    return s;
  }
  check_keys(j, {"kind", "basis", "unit", "involution", "rules", "dims", "generators"}, where);
  s.basis = parse_basis(j, where);
  s.unit = require_string(j, "unit", where);
  if (j.contains("involution")) {
    if (!j.at("involution").is_object()) raise(Errc::syntax_error, "'involution' must be an object in " + where);
    for (auto it = j.at("involution").begin(); it != j.at("involution").end(); ++it) {
      if (!it.value().is_string()) raise(Errc::syntax_error, "involution targets must be strings in " + where);
      s.involution.emplace_back(it.key(), it.value().get<std::string>());
    }
    std::sort(s.involution.begin(), s.involution.end());
  }
  s.rules = parse_rules(j, where);
  s.dims = parse_dims(j, where);
  if (j.contains("generators")) {
    if (!j.at("generators").is_array()) raise(Errc::syntax_error, "'generators' must be an array in " + where);
    for (const auto& g : j.at("generators")) {
      if (!g.is_string()) raise(Errc::syntax_error, "generators must be strings in " + where);
      s.generators.push_back(g.get<std::string>());
    }
  }
  return s;
}

inline SpecFile parse_module_json(const nlohmann::json& j, const std::string& where) {
  SpecFile s;
  s.kind = "module";
  check_keys(j, {"kind", "algebra", "basis", "seed", "rules", "dims"}, where);
  if (!j.contains("algebra")) raise(Errc::syntax_error, "module needs an 'algebra' in " + where);
  if (j.at("algebra").is_string()) {
    s.algebra_id = j.at("algebra").get<std::string>();
  } else if (j.at("algebra").is_object()) {
    SpecFile inner = parse_spec_json(j.at("algebra"), "inline algebra of " + where);
    if (inner.kind != "algebra") raise(Errc::syntax_error, "inline algebra must have kind 'algebra'");
    s.algebra_inline = std::make_shared<SpecFile>(std::move(inner));
  } else {
    raise(Errc::syntax_error, "'algebra' must be a catalog id or an inline object in " + where);
  }
  s.basis = parse_basis(j, where);
  s.seed = require_string(j, "seed", where);
  s.rules = parse_rules(j, where);
  s.dims = parse_dims(j, where);
  return s;
}

inline SpecFile parse_spec_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) raise(Errc::syntax_error, "top level must be an object in " + where);
  std::string kind = require_string(j, "kind", where);
  if (kind == "algebra") return parse_algebra_json(j, where);
  if (kind == "module") return parse_module_json(j, where);
  raise(Errc::syntax_error, "kind must be 'algebra' or 'module', got '" + kind + "' in " + where);
}

}  // namespace detail

inline SpecFile parse_spec_text(const std::string& text, const std::string& source = "input") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_col(text, e.byte > 0 ? static_cast<std::size_t>(e.byte) - 1 : 0);
    raise(Errc::syntax_error, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                                  e.what());
  }
  return detail::parse_spec_json(j, source);
}

inline SpecFile parse_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path);
}

/// Canonical byte-stable form: keys sorted, rules sorted by (left, right),
/// dimensions as exact rational strings, two-space indentation, trailing
/// newline.
inline std::string emit_canonical(const SpecFile& s) {
  std::function<nlohmann::json(const SpecFile&)> to_json = [&](const SpecFile& f) {
    nlohmann::json j;
    j["kind"] = f.kind;
    if (f.catalog) {
      j["catalog"] = *f.catalog;
      return j;
    }
    if (f.kind == "module") {
      if (f.algebra_id) j["algebra"] = *f.algebra_id;
      if (f.algebra_inline) j["algebra"] = to_json(*f.algebra_inline);
      j["seed"] = f.seed;
    } else {
      j["unit"] = f.unit;
      if (!f.involution.empty()) {
        nlohmann::json inv = nlohmann::json::object();
        for (const auto& [a, b] : f.involution) inv[a] = b;
        j["involution"] = inv;
      }
      if (!f.generators.empty()) j["generators"] = f.generators;
    }
    j["basis"] = f.basis;
    if (!f.rules.empty()) {
      nlohmann::json rules = nlohmann::json::array();
      for (const auto& r : f.rules) {
        nlohmann::json result = nlohmann::json::object();
        for (const auto& [label, mult] : r.result) {
          if (mult > Int(std::numeric_limits<std::int64_t>::max()))
            raise(Errc::io_error, "multiplicity too large to serialize");
          result[label] = mult.convert_to<std::int64_t>();
        }
        rules.push_back({{"left", r.left}, {"right", r.right}, {"result", result}});
      }
      j["rules"] = rules;
    }
    if (!f.dims.empty()) {
      nlohmann::json dims = nlohmann::json::object();
      for (const auto& [label, value] : f.dims) dims[label] = to_string(value);
      j["dims"] = dims;
    }
    return j;
  };
  return to_json(s).dump(2) + "\n";
}

namespace detail {

struct RuleTable {
  std::map<std::pair<Label, Label>, Product> table;
  Label unit;
  bool unit_rows_synthesized = true;

  Product lookup(Label a, Label b, const Basis& basis) const {
    auto it = table.find({a, b});
    if (it != table.end()) return it->second;
    if (unit_rows_synthesized && (a == unit || b == unit)) return {{a == unit ? b : a, Int(1)}};
    raise(Errc::unknown_rule, "no rule for " + basis.name(a) + " * " + basis.name(b));
  }
};

inline DimensionFunction dims_from_table(const Basis& basis,
                                         const std::vector<std::pair<std::string, Rational>>& dims) {
  auto table = std::make_shared<std::map<Label, Rational>>();
  for (const auto& [name, value] : dims) (*table)[basis.parse(name)] = value;
  DimensionFunction d;
  d.exact = [table](Label l) -> std::optional<Rational> {
    auto it = table->find(l);
    return it == table->end() ? Rational(1) : it->second;
  };
  d.value = [table](Label l) {
    auto it = table->find(l);
    return it == table->end() ? 1.0 : to_double(it->second);
  };
  return d;
}

}  // namespace detail

inline AlgebraPtr build_algebra(const SpecFile& s, const std::string& description = "spec algebra") {
  if (s.kind != "algebra") raise(Errc::usage_error, "expected an algebra definition");
  if (s.catalog) return make_algebra_from_id(*s.catalog);

  Basis basis = Basis::finite(s.basis);
  Label unit = basis.parse(s.unit);

  auto inv = std::make_shared<std::map<Label, Label>>();
  for (const auto& [a, b] : s.involution) {
    Label la = basis.parse(a), lb = basis.parse(b);
    (*inv)[la] = lb;
    if (!inv->count(lb)) (*inv)[lb] = la;  // complete the pair unless overridden
  }

  auto rules = std::make_shared<detail::RuleTable>();
  rules->unit = unit;
  for (const auto& r : s.rules) {
    Label la = basis.parse(r.left), lb = basis.parse(r.right);
    Product p;
    for (const auto& [name, mult] : r.result) p.push_back({basis.parse(name), mult});
    rules->table[{la, lb}] = std::move(p);
  }

  FusionAlgebraConfig cfg;
  cfg.basis = basis;
  cfg.unit = unit;
  cfg.conjugate = [inv](Label l) {
    auto it = inv->find(l);
    return it == inv->end() ? l : it->second;
  };
  cfg.rules = [rules, basis](Label a, Label b) { return rules->lookup(a, b, basis); };
  cfg.dim = detail::dims_from_table(basis, s.dims);
  if (s.generators.empty()) {
    for (Label l : basis.labels())
      if (l != unit) cfg.generators.push_back(l);
  } else {
    for (const auto& g : s.generators) cfg.generators.push_back(basis.parse(g));
  }
  cfg.description = description;
  return make_fusion_algebra(std::move(cfg));
}

inline ModulePtr build_module(const SpecFile& s, const std::string& description = "spec module") {
  if (s.kind != "module") raise(Errc::usage_error, "expected a module definition");
  AlgebraPtr A;
  if (s.algebra_id) {
    A = make_algebra_from_id(*s.algebra_id);
  } else if (s.algebra_inline) {
    A = build_algebra(*s.algebra_inline, description + " (inline algebra)");
  } else {
    raise(Errc::syntax_error, "module definition lacks an algebra");
  }

  Basis basis = Basis::finite(s.basis);
  Label seed = basis.parse(s.seed);

  auto table = std::make_shared<std::map<std::pair<Label, Label>, Product>>();
  for (const auto& r : s.rules) {
    Label lu = A->basis().parse(r.left);
    Label la = basis.parse(r.right);
    auto key = std::make_pair(lu, la);
    Product p;
    for (const auto& [name, mult] : r.result) p.push_back({basis.parse(name), mult});
    (*table)[key] = std::move(p);
  }

  FusionModuleConfig cfg;
  cfg.algebra = A;
  cfg.basis = basis;
  cfg.seed = seed;
  Label unit = A->unit();
  Basis alg_basis = A->basis();
  cfg.rules = [table, unit, basis, alg_basis](Label u, Label a) -> Product {
    auto it = table->find({u, a});
    if (it != table->end()) return it->second;
    if (u == unit) return {{a, Int(1)}};
    raise(Errc::unknown_rule, "no action rule for " + alg_basis.name(u) + " on " + basis.name(a));
  };
  cfg.dim = detail::dims_from_table(basis, s.dims);
  cfg.description = description;
  return make_fusion_module(std::move(cfg));
}

}  // namespace fuselab
