#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuselab/algebra.hpp"
#include "fuselab/element.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/module.hpp"
#include "fuselab/rational.hpp"
#include "fuselab/window.hpp"

namespace fuselab {

/// A closed-form positive weight family on the module basis together with a
/// declared mechanism for discharging the inequality on rows outside any
/// finite window.
struct WeightFamily {
  /// How rows beyond the verification window are covered:
  ///  - finite_window: the window must contain the whole (finite) basis;
  ///  - affine_index:  w is affine in the label index and the module declares
  ///    translation-stable action rows from some index on, so the tail
  ///    inequality reduces to one affine comparison checked symbolically;
  ///  - dimension_identity: w is the exact module dimension function, whose
  ///    row identity sum = d(element) * w holds on every row by the module
  ///    dimension axiom.
  enum class Tail { finite_window, affine_index, dimension_identity };

  std::string id;
  std::function<Rational(Label)> weight;
  Tail tail = Tail::finite_window;
  Rational slope = 0;      // affine_index: w(label) = slope * idx + intercept
  Rational intercept = 1;
};

inline WeightFamily affine_weights(Rational slope = 1, Rational intercept = 1) {
  if (slope < 0 || intercept <= 0)
    raise(Errc::weight_not_positive, "affine weights need slope >= 0 and intercept > 0");
  WeightFamily f;
  f.id = "affine:slope=" + to_string(slope) + ",intercept=" + to_string(intercept);
  f.slope = slope;
  f.intercept = intercept;
  f.tail = WeightFamily::Tail::affine_index;
  f.weight = [slope, intercept](Label l) { return slope * Rational(l.idx) + intercept; };
  return f;
}

inline WeightFamily constant_weights(Rational value = 1) {
  if (value <= 0) raise(Errc::weight_not_positive, "constant weight must be positive");
  WeightFamily f;
  f.id = "constant:" + to_string(value);
  f.slope = 0;
  f.intercept = value;
  f.tail = WeightFamily::Tail::affine_index;
  f.weight = [value](Label) { return value; };
  return f;
}

/// Exact module dimensions as weights; the tail is covered by the module
/// dimension identity rather than window data.
inline WeightFamily dimension_weights(const FusionModule& M) {
  if (!M.config().dim.has_exact())
    raise(Errc::dimension_not_rational, "dimension weights need exact module dimensions");
  WeightFamily f;
  f.id = "dimension";
  f.tail = WeightFamily::Tail::dimension_identity;
  auto exact = M.config().dim.exact;
  f.weight = [exact](Label l) {
    auto v = exact(l);
    if (!v) raise(Errc::dimension_not_rational, "missing exact dimension value");
    return *v;
  };
  return f;
}

/// User-supplied table of weights; only usable when the window covers the
/// whole basis.
inline WeightFamily explicit_weights(std::map<Label, Rational> table, std::string id = "explicit") {
  WeightFamily f;
  f.id = std::move(id);
  f.tail = WeightFamily::Tail::finite_window;
  auto shared = std::make_shared<const std::map<Label, Rational>>(std::move(table));
  f.weight = [shared](Label l) {
    auto it = shared->find(l);
    if (it == shared->end())
      raise(Errc::weight_not_positive, "no weight declared for label index " + std::to_string(l.idx));
    return it->second;
  };
  return f;
}

struct CertificateRecord {
  bool certified = false;
  Rational bound = 0;  // the constant C that was checked
  std::string family_id;
  std::vector<std::string> log;
  std::optional<std::string> failure_witness;
};

namespace detail {

/// Offset pattern of one full action row: (index offset, multiplicity),
/// sorted by offset.
using RowPattern = std::vector<std::pair<std::int64_t, Int>>;

inline RowPattern row_pattern(const FusionModule& M, const RingElement& s, Label alpha) {
  std::map<std::int64_t, Int> acc;
  for (const auto& [lu, cu] : s.terms())
    for (const auto& [b, n] : M.action(lu, alpha)) acc[b.idx - alpha.idx] += cu * n;
  return {acc.begin(), acc.end()};
}

struct CertificateContext {
  const FusionModule& M;
  RingElement s;
  ActionWindow window;
  std::vector<std::string> log;
};

inline CertificateContext certificate_context(const FusionModule& M, const RingElement& u_sym,
                                              int radius) {
  if (u_sym.zero()) raise(Errc::zero_element, "cannot certify the zero element");
  std::vector<Label> support;
  for (const auto& [l, c] : u_sym.terms()) {
    if (c < 0)
      raise(Errc::negative_coefficient,
            "coefficient of " + M.algebra().basis().name(l) + " is negative");
    support.push_back(l);
  }
  if (conjugate(M.algebra(), u_sym) != u_sym)
    raise(Errc::not_symmetric_element, "certificates need a conjugation-symmetric element");
  CertificateContext ctx{M, u_sym, enumerate_ball(M, support, radius), {}};
  ctx.log.push_back("element " + u_sym.display(M.algebra().basis()) + ", window radius " +
                    std::to_string(radius) + " (" + std::to_string(ctx.window.size()) + " labels)");
  return ctx;
}

/// Data for the symbolic affine tail comparison: rows with index >= start
/// share the offsets pattern, with total mass S and first moment T.
struct AffineTail {
  std::int64_t start = 0;
  Rational mass;    // S = sum of multiplicities
  Rational moment;  // T = sum of multiplicity * offset
  RowPattern pattern;
};

/// Extracts and cross-checks the translation-stable row pattern declared by
/// the module; nullopt (with a log line) when the declarations or the
/// window do not support a symbolic tail.
inline std::optional<AffineTail> affine_tail(CertificateContext& ctx) {
  const FusionModule& M = ctx.M;
  if (M.basis().kind() != Basis::Kind::nonneg_indexed) {
    ctx.log.push_back("tail: basis is not an ascending indexed family; affine tail unavailable");
    return std::nullopt;
  }
  const auto& declared = M.config().tail_stable_from;
  if (!declared) {
    ctx.log.push_back("tail: module declares no translation-stable rows; affine tail unavailable");
    return std::nullopt;
  }
  std::int64_t start = 0;
  for (const auto& [lu, cu] : ctx.s.terms()) {
    auto from = declared(lu);
    if (!from) {
      ctx.log.push_back("tail: no stability declaration for " + M.algebra().basis().name(lu));
      return std::nullopt;
    }
    start = std::max(start, *from);
  }
  std::int64_t max_idx = -1;
  for (Label l : ctx.window.labels) max_idx = std::max(max_idx, l.idx);
  for (std::int64_t i = 0; i <= start; ++i)
    if (!ctx.window.contains(Label{i})) {
      ctx.log.push_back("tail: window misses boundary index " + std::to_string(i));
      return std::nullopt;
    }
  if (max_idx < start) {
    ctx.log.push_back("tail: window shows no stable row (needs index >= " + std::to_string(start) + ")");
    return std::nullopt;
  }

  AffineTail tail;
  tail.start = start;
  bool first = true;
  for (Label l : ctx.window.labels) {
    if (l.idx < start) continue;
    RowPattern p = row_pattern(M, ctx.s, l);
    if (first) {
      tail.pattern = std::move(p);
      first = false;
    } else if (p != tail.pattern) {
      raise(Errc::internal_inconsistency,
            "declared translation stability contradicted at index " + std::to_string(l.idx));
    }
  }
  tail.mass = 0;
  tail.moment = 0;
  std::string desc;
  for (const auto& [off, m] : tail.pattern) {
    tail.mass += Rational(m);
    tail.moment += Rational(m) * Rational(off);
    if (!desc.empty()) desc += ", ";
    desc += to_string(m) + "@" + std::to_string(off);
  }
  ctx.log.push_back("tail: stable row pattern from index " + std::to_string(start) + ": {" + desc +
                    "}, mass " + to_string(tail.mass) + ", moment " + to_string(tail.moment));
  return tail;
}

/// Minimal constant the affine tail admits: C >= S always, plus the boundary
/// comparison at the first stable index when the moment pulls upward.
inline Rational affine_tail_min_constant(const AffineTail& tail, const Rational& slope,
                                         const Rational& intercept) {
  Rational c = tail.mass;
  if (slope > 0 && tail.moment > 0)
    c += slope * tail.moment / (slope * Rational(tail.start) + intercept);
  return c;
}

/// Whether (C - S)(slope*k + intercept) >= slope*T for all integers
/// k >= start — the tail inequality in symbolic form.
inline bool affine_tail_holds(const AffineTail& tail, const Rational& C, const Rational& slope,
                              const Rational& intercept) {
  Rational gap = C - tail.mass;
  if (gap * slope < 0) return false;  // affine left side eventually negative
  Rational at_start = gap * (slope * Rational(tail.start) + intercept) - slope * tail.moment;
  return at_start >= 0;
}

}  // namespace detail

/// Verifies the subinvariant-weight inequality sum_beta Gamma[beta,alpha] *
/// w(beta) <= C * w(alpha) in exact rational arithmetic: numerically on
/// every full (untruncated) row of the verification window, and symbolically
/// on the tail via the family's declared mechanism. A success certifies
/// ||Gamma|| <= C for the self-adjoint nonnegative action operator.
inline CertificateRecord certify_upper_bound(const FusionModule& M, const RingElement& u_sym,
                                             const Rational& C, const WeightFamily& family,
                                             int radius = 32) {
  detail::CertificateContext ctx = detail::certificate_context(M, u_sym, radius);
  CertificateRecord rec;
  rec.bound = C;
  rec.family_id = family.id;

  if (family.tail == WeightFamily::Tail::affine_index &&
      (family.slope < 0 || family.intercept <= 0))
    raise(Errc::weight_not_positive, "affine weights need slope >= 0 and intercept > 0");

  auto basis_size = M.basis().size();
  bool covered = basis_size && ctx.window.size() == *basis_size;
  // An affine family is only defined on an ascending indexed basis (signed
  // indices would make some weights non-positive); bail before touching any
  // row unless the window already covers the whole basis.
  if (!covered && family.tail == WeightFamily::Tail::affine_index &&
      M.basis().kind() != Basis::Kind::nonneg_indexed) {
    ctx.log.push_back("tail: basis is not an ascending indexed family; affine tail unavailable");
    rec.log = std::move(ctx.log);
    return rec;
  }

  // Numeric phase: every window row, full action support, exact arithmetic.
  for (Label alpha : ctx.window.labels) {
    Rational w_alpha = family.weight(alpha);
    if (w_alpha <= 0)
      raise(Errc::weight_not_positive,
            "weight of " + M.basis().name(alpha) + " is " + to_string(w_alpha));
    ModuleElement row = act(M, u_sym, ModuleElement::basis(alpha));
    Rational lhs = 0;
    for (const auto& [b, c] : row.terms()) {
      Rational w_b = family.weight(b);
      if (w_b <= 0)
        raise(Errc::weight_not_positive, "weight of " + M.basis().name(b) + " is " + to_string(w_b));
      lhs += c * w_b;
    }
    if (lhs > C * w_alpha) {
      rec.failure_witness = M.basis().name(alpha);
      ctx.log.push_back("InequalityFails at " + M.basis().name(alpha) + ": row sum " + to_string(lhs) +
                        " > " + to_string(C * w_alpha));
      rec.log = std::move(ctx.log);
      return rec;
    }
  }
  ctx.log.push_back("window rows verified: " + std::to_string(ctx.window.size()) +
                    " exact row inequalities hold at C = " + to_string(C));

  // Tail phase.
  bool tail_ok = false;
  if (covered) {
    ctx.log.push_back("tail: window covers the whole basis; nothing outside it");
    tail_ok = true;
  } else {
    switch (family.tail) {
      case WeightFamily::Tail::finite_window:
        ctx.log.push_back("tail: basis extends beyond the window and the family declares no closed form");
        break;
      case WeightFamily::Tail::dimension_identity: {
        if (!M.config().dim_identity_exact) {
          ctx.log.push_back("tail: module does not declare an exact dimension identity");
          break;
        }
        auto d = dim_of_exact(M.algebra(), u_sym);
        if (!d) {
          ctx.log.push_back("tail: element has no exact dimension");
          break;
        }
        if (*d <= C) {
          ctx.log.push_back("tail: dimension identity gives row sum = " + to_string(*d) +
                            " * w on every row; " + to_string(*d) + " <= " + to_string(C));
          tail_ok = true;
        } else {
          rec.failure_witness = "tail";
          ctx.log.push_back("InequalityFails on the tail: dimension identity needs C >= " + to_string(*d));
        }
        break;
      }
      case WeightFamily::Tail::affine_index: {
        auto tail = detail::affine_tail(ctx);
        if (!tail) break;
        if (detail::affine_tail_holds(*tail, C, family.slope, family.intercept)) {
          ctx.log.push_back("tail: affine inequality holds for every index >= " +
                            std::to_string(tail->start));
          tail_ok = true;
        } else {
          rec.failure_witness = "tail";
          ctx.log.push_back("InequalityFails on the tail: needs C >= " +
                            to_string(detail::affine_tail_min_constant(*tail, family.slope,
                                                                       family.intercept)));
        }
        break;
      }
    }
  }

  rec.certified = tail_ok && !rec.failure_witness;
  if (rec.certified)
    ctx.log.push_back("certified: operator norm <= " + to_string(C));
  rec.log = std::move(ctx.log);
  return rec;
}

/// Smallest constant this family can certify for the element at the given
/// window, or nullopt when the tail obligation cannot be discharged.
inline std::optional<Rational> tightest_certificate_constant(const FusionModule& M,
                                                             const RingElement& u_sym,
                                                             const WeightFamily& family,
                                                             int radius = 32) {
  detail::CertificateContext ctx = detail::certificate_context(M, u_sym, radius);
  auto basis_size = M.basis().size();
  bool covered = basis_size && ctx.window.size() == *basis_size;
  if (!covered && family.tail == WeightFamily::Tail::affine_index &&
      M.basis().kind() != Basis::Kind::nonneg_indexed)
    return std::nullopt;  // affine weights need an ascending indexed basis

  Rational c_min = 0;
  for (Label alpha : ctx.window.labels) {
    Rational w_alpha = family.weight(alpha);
    if (w_alpha <= 0) raise(Errc::weight_not_positive, "weight of " + M.basis().name(alpha) + " is not positive");
    ModuleElement row = act(M, u_sym, ModuleElement::basis(alpha));
    Rational lhs = 0;
    for (const auto& [b, c] : row.terms()) lhs += c * family.weight(b);
    c_min = std::max(c_min, Rational(lhs / w_alpha));
  }

  if (covered) return c_min;

  switch (family.tail) {
    case WeightFamily::Tail::finite_window:
      return std::nullopt;
    case WeightFamily::Tail::dimension_identity: {
      if (!M.config().dim_identity_exact) return std::nullopt;
      auto d = dim_of_exact(M.algebra(), u_sym);
      if (!d) return std::nullopt;
      return std::max(c_min, *d);
    }
    case WeightFamily::Tail::affine_index: {
      auto tail = detail::affine_tail(ctx);
      if (!tail) return std::nullopt;
      return std::max(c_min, detail::affine_tail_min_constant(*tail, family.slope, family.intercept));
    }
  }
  return std::nullopt;
}

}  // namespace fuselab
