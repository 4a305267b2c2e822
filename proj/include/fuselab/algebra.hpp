#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fuselab/element.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/label.hpp"
#include "fuselab/rational.hpp"
#include "fuselab/validation.hpp"

namespace fuselab {

/// Hard cap on enumerated ball sizes; guards against runaway rule providers.
inline std::size_t max_ball_cap() {
  if (const char* s = std::getenv("FUSELAB_MAX_BALL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

/// Product of two basis labels: (label, multiplicity) pairs, sorted by label,
/// every multiplicity strictly positive. Finite by construction.
using Product = std::vector<std::pair<Label, Int>>;

/// Dimension values per basis label. `value` is always callable; `exact` is
/// non-null only when the family has rational dimensions (then the two agree).
struct DimensionFunction {
  std::function<double(Label)> value;
  std::function<std::optional<Rational>(Label)> exact;

  bool has_exact() const { return static_cast<bool>(exact); }
};

struct FusionAlgebraConfig {
  Basis basis;
  Label unit{};
  std::function<Label(Label)> conjugate;
  std::function<Product(Label, Label)> rules;
  DimensionFunction dim;
  std::vector<Label> generators;
  std::string description;
  /// Optional: index from which left-multiplication rows repeat a fixed
  /// offset pattern (carried into the regular module for tail certificates).
  std::function<std::optional<std::int64_t>(Label)> tail_stable_from;
};

/// A fusion algebra handle: basis, unit, involution, rule provider, dimension
/// function, and a declared finite generating set. Immutable after
/// construction; the rule memo is guarded, so read-only sharing across
/// threads is safe as long as the supplied closures are pure.
class FusionAlgebra {
 public:
  explicit FusionAlgebra(FusionAlgebraConfig cfg) : cfg_(std::move(cfg)) {}

  const Basis& basis() const { return cfg_.basis; }
  Label unit() const { return cfg_.unit; }
  const std::vector<Label>& generators() const { return cfg_.generators; }
  const std::string& description() const { return cfg_.description; }
  const FusionAlgebraConfig& config() const { return cfg_; }

  Label conjugate_label(Label l) const {
    require_label(l);
    Label c = cfg_.conjugate(l);
    if (!cfg_.basis.contains(c))
      raise(Errc::unknown_label, "involution sends " + cfg_.basis.name(l) + " outside the basis");
    return c;
  }

  /// Memoized, normalized product of two basis labels.
  const Product& product(Label a, Label b) const {
    require_label(a);
    require_label(b);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    auto key = std::make_pair(a, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Product raw = cfg_.rules(a, b);
    std::map<Label, Int> acc;
    for (const auto& [l, c] : raw) {
      if (c <= 0)
        raise(Errc::non_positive_multiplicity,
              "rule " + cfg_.basis.name(a) + "*" + cfg_.basis.name(b) + " emits multiplicity " +
                  to_string(c) + " at " + (cfg_.basis.contains(l) ? cfg_.basis.name(l) : std::string("<bad label>")));
      if (!cfg_.basis.contains(l))
        raise(Errc::unknown_label,
              "rule " + cfg_.basis.name(a) + "*" + cfg_.basis.name(b) + " references a label outside the basis");
      acc[l] += c;
    }
    Product norm(acc.begin(), acc.end());
    return memo_.emplace(key, std::move(norm)).first->second;
  }

  double dim(Label l) const {
    require_label(l);
    return cfg_.dim.value(l);
  }

  std::optional<Rational> dim_exact(Label l) const {
    require_label(l);
    if (!cfg_.dim.exact) return std::nullopt;
    return cfg_.dim.exact(l);
  }

  /// Generators together with their conjugates, deduplicated, sorted.
  std::vector<Label> symmetric_generators() const {
    std::set<Label> s;
    for (Label g : cfg_.generators) {
      s.insert(g);
      s.insert(conjugate_label(g));
    }
    return {s.begin(), s.end()};
  }

 private:
  void require_label(Label l) const {
    if (!cfg_.basis.contains(l))
      raise(Errc::unknown_label, "label index " + std::to_string(l.idx) + " outside basis");
  }

  FusionAlgebraConfig cfg_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::pair<Label, Label>, Product> memo_;
};

using AlgebraPtr = std::shared_ptr<const FusionAlgebra>;

inline RingElement multiply(const FusionAlgebra& A, const RingElement& a, const RingElement& b) {
  RingElement out;
  for (const auto& [la, ca] : a.terms())
    for (const auto& [lb, cb] : b.terms()) {
      Int scale = ca * cb;
      for (const auto& [l, n] : A.product(la, lb)) out.add(l, scale * n);
    }
  return out;
}

inline RingElement conjugate(const FusionAlgebra& A, const RingElement& a) {
  RingElement out;
  for (const auto& [l, c] : a.terms()) out.add(A.conjugate_label(l), c);
  return out;
}

inline double dim_of(const FusionAlgebra& A, const RingElement& a) {
  double total = 0.0;
  for (const auto& [l, c] : a.terms()) total += to_double(c) * A.dim(l);
  return total;
}

/// Exact variant; nullopt when any supporting label lacks a rational value.
inline std::optional<Rational> dim_of_exact(const FusionAlgebra& A, const RingElement& a) {
  Rational total = 0;
  for (const auto& [l, c] : a.terms()) {
    auto d = A.dim_exact(l);
    if (!d) return std::nullopt;
    total += Rational(c) * *d;
  }
  return total;
}

/// Constructs the handle and runs the shallow checks: membership of unit and
/// generators, unit laws and involutivity on {unit} ∪ generators. Deep,
/// radius-bounded validation is validate_axioms.
inline AlgebraPtr make_fusion_algebra(FusionAlgebraConfig cfg) {
  auto A = std::make_shared<const FusionAlgebra>(std::move(cfg));
  const auto& c = A->config();
  if (!c.basis.contains(c.unit)) raise(Errc::unknown_label, "unit label outside basis");
  if (!c.conjugate) raise(Errc::internal_inconsistency, "missing involution");
  if (!c.rules) raise(Errc::internal_inconsistency, "missing rule provider");
  if (!c.dim.value) raise(Errc::internal_inconsistency, "missing dimension function");
  for (Label g : c.generators)
    if (!c.basis.contains(g)) raise(Errc::unknown_label, "generator outside basis");

  if (A->conjugate_label(c.unit) != c.unit)
    raise(Errc::involution_not_involutive, "involution moves the unit");

  std::vector<Label> probe = c.generators;
  probe.push_back(c.unit);
  for (Label g : probe) {
    Label gbar = A->conjugate_label(g);
    if (A->conjugate_label(gbar) != g)
      raise(Errc::involution_not_involutive,
            "conjugate of conjugate of " + c.basis.name(g) + " is not itself");
    Product want = {{g, Int(1)}};
    if (A->product(c.unit, g) != want)
      raise(Errc::unit_law_violation, "unit*" + c.basis.name(g) + " is not " + c.basis.name(g));
    if (A->product(g, c.unit) != want)
      raise(Errc::unit_law_violation, c.basis.name(g) + "*unit is not " + c.basis.name(g));
  }
  return A;
}

/// Ball of the given radius around the unit under left multiplication by
/// generators and their conjugates. Labels come out in breadth-first
/// generation order, ties broken by label order; layer_offsets[r] is the
/// number of labels within radius r.
struct BallLayers {
  std::vector<Label> labels;
  std::vector<std::size_t> layer_offsets;
};

inline BallLayers algebra_ball(const FusionAlgebra& A, int radius, std::size_t cap = max_ball_cap()) {
  if (radius < 0) raise(Errc::usage_error, "radius must be nonnegative");
  std::vector<Label> gens = A.symmetric_generators();
  BallLayers ball;
  std::set<Label> seen;
  ball.labels.push_back(A.unit());
  seen.insert(A.unit());
  ball.layer_offsets.push_back(1);
  std::size_t frontier_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t frontier_end = ball.labels.size();
    std::set<Label> fresh;
    for (std::size_t i = frontier_begin; i < frontier_end; ++i)
      for (Label g : gens)
        for (const auto& [l, n] : A.product(g, ball.labels[i]))
          if (!seen.count(l)) fresh.insert(l);
    for (Label l : fresh) {
      ball.labels.push_back(l);
      seen.insert(l);
      if (ball.labels.size() > cap)
        raise(Errc::ball_overflow, "algebra ball exceeds cap of " + std::to_string(cap) + " labels");
    }
    ball.layer_offsets.push_back(ball.labels.size());
    frontier_begin = frontier_end;
  }
  return ball;
}

namespace detail {

inline void report_violation(ValidationReport& rep, std::size_t max_violations, std::string check,
                             std::vector<std::string> witnesses, std::string detail) {
  if (rep.violations.size() >= max_violations) {
    rep.truncated = true;
    return;
  }
  rep.violations.push_back({std::move(check), std::move(witnesses), std::move(detail)});
}

inline bool dim_close(double lhs, double rhs, double eps) {
  double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return std::abs(lhs - rhs) <= eps * scale;
}

}  // namespace detail

/// Radius-bounded deep validation: enumerates the ball around the unit and
/// checks, inside it, the involution laws, unit laws, Frobenius reciprocity,
/// anti-multiplicativity, dimension positivity/conjugation/multiplicativity
/// (tolerance eps_dim), and associativity on all triples.
inline ValidationReport validate_axioms(const FusionAlgebra& A, int radius, double eps_dim = 1e-9,
                                        std::size_t max_violations = 100) {
  if (radius < 1) raise(Errc::usage_error, "validation radius must be >= 1");
  BallLayers ball = algebra_ball(A, radius);
  std::vector<Label> B = ball.labels;
  // A finite declared basis is validated in full: every label's rows must
  // satisfy the axioms even when the generating set does not reach them.
  if (A.basis().finite_basis()) {
    std::set<Label> seen(B.begin(), B.end());
    for (Label l : A.basis().labels())
      if (seen.insert(l).second) B.push_back(l);
  }
  ValidationReport rep;
  auto name = [&](Label l) { return A.basis().name(l); };

  // Per-label checks.
  for (Label z : B) {
    ++rep.checks_run;
    Label zbar = A.conjugate_label(z);
    if (A.conjugate_label(zbar) != z)
      detail::report_violation(rep, max_violations, "involution-involutive", {name(z)},
                               "conjugate of conjugate is " + name(A.conjugate_label(zbar)));
    double d = A.dim(z);
    if (d < 1.0 - eps_dim)
      detail::report_violation(rep, max_violations, "dimension-positivity", {name(z)},
                               "d = " + std::to_string(d) + " < 1");
    if (!detail::dim_close(d, A.dim(zbar), eps_dim))
      detail::report_violation(rep, max_violations, "dimension-conjugation", {name(z), name(zbar)},
                               "d(label) = " + std::to_string(d) + " but d(conjugate) = " + std::to_string(A.dim(zbar)));
    Product want = {{z, Int(1)}};
    if (A.product(A.unit(), z) != want)
      detail::report_violation(rep, max_violations, "unit-law", {name(z)}, "unit*label differs from label");
    if (A.product(z, A.unit()) != want)
      detail::report_violation(rep, max_violations, "unit-law", {name(z)}, "label*unit differs from label");
  }

  // Pair checks: Frobenius reciprocity, anti-multiplicativity, dimension
  // multiplicativity.
  for (Label z : B)
    for (Label e : B) {
      ++rep.checks_run;
      Label zbar = A.conjugate_label(z);
      Label ebar = A.conjugate_label(e);
      const Product& p = A.product(z, e);
      for (const auto& [a, n] : p) {
        Int via_zbar = 0;
        for (const auto& [l, m] : A.product(zbar, a))
          if (l == e) via_zbar = m;
        if (via_zbar != n)
          detail::report_violation(rep, max_violations, "frobenius", {name(z), name(e), name(a)},
                                   "N(" + name(z) + "," + name(e) + ";" + name(a) + ") = " + to_string(n) +
                                       " but N(" + name(zbar) + "," + name(a) + ";" + name(e) + ") = " +
                                       to_string(via_zbar));
        Int via_ebar = 0;
        for (const auto& [l, m] : A.product(a, ebar))
          if (l == z) via_ebar = m;
        if (via_ebar != n)
          detail::report_violation(rep, max_violations, "frobenius", {name(z), name(e), name(a)},
                                   "N(" + name(z) + "," + name(e) + ";" + name(a) + ") = " + to_string(n) +
                                       " but N(" + name(a) + "," + name(ebar) + ";" + name(z) + ") = " +
                                       to_string(via_ebar));
      }

      RingElement lhs = conjugate(A, multiply(A, RingElement::basis(z), RingElement::basis(e)));
      RingElement rhs = multiply(A, RingElement::basis(ebar), RingElement::basis(zbar));
      if (lhs != rhs)
        detail::report_violation(rep, max_violations, "anti-multiplicativity", {name(z), name(e)},
                                 "conjugate(product) differs from reversed product of conjugates");

      double prod_dim = A.dim(z) * A.dim(e);
      double sum = 0.0;
      for (const auto& [a, n] : p) sum += to_double(n) * A.dim(a);
      if (!detail::dim_close(prod_dim, sum, eps_dim))
        detail::report_violation(rep, max_violations, "dimension-multiplicativity", {name(z), name(e)},
                                 "d(a)d(b) = " + std::to_string(prod_dim) + " but sum over product = " +
                                     std::to_string(sum));
    }

  // Triple checks: associativity.
  for (Label z : B)
    for (Label e : B)
      for (Label t : B) {
        ++rep.checks_run;
        RingElement ze = multiply(A, RingElement::basis(z), RingElement::basis(e));
        RingElement lhs = multiply(A, ze, RingElement::basis(t));
        RingElement et = multiply(A, RingElement::basis(e), RingElement::basis(t));
        RingElement rhs = multiply(A, RingElement::basis(z), et);
        if (lhs != rhs)
          detail::report_violation(rep, max_violations, "associativity", {name(z), name(e), name(t)},
                                   "(ab)c differs from a(bc)");
      }

  return rep;
}

/// Perron–Frobenius dimension function of a finite algebra: the common
/// positive eigenvector of the transposed left-multiplication matrices of the
/// generating set, normalized to 1 at the unit. Row ratios of the iteration
/// give Collatz–Wielandt brackets, so convergence is certified by ratio
/// spread.
inline DimensionFunction pf_dimension(const FusionAlgebra& A, double tol = 1e-12,
                                      std::size_t max_iter = 100000) {
  if (!A.basis().finite_basis()) raise(Errc::not_finite, "Perron-Frobenius dimensions need a finite basis");
  std::vector<Label> labels = A.basis().labels();
  std::size_t n = labels.size();
  std::size_t unit_pos = static_cast<std::size_t>(A.unit().idx);

  // cols[b] lists (a, weight) with weight = total multiplicity of label a in
  // s*b summed over the symmetric generating set s; iterating x -> I + M^T x.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(n);
  std::vector<Label> gens = A.symmetric_generators();
  for (std::size_t b = 0; b < n; ++b) {
    std::map<std::size_t, double> acc;
    for (Label g : gens)
      for (const auto& [l, m] : A.product(g, labels[b]))
        acc[static_cast<std::size_t>(l.idx)] += to_double(m);
    cols[b] = {acc.begin(), acc.end()};
  }

  // Irreducibility of the generating action: strong connectivity via
  // reachability from and to the unit.
  auto reachable = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {unit_pos};
    seen[unit_pos] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b) {
        for (const auto& [a, w] : cols[b]) {
          (void)w;
          // edge b -> a in the action graph
          std::size_t from = forward ? b : a;
          std::size_t to = forward ? a : b;
          if (from == v && !seen[to]) {
            seen[to] = 1;
            stack.push_back(to);
          }
        }
      }
    }
    return seen;
  };
  auto fwd = reachable(true);
  auto bwd = reachable(false);
  for (std::size_t i = 0; i < n; ++i)
    if (!fwd[i] || !bwd[i])
      raise(Errc::reducible, "generating set does not connect the basis (label " +
                                 A.basis().name(labels[i]) + " unreachable)");

  // Power iteration on I + sum of transposed left-multiplication matrices:
  // y_b = x_b + sum over products. Ratios y_i/x_i bracket 1 + eigenvalue.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  bool converged = false;
  for (std::size_t it = 0; it < max_iter && !converged; ++it) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double acc = x[b];
      for (const auto& [a, w] : cols[b]) acc += w * x[a];
      y[b] = acc;
      double ratio = acc / x[b];
      if (b == 0) {
        lo = hi = ratio;
      } else {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t b = 0; b < n; ++b) x[b] = y[b] / norm;
    converged = (hi - lo) <= tol * hi;
  }
  if (!converged) raise(Errc::no_convergence, "Perron-Frobenius iteration did not converge");

  auto values = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) (*values)[i] = x[i] / x[unit_pos];
  DimensionFunction out;
  Basis basis = A.basis();
  out.value = [values, basis](Label l) {
    if (!basis.contains(l)) raise(Errc::unknown_label, "label outside basis");
    return (*values)[static_cast<std::size_t>(l.idx)];
  };
  return out;
}

}  // namespace fuselab
