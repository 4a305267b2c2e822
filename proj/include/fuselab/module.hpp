#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fuselab/algebra.hpp"
#include "fuselab/element.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/label.hpp"
#include "fuselab/rational.hpp"
#include "fuselab/validation.hpp"

namespace fuselab {

struct FusionModuleConfig {
  AlgebraPtr algebra;
  Basis basis;
  std::function<Product(Label, Label)> rules;  // (algebra label, module label) -> action support
  DimensionFunction dim;
  Label seed{};
  std::string description;

  /// Optional declaration for certificate tail checks: for an algebra label
  /// u, action rows on module labels with index >= the returned bound have
  /// translation-stable support offsets (nonneg-indexed bases only).
  std::function<std::optional<std::int64_t>(Label)> tail_stable_from;

  /// True when both dimension functions are exact rationals and the
  /// dimension-compatibility identity holds exactly on all rows, so
  /// dimension weights certify without a window tail obligation.
  bool dim_identity_exact = false;
};

/// A fusion module handle over a fixed algebra. Immutable after
/// construction; safe to share read-only provided the closures are pure.
class FusionModule {
 public:
  explicit FusionModule(FusionModuleConfig cfg) : cfg_(std::move(cfg)) {}

  const FusionAlgebra& algebra() const { return *cfg_.algebra; }
  AlgebraPtr algebra_ptr() const { return cfg_.algebra; }
  const Basis& basis() const { return cfg_.basis; }
  Label seed() const { return cfg_.seed; }
  const std::string& description() const { return cfg_.description; }
  const FusionModuleConfig& config() const { return cfg_; }

  /// Memoized, normalized action of an algebra basis label on a module
  /// basis label.
  const Product& action(Label u, Label a) const {
    if (!cfg_.algebra->basis().contains(u))
      raise(Errc::unknown_label, "algebra label index " + std::to_string(u.idx) + " outside basis");
    if (!cfg_.basis.contains(a))
      raise(Errc::unknown_label, "module label index " + std::to_string(a.idx) + " outside basis");
    std::lock_guard<std::mutex> lock(memo_mutex_);
    auto key = std::make_pair(u, a);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Product raw = cfg_.rules(u, a);
    std::map<Label, Int> acc;
    for (const auto& [l, c] : raw) {
      if (c <= 0)
        raise(Errc::non_positive_multiplicity,
              "action " + cfg_.algebra->basis().name(u) + " on " + cfg_.basis.name(a) +
                  " emits multiplicity " + to_string(c));
      if (!cfg_.basis.contains(l))
        raise(Errc::unknown_label, "action " + cfg_.algebra->basis().name(u) + " on " +
                                       cfg_.basis.name(a) + " references a label outside the module basis");
      acc[l] += c;
    }
    Product norm(acc.begin(), acc.end());
    return memo_.emplace(key, std::move(norm)).first->second;
  }

  double dim(Label a) const {
    if (!cfg_.basis.contains(a))
      raise(Errc::unknown_label, "module label index " + std::to_string(a.idx) + " outside basis");
    return cfg_.dim.value(a);
  }

  std::optional<Rational> dim_exact(Label a) const {
    if (!cfg_.basis.contains(a))
      raise(Errc::unknown_label, "module label index " + std::to_string(a.idx) + " outside basis");
    if (!cfg_.dim.exact) return std::nullopt;
    return cfg_.dim.exact(a);
  }

 private:
  FusionModuleConfig cfg_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::pair<Label, Label>, Product> memo_;
};

using ModulePtr = std::shared_ptr<const FusionModule>;

inline ModuleElement act(const FusionModule& M, const RingElement& u, const ModuleElement& m) {
  ModuleElement out;
  for (const auto& [lu, cu] : u.terms())
    for (const auto& [la, ca] : m.terms()) {
      Rational scale = Rational(cu) * ca;
      for (const auto& [l, n] : M.action(lu, la)) out.add(l, scale * Rational(n));
    }
  return out;
}

/// Constructs the handle and checks that the unit acts as the identity on
/// the seed. Deep validation is validate_module.
inline ModulePtr make_fusion_module(FusionModuleConfig cfg) {
  auto M = std::make_shared<const FusionModule>(std::move(cfg));
  const auto& c = M->config();
  if (!c.algebra) raise(Errc::internal_inconsistency, "module without algebra");
  if (!c.rules) raise(Errc::internal_inconsistency, "missing action provider");
  if (!c.dim.value) raise(Errc::internal_inconsistency, "missing module dimension function");
  if (!c.basis.contains(c.seed)) raise(Errc::unknown_label, "seed label outside module basis");
  Product want = {{c.seed, Int(1)}};
  if (M->action(c.algebra->unit(), c.seed) != want)
    raise(Errc::unit_action_violation, "unit does not act as identity on seed " + c.basis.name(c.seed));
  return M;
}

/// The algebra acting on itself: module basis and constants are the
/// algebra's own, seed is the unit.
inline ModulePtr regular_module(AlgebraPtr A) {
  FusionModuleConfig cfg;
  cfg.algebra = A;
  cfg.basis = A->basis();
  cfg.rules = [A](Label u, Label a) { return A->product(u, a); };
  cfg.dim = A->config().dim;
  cfg.seed = A->unit();
  cfg.description = "regular module of " + A->description();
  cfg.tail_stable_from = A->config().tail_stable_from;
  cfg.dim_identity_exact = A->config().dim.has_exact();
  return make_fusion_module(std::move(cfg));
}

/// Ball of the given radius around the seed under action by the given
/// algebra labels (callers pass an involution-closed set). Deterministic:
/// layers in generation order, new labels sorted within each layer.
inline BallLayers module_ball(const FusionModule& M, const std::vector<Label>& support, int radius,
                              std::size_t cap = max_ball_cap()) {
  if (radius < 0) raise(Errc::usage_error, "radius must be nonnegative");
  BallLayers ball;
  std::set<Label> seen;
  ball.labels.push_back(M.seed());
  seen.insert(M.seed());
  ball.layer_offsets.push_back(1);
  std::size_t frontier_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t frontier_end = ball.labels.size();
    std::set<Label> fresh;
    for (std::size_t i = frontier_begin; i < frontier_end; ++i)
      for (Label u : support)
        for (const auto& [l, n] : M.action(u, ball.labels[i]))
          if (!seen.count(l)) fresh.insert(l);
    for (Label l : fresh) {
      ball.labels.push_back(l);
      seen.insert(l);
      if (ball.labels.size() > cap)
        raise(Errc::ball_overflow, "module ball exceeds cap of " + std::to_string(cap) + " labels");
    }
    ball.layer_offsets.push_back(ball.labels.size());
    frontier_begin = frontier_end;
  }
  return ball;
}

/// Radius-bounded deep validation of the module axioms: adjointness, unit
/// action, mixed associativity against algebra multiplication, module
/// dimension positivity, and the dimension-compatibility identity
/// sum_beta c^beta_{u,alpha} d^M(beta) = d^R(u) d^M(alpha) (equivalently the
/// normalized weighted-sum form), within eps_dim.
inline ValidationReport validate_module(const FusionModule& M, int radius, double eps_dim = 1e-9,
                                        std::size_t max_violations = 100) {
  if (radius < 1) raise(Errc::usage_error, "validation radius must be >= 1");
  const FusionAlgebra& A = M.algebra();
  std::vector<Label> support = A.symmetric_generators();
  BallLayers mod_ball = module_ball(M, support, radius);
  BallLayers alg_ball = algebra_ball(A, radius);
  std::vector<Label> mod_labels = mod_ball.labels;
  // A finite declared module basis is validated in full: rows on labels the
  // seed does not reach must satisfy the same identities.
  if (M.basis().finite_basis()) {
    std::set<Label> seen(mod_labels.begin(), mod_labels.end());
    for (Label l : M.basis().labels())
      if (seen.insert(l).second) mod_labels.push_back(l);
  }
  ValidationReport rep;
  auto aname = [&](Label l) { return A.basis().name(l); };
  auto mname = [&](Label l) { return M.basis().name(l); };

  for (Label a : mod_labels) {
    ++rep.checks_run;
    if (!(M.dim(a) > 0.0))
      detail::report_violation(rep, max_violations, "module-dimension-positivity", {mname(a)},
                               "d = " + std::to_string(M.dim(a)) + " is not positive");
    Product want = {{a, Int(1)}};
    if (M.action(A.unit(), a) != want)
      detail::report_violation(rep, max_violations, "unit-action", {mname(a)},
                               "unit does not act as identity");
  }

  for (Label u : alg_ball.labels) {
    Label ubar = A.conjugate_label(u);
    for (Label a : mod_labels) {
      ++rep.checks_run;
      const Product& row = M.action(u, a);

      for (const auto& [b, c] : row) {
        Int back = 0;
        for (const auto& [l, m] : M.action(ubar, b))
          if (l == a) back = m;
        if (back != c)
          detail::report_violation(rep, max_violations, "adjointness", {aname(u), mname(a), mname(b)},
                                   "c(" + aname(u) + "," + mname(a) + ";" + mname(b) + ") = " + to_string(c) +
                                       " but c(" + aname(ubar) + "," + mname(b) + ";" + mname(a) + ") = " +
                                       to_string(back));
      }

      double lhs = A.dim(u) * M.dim(a);
      double sum = 0.0;
      for (const auto& [b, c] : row) sum += to_double(c) * M.dim(b);
      if (!detail::dim_close(lhs, sum, eps_dim))
        detail::report_violation(rep, max_violations, "dimension-compatibility", {aname(u), mname(a)},
                                 "sum over action = " + std::to_string(sum) + " but d(u)d(alpha) = " +
                                     std::to_string(lhs) + " (weighted-sum ratio " +
                                     std::to_string(lhs == 0.0 ? 0.0 : sum / lhs) + ")");
    }
  }

  for (Label u : alg_ball.labels)
    for (Label v : alg_ball.labels)
      for (Label a : mod_labels) {
        ++rep.checks_run;
        RingElement uv = multiply(A, RingElement::basis(u), RingElement::basis(v));
        ModuleElement lhs = act(M, uv, ModuleElement::basis(a));
        ModuleElement rhs = act(M, RingElement::basis(u), act(M, RingElement::basis(v), ModuleElement::basis(a)));
        if (lhs != rhs)
          detail::report_violation(rep, max_violations, "mixed-associativity", {aname(u), aname(v), mname(a)},
                                   "(uv) acting on alpha differs from u acting on (v acting on alpha)");
      }

  return rep;
}

}  // namespace fuselab
