#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fuselab/algebra.hpp"
#include "fuselab/certificate.hpp"
#include "fuselab/element.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/gamma.hpp"
#include "fuselab/module.hpp"
#include "fuselab/spectral.hpp"
#include "fuselab/window.hpp"

namespace fuselab {

enum class Verdict { amenable_numeric, not_amenable_certified, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::amenable_numeric: return "AMENABLE_NUMERIC";
    case Verdict::not_amenable_certified: return "NOT_AMENABLE_CERTIFIED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct LowerBoundEntry {
  int radius = 0;
  std::size_t window_size = 0;
  double bound = 0.0;
  bool converged = false;
};

struct AmenabilityOptions {
  std::vector<int> radii = {8, 32, 128};
  double tol = 1e-3;
  PowerOptions power;
  std::optional<WeightFamily> certificate;
  std::optional<Rational> certificate_constant;  // absent: tightest the family admits
  int certificate_radius = 32;
};

struct AmenabilityReport {
  Verdict verdict = Verdict::inconclusive;
  double target = 0.0;
  std::string element_desc;
  bool measure_mode = false;
  std::vector<LowerBoundEntry> lower_bounds;
  std::optional<CertificateRecord> certificate;
  double tol = 0.0;
  std::vector<std::string> notes;
};

namespace detail {

/// Ball around the unit under an arbitrary symmetric support (the declared
/// generating set is not used here — this asks what the test element itself
/// reaches).
inline bool support_generates(const FusionAlgebra& A, const std::vector<Label>& support,
                              int radius, std::size_t cap) {
  std::set<Label> seen = {A.unit()};
  std::vector<Label> frontier = {A.unit()};
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Label> next;
    for (Label x : frontier)
      for (Label s : support)
        for (const auto& [l, n] : A.product(s, x))
          if (seen.insert(l).second) {
            next.push_back(l);
            if (seen.size() > cap) return true;  // give up: treat as generating
          }
    frontier = std::move(next);
  }
  for (Label g : A.generators())
    if (!seen.count(g)) return false;
  return true;
}

inline void run_bounds(AmenabilityReport& rep, const TruncatedOperator& op,
                       const ActionWindow& window, const std::vector<int>& radii,
                       const PowerOptions& power) {
  std::vector<int> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> prefixes;
  for (int r : sorted) prefixes.push_back(window.prefix_size(r));
  std::vector<NormBound> bounds = norm_lower_bound_sweep(op, prefixes, power);
  double running = 0.0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    // each Rayleigh value is a valid lower bound, so the running max is too
    running = std::max(running, bounds[i].value);
    rep.lower_bounds.push_back({sorted[i], prefixes[i], running, bounds[i].converged});
  }
  double final_bound = rep.lower_bounds.empty() ? 0.0 : rep.lower_bounds.back().bound;
  if (final_bound > rep.target * (1.0 + 1e-9) + 1e-9)
    raise(Errc::internal_inconsistency,
          "lower bound " + std::to_string(final_bound) + " exceeds the norm ceiling " +
              std::to_string(rep.target));
}

inline void apply_certificate(AmenabilityReport& rep, const FusionModule& M, const RingElement& s,
                              const AmenabilityOptions& opts) {
  if (!opts.certificate) return;
  Rational C;
  if (opts.certificate_constant) {
    C = *opts.certificate_constant;
  } else {
    auto tight = tightest_certificate_constant(M, s, *opts.certificate, opts.certificate_radius);
    if (!tight) {
      rep.notes.push_back("certificate family '" + opts.certificate->id +
                          "' cannot discharge its tail obligation here; skipped");
      return;
    }
    C = *tight;
  }
  CertificateRecord rec = certify_upper_bound(M, s, C, *opts.certificate, opts.certificate_radius);
  if (rec.certified) {
    double c_val = to_double(rec.bound);
    for (const auto& lb : rep.lower_bounds)
      if (lb.bound > c_val * (1.0 + 1e-9) + 1e-9)
        raise(Errc::internal_inconsistency,
              "certified bound " + to_string(rec.bound) + " sits below the computed lower bound " +
                  std::to_string(lb.bound));
  }
  rep.certificate = std::move(rec);
}

inline void decide(AmenabilityReport& rep, double tol) {
  double final_bound = rep.lower_bounds.empty() ? 0.0 : rep.lower_bounds.back().bound;
  if (final_bound >= rep.target - tol) {
    rep.verdict = Verdict::amenable_numeric;
  } else if (rep.certificate && rep.certificate->certified &&
             to_double(rep.certificate->bound) < rep.target - tol) {
    rep.verdict = Verdict::not_amenable_certified;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
}

}  // namespace detail

/// Per-element amenability probe: symmetrizes the test element to
/// s = u + conjugate(u), targets d(s), runs monotone lower bounds over the
/// radius schedule, and consults an optional certificate when the bounds
/// stay short of the target.
inline AmenabilityReport amenability_test(const FusionModule& M, const RingElement& test,
                                          const AmenabilityOptions& opts = {}) {
  if (test.zero()) raise(Errc::zero_element, "test element is zero");
  for (const auto& [l, c] : test.terms())
    if (c < 0)
      raise(Errc::negative_coefficient,
            "coefficient of " + M.algebra().basis().name(l) + " is negative");
  if (opts.radii.empty()) raise(Errc::usage_error, "empty radius schedule");

  const FusionAlgebra& A = M.algebra();
  RingElement s = test + conjugate(A, test);
  AmenabilityReport rep;
  rep.tol = opts.tol;
  rep.element_desc = s.display(A.basis());
  rep.target = dim_of(A, s);
  rep.notes.push_back("numeric verdicts are per-element evidence at the given tolerance; "
                      "only a certified upper bound is a proof");

  std::vector<Label> support;
  for (const auto& [l, c] : s.terms()) support.push_back(l);
  if (!detail::support_generates(A, support, 8, 4096))
    rep.notes.push_back("test support does not visibly generate the algebra within radius 8; "
                        "the verdict covers only this element");

  int max_radius = *std::max_element(opts.radii.begin(), opts.radii.end());
  ActionWindow window = enumerate_ball(M, support, max_radius);
  TruncatedOperator op = build_gamma(M, s, window);
  detail::run_bounds(rep, op, window, opts.radii, opts.power);
  detail::apply_certificate(rep, M, s, opts);
  detail::decide(rep, opts.tol);
  return rep;
}

/// Measure variant: symmetrizes mu, targets 1 (Gamma of a probability
/// measure is a contraction), same bound schedule. Certificates apply to
/// ring elements only and are ignored here with a note.
inline AmenabilityReport amenability_test(const FusionModule& M, const ProbabilityMeasure& mu,
                                          const AmenabilityOptions& opts = {}) {
  if (opts.radii.empty()) raise(Errc::usage_error, "empty radius schedule");
  const FusionAlgebra& A = M.algebra();
  ProbabilityMeasure sym = mu.symmetrized(A);
  AmenabilityReport rep;
  rep.tol = opts.tol;
  rep.measure_mode = true;
  rep.element_desc = "measure " + sym.display(A.basis());
  rep.target = 1.0;
  rep.notes.push_back("numeric verdicts are per-measure evidence at the given tolerance");
  if (opts.certificate)
    rep.notes.push_back("certificates apply to ring elements; ignored for a measure test");

  std::vector<Label> support;
  for (const auto& [l, q] : sym.weights()) support.push_back(l);
  if (!detail::support_generates(A, support, 8, 4096))
    rep.notes.push_back("test support does not visibly generate the algebra within radius 8; "
                        "the verdict covers only this measure");

  int max_radius = *std::max_element(opts.radii.begin(), opts.radii.end());
  ActionWindow window = enumerate_ball(M, support, max_radius);
  TruncatedOperator op = build_gamma_mu(M, sym, window);
  detail::run_bounds(rep, op, window, opts.radii, opts.power);
  detail::decide(rep, opts.tol);
  return rep;
}

/// Kesten-style surrogate: whether the largest eigenvalue of half the
/// symmetrized action operator on the window reaches d(u) - tol.
inline bool kesten_norm_check(const FusionModule& M, Label u, const ActionWindow& window,
                              double tol, PowerOptions power = {}) {
  const FusionAlgebra& A = M.algebra();
  RingElement s = RingElement::basis(u) + RingElement::basis(A.conjugate_label(u));
  TruncatedOperator op = build_gamma(M, s, window);
  NormBound nb = norm_lower_bound(op, power);
  return nb.value / 2.0 >= A.dim(u) - tol;
}

}  // namespace fuselab
