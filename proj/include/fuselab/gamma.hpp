#pragma once

#include <map>
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

/// Finitely supported probability measure on the algebra basis: nonnegative
/// rational weights summing to exactly 1.
class ProbabilityMeasure {
 public:
  using Weights = std::map<Label, Rational>;

  static ProbabilityMeasure from_weights(Weights weights) {
    Rational total = 0;
    for (auto it = weights.begin(); it != weights.end();) {
      if (it->second < 0)
        raise(Errc::negative_coefficient, "measure weight is negative");
      if (it->second == 0) {
        it = weights.erase(it);
        continue;
      }
      total += it->second;
      ++it;
    }
    if (total != 1)
      raise(Errc::usage_error, "measure weights sum to " + to_string(total) + ", not 1");
    ProbabilityMeasure m;
    m.weights_ = std::move(weights);
    return m;
  }

  static ProbabilityMeasure dirac(Label l) { return from_weights({{l, Rational(1)}}); }

  const Weights& weights() const { return weights_; }

  Rational weight(Label l) const {
    auto it = weights_.find(l);
    return it == weights_.end() ? Rational(0) : it->second;
  }

  /// Pushforward along the involution: weight(u) moves to conjugate(u).
  ProbabilityMeasure conjugated(const FusionAlgebra& A) const {
    Weights w;
    for (const auto& [l, q] : weights_) w[A.conjugate_label(l)] += q;
    return from_weights(std::move(w));
  }

  /// (mu + conjugated mu) / 2 — symmetric under the involution.
  ProbabilityMeasure symmetrized(const FusionAlgebra& A) const {
    Weights w = weights_;
    for (const auto& [l, q] : weights_) w[A.conjugate_label(l)] += q;
    for (auto& [l, q] : w) q /= 2;
    return from_weights(std::move(w));
  }

  std::string display(const Basis& basis) const {
    std::string out;
    for (const auto& [l, q] : weights_) {
      if (!out.empty()) out += ", ";
      out += to_string(q) + ":" + basis.name(l);
    }
    return out;
  }

  friend bool operator==(const ProbabilityMeasure&, const ProbabilityMeasure&) = default;

 private:
  Weights weights_;
};

/// Compression of a left-action operator to a window: sparse columns of
/// exact rational entries. cols[j] holds (row, entry) pairs sorted by row;
/// col_interior[j] is set when no entry of the full action column was
/// dropped at the window boundary.
struct TruncatedOperator {
  ActionWindow window;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> cols;
  std::vector<char> col_interior;
  std::string element_desc;
  bool exact = true;  // false when double-valued dimensions entered the entries

  std::size_t size() const { return window.size(); }

  Rational entry(std::size_t row, std::size_t col) const {
    for (const auto& [r, v] : cols[col])
      if (r == row) return v;
    return Rational(0);
  }
};

/// Exact compression of the action of u to the window.
inline TruncatedOperator build_gamma(const FusionModule& M, const RingElement& u,
                                     const ActionWindow& window) {
  TruncatedOperator op;
  op.window = window;
  op.cols.resize(window.size());
  op.col_interior.assign(window.size(), 1);
  op.element_desc = u.display(M.algebra().basis());
  for (std::size_t j = 0; j < window.size(); ++j) {
    std::map<std::size_t, Rational> col;
    for (const auto& [lu, cu] : u.terms())
      for (const auto& [b, n] : M.action(lu, window.labels[j])) {
        auto it = window.pos.find(b);
        if (it == window.pos.end()) {
          op.col_interior[j] = 0;
          continue;
        }
        col[it->second] += Rational(cu) * Rational(n);
      }
    op.cols[j].assign(col.begin(), col.end());
  }
  return op;
}

/// Compression of Gamma_mu = sum over u of mu(u)/d(u) * Gamma_u. With
/// require_exact the algebra must have rational dimensions; otherwise
/// double-valued dimensions are embedded exactly per entry and the operator
/// is flagged non-exact.
inline TruncatedOperator build_gamma_mu(const FusionModule& M, const ProbabilityMeasure& mu,
                                        const ActionWindow& window, bool require_exact = false) {
  TruncatedOperator op;
  op.window = window;
  op.cols.resize(window.size());
  op.col_interior.assign(window.size(), 1);
  op.element_desc = "measure " + mu.display(M.algebra().basis());

  std::map<Label, Rational> inv_dim;
  for (const auto& [lu, q] : mu.weights()) {
    auto d = M.algebra().dim_exact(lu);
    if (d) {
      inv_dim[lu] = Rational(1) / *d;
    } else if (require_exact) {
      raise(Errc::dimension_not_rational,
            "no exact dimension for " + M.algebra().basis().name(lu) + " in exact mode");
    } else {
      inv_dim[lu] = Rational(1) / rational_from_double(M.algebra().dim(lu));
      op.exact = false;
    }
  }

  for (std::size_t j = 0; j < window.size(); ++j) {
    std::map<std::size_t, Rational> col;
    for (const auto& [lu, q] : mu.weights())
      for (const auto& [b, n] : M.action(lu, window.labels[j])) {
        auto it = window.pos.find(b);
        if (it == window.pos.end()) {
          op.col_interior[j] = 0;
          continue;
        }
        col[it->second] += q * inv_dim[lu] * Rational(n);
      }
    op.cols[j].assign(col.begin(), col.end());
  }
  return op;
}

/// The measure mu_u with weights c_v d(v) / d(u) for u = sum c_v v in the
/// positive cone; Gamma_{mu_u} is exactly Gamma_u / d(u).
inline ProbabilityMeasure mu_from_positive_element(const FusionAlgebra& A, const RingElement& u) {
  if (u.zero()) raise(Errc::zero_element, "cannot normalize the zero element");
  ProbabilityMeasure::Weights w;
  Rational mass = 0;
  for (const auto& [l, c] : u.terms()) {
    if (c < 0)
      raise(Errc::negative_coefficient, "coefficient of " + A.basis().name(l) + " is negative");
    auto d = A.dim_exact(l);
    if (!d)
      raise(Errc::dimension_not_rational,
            "no exact dimension for " + A.basis().name(l) + " in exact mode");
    Rational atom = Rational(c) * *d;
    w[l] = atom;
    mass += atom;
  }
  for (auto& [l, q] : w) q /= mass;
  return ProbabilityMeasure::from_weights(std::move(w));
}

inline bool is_symmetric(const TruncatedOperator& op) {
  for (std::size_t j = 0; j < op.cols.size(); ++j)
    for (const auto& [i, v] : op.cols[j])
      if (op.entry(j, i) != v) return false;
  return true;
}

inline TruncatedOperator transpose(const TruncatedOperator& op) {
  TruncatedOperator t;
  t.window = op.window;
  t.cols.resize(op.cols.size());
  t.col_interior.assign(op.cols.size(), 1);  // not meaningful for a raw transpose
  t.element_desc = "transpose of " + op.element_desc;
  t.exact = op.exact;
  for (std::size_t j = 0; j < op.cols.size(); ++j)
    for (const auto& [i, v] : op.cols[j]) t.cols[i].emplace_back(j, v);
  return t;
}

}  // namespace fuselab
