#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "fuselab/errors.hpp"
#include "fuselab/gamma.hpp"
#include "fuselab/rational.hpp"

namespace fuselab {

struct PowerOptions {
  std::size_t max_iter = 100000;
  double tol = 1e-12;  // relative Rayleigh-step tolerance
};

struct NormBound {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

namespace detail {

/// Double-precision CSC view of the leading m-by-m compression.
struct PrefixCsc {
  std::size_t m = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> cols;
  bool symmetric = true;
};

inline PrefixCsc make_prefix(const TruncatedOperator& op, std::size_t m) {
  if (m == 0 || m > op.size()) raise(Errc::usage_error, "prefix size outside window");
  PrefixCsc p;
  p.m = m;
  p.cols.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& [i, v] : op.cols[j]) {
      if (v < 0)
        raise(Errc::negative_coefficient, "norm bounds need a nonnegative matrix; entry (" +
                                              std::to_string(i) + "," + std::to_string(j) + ") is " +
                                              to_string(v));
      if (i < m) p.cols[j].emplace_back(i, to_double(v));
    }
  for (std::size_t j = 0; j < m && p.symmetric; ++j)
    for (const auto& [i, v] : op.cols[j]) {
      if (i >= m) continue;
      if (op.entry(j, i) != v) {
        p.symmetric = false;
        break;
      }
    }
  return p;
}

inline void apply(const PrefixCsc& p, const std::vector<double>& x, std::vector<double>& y) {
  y.assign(p.m, 0.0);
  for (std::size_t j = 0; j < p.m; ++j) {
    double xj = x[j];
    if (xj == 0.0) continue;
    for (const auto& [i, v] : p.cols[j]) y[i] += v * xj;
  }
}

inline void apply_transpose(const PrefixCsc& p, const std::vector<double>& x, std::vector<double>& y) {
  y.assign(p.m, 0.0);
  for (std::size_t j = 0; j < p.m; ++j) {
    double acc = 0.0;
    for (const auto& [i, v] : p.cols[j]) acc += v * x[i];
    y[j] = acc;
  }
}

inline void normalize(std::vector<double>& x) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& v : x) v /= norm;
}

}  // namespace detail

/// Largest-singular-value lower bound for the compressed operator via power
/// iteration: direct Rayleigh quotients when the matrix is symmetric,
/// A^T A Rayleigh quotients (then square root) otherwise, both with a +I
/// shift so bipartite-like spectra cannot stall the iteration. Every
/// returned value is a valid lower bound for the full operator norm because
/// Rayleigh quotients never exceed the extreme eigenvalue and compressions
/// of nonnegative matrices never raise the norm. `start` (if given) warm
/// starts the iteration and is overwritten with the final vector.
inline NormBound norm_lower_bound(const TruncatedOperator& op, PowerOptions opts = {},
                                  std::size_t prefix = std::numeric_limits<std::size_t>::max(),
                                  std::vector<double>* start = nullptr) {
  std::size_t m = prefix == std::numeric_limits<std::size_t>::max() ? op.size() : prefix;
  detail::PrefixCsc p = detail::make_prefix(op, m);

  std::vector<double> x;
  if (start && !start->empty()) {
    x = *start;
    x.resize(m, 1.0 / std::sqrt(static_cast<double>(m)));
  } else {
    x.assign(m, 1.0 / std::sqrt(static_cast<double>(m)));
  }
  detail::normalize(x);

  std::vector<double> ax, y;
  NormBound out;
  double best = 0.0;
  double prev = -1.0;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    ++out.iterations;
    double rho;
    if (p.symmetric) {
      detail::apply(p, x, ax);
      rho = 0.0;
      for (std::size_t i = 0; i < m; ++i) rho += x[i] * ax[i];
    } else {
      detail::apply(p, x, y);
      detail::apply_transpose(p, y, ax);  // ax = A^T A x
      rho = 0.0;
      for (std::size_t i = 0; i < m; ++i) rho += x[i] * ax[i];
    }
    best = std::max(best, rho);
    // next iterate: (A + I) x, resp. (A^T A + I) x
    for (std::size_t i = 0; i < m; ++i) ax[i] += x[i];
    x.swap(ax);
    detail::normalize(x);
    if (prev >= 0.0 && std::abs(rho - prev) <= opts.tol * std::max(1.0, std::abs(rho))) {
      out.converged = true;
      break;
    }
    prev = rho;
  }
  out.value = p.symmetric ? best : std::sqrt(std::max(0.0, best));
  if (start) *start = std::move(x);
  return out;
}

/// Norm bounds over nested prefixes (ascending), warm starting each run
/// from the previous eigenvector.
inline std::vector<NormBound> norm_lower_bound_sweep(const TruncatedOperator& op,
                                                     const std::vector<std::size_t>& prefixes,
                                                     PowerOptions opts = {}) {
  std::vector<NormBound> out;
  std::vector<double> start;
  for (std::size_t m : prefixes) out.push_back(norm_lower_bound(op, opts, m, &start));
  return out;
}

}  // namespace fuselab
