#pragma once

// Independent reference computations for the test suite. Everything here is
// derived from first principles (character arithmetic, S-matrix sums, dense
// eigensolves, closed-form spectra) without touching the library's own rule
// tables or iteration code, so agreement is meaningful.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

// --- Laurent polynomials in one variable: exponent -> integer coefficient.
// The character of the (n+1)-dimensional irreducible is
// chi_n(z) = z^n + z^{n-2} + ... + z^{-n}; products of characters decompose
// the same way the composition rules do, which gives an independent oracle
// for them.
using Laurent = std::map<std::int64_t, std::int64_t>;

inline Laurent chi(std::int64_t n) {
  Laurent p;
  for (std::int64_t e = -n; e <= n; e += 2) p[e] = 1;
  return p;
}

inline Laurent monomial(std::int64_t e) { return Laurent{{e, 1}}; }

inline Laurent lmul(const Laurent& a, const Laurent& b) {
  Laurent out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      out[ea + eb] += ca * cb;
      if (out[ea + eb] == 0) out.erase(ea + eb);
    }
  return out;
}

/// Greedy top-degree decomposition of a character-positive Laurent
/// polynomial into chi_n's: returns n -> multiplicity.
inline std::map<std::int64_t, std::int64_t> decompose_into_chi(Laurent p) {
  std::map<std::int64_t, std::int64_t> mult;
  while (!p.empty()) {
    auto top = p.rbegin();
    std::int64_t deg = top->first;
    std::int64_t c = top->second;
    if (c <= 0) throw std::runtime_error("not a nonnegative character combination");
    mult[deg] += c;
    for (std::int64_t e = -deg; e <= deg; e += 2) {
      p[e] -= c;
      if (p[e] == 0) p.erase(e);
    }
  }
  return mult;
}

/// Multiplicities of the composition u_m * u_n via character arithmetic.
inline std::map<std::int64_t, std::int64_t> su2_product(std::int64_t m, std::int64_t n) {
  return decompose_into_chi(lmul(chi(m), chi(n)));
}

/// Weight labels hit by u_n acting on the k-th one-dimensional weight:
/// z^k * chi_n expanded monomial by monomial.
inline std::map<std::int64_t, std::int64_t> torus_action(std::int64_t n, std::int64_t k) {
  Laurent p = lmul(monomial(k), chi(n));
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& [e, c] : p) out[e] = c;
  return out;
}

// --- Level-k truncated multiplicities via the S-matrix sum
// N_{mn}^p = sum_j S_{mj} S_{nj} S_{pj} / S_{0j} (all entries real here).
// Values are rounded to integers and the rounding error is checked, so this
// is a genuinely independent cross-check of the truncated rule tables.
inline std::vector<std::int64_t> verlinde_multiplicities(int k, int m, int n) {
  const double pi = std::numbers::pi;
  auto S = [&](int a, int j) {
    return std::sqrt(2.0 / (k + 2)) * std::sin((a + 1.0) * (j + 1.0) * pi / (k + 2));
  };
  std::vector<std::int64_t> out;
  for (int p = 0; p <= k; ++p) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += S(m, j) * S(n, j) * S(p, j) / S(0, j);
    auto rounded = static_cast<std::int64_t>(std::llround(acc));
    if (std::abs(acc - static_cast<double>(rounded)) > 1e-9)
      throw std::runtime_error("S-matrix sum did not round cleanly");
    out.push_back(rounded);
  }
  return out;
}

/// Quantum dimension at level k: sin((n+1)pi/(k+2)) / sin(pi/(k+2)).
inline double verlinde_dim(int k, int n) {
  const double pi = std::numbers::pi;
  return std::sin((n + 1.0) * pi / (k + 2)) / std::sin(pi / (k + 2));
}

/// Largest adjacency eigenvalue of the path graph on n vertices.
inline double path_lambda_max(int n) { return 2.0 * std::cos(std::numbers::pi / (n + 1)); }

// --- Dense symmetric eigensolver (cyclic Jacobi) for small matrices; used
// to cross-check the sparse power iteration on random inputs.
inline double jacobi_lambda_max(std::vector<std::vector<double>> a) {
  std::size_t n = a.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        double phi = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        double c = std::cos(phi), s = std::sin(phi);
        double app = c * c * a[p][p] - 2.0 * s * c * a[p][q] + s * s * a[q][q];
        double aqq = s * s * a[p][p] + 2.0 * s * c * a[p][q] + c * c * a[q][q];
        a[p][q] = a[q][p] = 0.0;
        a[p][p] = app;
        a[q][q] = aqq;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          double arp = a[r][p], arq = a[r][q];
          a[r][p] = a[p][r] = c * arp - s * arq;
          a[r][q] = a[q][r] = s * arp + c * arq;
        }
      }
  }
  double best = a[0][0];
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, a[i][i]);
  return best;
}

/// Generator-dimension recursion values frozen from the closed form
/// x^2 - N x + 1: for N = 2 the sequence is 1, 2, 3, ...; for N = 3 it is
/// the even-index Fibonacci slice 1, 3, 8, 21, 55, 144, 377, 987.
inline std::vector<std::int64_t> chebyshev_n3_prefix() { return {1, 3, 8, 21, 55, 144, 377, 987}; }

}  // namespace oracles
