#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuselab/algebra.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/label.hpp"
#include "fuselab/module.hpp"
#include "fuselab/rational.hpp"

namespace fuselab {

/// S_n(N) with S_0 = 1, S_1 = N, S_{n+1} = N*S_n - S_{n-1}; the dimension of
/// the n-th basis label in the su2-type family with generator dimension N.
inline Rational chebyshev_dim(const Rational& N, std::int64_t n) {
  if (n < 0) raise(Errc::unknown_label, "negative index in dimension recursion");
  Rational prev = 1, cur = N;
  if (n == 0) return prev;
  for (std::int64_t i = 1; i < n; ++i) {
    Rational next = N * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Infinite self-conjugate family u0, u1, ... with the classical
/// composition rules um*un = sum of u_{|m-n|+2j}, j = 0..min(m,n), generator
/// dimension N >= 2 (N = 2 gives the classical integer dimensions n+1).
inline AlgebraPtr su2_ring(const Rational& N) {
  if (N < 2) raise(Errc::parameter_out_of_range, "su2 family needs N >= 2, got " + to_string(N));
  FusionAlgebraConfig cfg;
  cfg.basis = Basis::nonneg_indexed("u");
  cfg.unit = Label{0};
  cfg.conjugate = [](Label l) { return l; };
  cfg.rules = [](Label a, Label b) {
    std::int64_t m = a.idx, n = b.idx;
    Product p;
    for (std::int64_t j = 0; j <= std::min(m, n); ++j) p.push_back({Label{std::abs(m - n) + 2 * j}, Int(1)});
    return p;
  };
  cfg.dim.exact = [N](Label l) -> std::optional<Rational> { return chebyshev_dim(N, l.idx); };
  cfg.dim.value = [N](Label l) { return to_double(chebyshev_dim(N, l.idx)); };
  cfg.generators = {Label{1}};
  cfg.tail_stable_from = [](Label u) -> std::optional<std::int64_t> { return u.idx; };
  cfg.description = "su2:N=" + to_string(N);
  return make_fusion_algebra(std::move(cfg));
}

inline AlgebraPtr su2_ring(int N) { return su2_ring(Rational(N)); }

/// Finite truncation at level k: basis u0..uk, rules um*un = sum of u_j for
/// j = |m-n|, |m-n|+2, ..., min(m+n, 2k-m-n); quantum dimensions
/// sin((n+1)pi/(k+2)) / sin(pi/(k+2)).
inline AlgebraPtr verlinde_ring(int k) {
  if (k < 1) raise(Errc::parameter_out_of_range, "verlinde family needs k >= 1, got " + std::to_string(k));
  std::vector<std::string> names;
  for (int i = 0; i <= k; ++i) names.push_back("u" + std::to_string(i));
  FusionAlgebraConfig cfg;
  cfg.basis = Basis::finite(std::move(names));
  cfg.unit = Label{0};
  cfg.conjugate = [](Label l) { return l; };
  cfg.rules = [k](Label a, Label b) {
    std::int64_t m = a.idx, n = b.idx;
    std::int64_t hi = std::min(m + n, 2 * k - m - n);
    Product p;
    for (std::int64_t j = std::abs(m - n); j <= hi; j += 2) p.push_back({Label{j}, Int(1)});
    return p;
  };
  cfg.dim.value = [k](Label l) {
    double base = std::numbers::pi / (k + 2);
    return std::sin((static_cast<double>(l.idx) + 1.0) * base) / std::sin(base);
  };
  cfg.generators = {Label{1}};
  cfg.description = "verlinde:k=" + std::to_string(k);
  return make_fusion_algebra(std::move(cfg));
}

/// Group ring from an explicit multiplication table (table[i][j] = index of
/// the product). Verifies the group axioms, uses g -> g^{-1} as the
/// involution and the constant dimension 1.
inline AlgebraPtr group_ring(std::vector<std::string> names, std::vector<std::vector<int>> table,
                             std::string description) {
  std::size_t n = names.size();
  if (n == 0 || table.size() != n) raise(Errc::not_a_group, "table size does not match element count");
  for (const auto& row : table) {
    if (row.size() != n) raise(Errc::not_a_group, "table is not square");
    for (int v : row)
      if (v < 0 || static_cast<std::size_t>(v) >= n) raise(Errc::not_a_group, "table entry outside element range");
  }
  std::optional<std::size_t> unit;
  for (std::size_t e = 0; e < n; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      ok = table[e][x] == static_cast<int>(x) && table[x][e] == static_cast<int>(x);
    if (ok) {
      unit = e;
      break;
    }
  }
  if (!unit) raise(Errc::not_a_group, "no two-sided identity element");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (table[static_cast<std::size_t>(table[a][b])][c] != table[a][static_cast<std::size_t>(table[b][c])])
          raise(Errc::not_a_group, "associativity fails at (" + names[a] + "," + names[b] + "," + names[c] + ")");
  std::vector<std::int64_t> inverse(n, -1);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t h = 0; h < n; ++h)
      if (table[g][h] == static_cast<int>(*unit) && table[h][g] == static_cast<int>(*unit)) {
        inverse[g] = static_cast<std::int64_t>(h);
        break;
      }
    if (inverse[g] < 0) raise(Errc::not_a_group, "no inverse for " + names[g]);
  }

  auto shared_table = std::make_shared<const std::vector<std::vector<int>>>(std::move(table));
  auto shared_inverse = std::make_shared<const std::vector<std::int64_t>>(std::move(inverse));
  FusionAlgebraConfig cfg;
  cfg.unit = Label{static_cast<std::int64_t>(*unit)};
  cfg.conjugate = [shared_inverse](Label l) { return Label{(*shared_inverse)[static_cast<std::size_t>(l.idx)]}; };
  cfg.rules = [shared_table](Label a, Label b) {
    Product p;
    p.push_back({Label{(*shared_table)[static_cast<std::size_t>(a.idx)][static_cast<std::size_t>(b.idx)]}, Int(1)});
    return p;
  };
  cfg.dim.value = [](Label) { return 1.0; };
  cfg.dim.exact = [](Label) -> std::optional<Rational> { return Rational(1); };
  for (std::size_t g = 0; g < n; ++g)
    if (g != *unit) cfg.generators.push_back(Label{static_cast<std::int64_t>(g)});
  cfg.description = std::move(description);
  cfg.basis = Basis::finite(std::move(names));
  return make_fusion_algebra(std::move(cfg));
}

inline AlgebraPtr cyclic_group_ring(int n) {
  if (n < 1) raise(Errc::parameter_out_of_range, "cyclic group needs n >= 1, got " + std::to_string(n));
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j)
    names.push_back(j == 0 ? "e" : (j == 1 ? "g" : "g" + std::to_string(j)));
  std::vector<std::vector<int>> table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i + j) % n;
  return group_ring(std::move(names), std::move(table), "cyclic:n=" + std::to_string(n));
}

/// The symmetric group on three points, elements written as words in the
/// rotation r and the flip s.
inline AlgebraPtr s3_ring() {
  using Perm = std::array<int, 3>;
  const std::vector<std::pair<std::string, Perm>> elems = {
      {"e", {0, 1, 2}},  {"r", {1, 2, 0}},  {"r2", {2, 0, 1}},
      {"s", {1, 0, 2}},  {"rs", {2, 1, 0}}, {"r2s", {0, 2, 1}},
  };
  auto compose = [](const Perm& f, const Perm& g) {
    return Perm{f[static_cast<std::size_t>(g[0])], f[static_cast<std::size_t>(g[1])], f[static_cast<std::size_t>(g[2])]};
  };
  auto index_of = [&](const Perm& p) {
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (elems[i].second == p) return static_cast<int>(i);
    raise(Errc::internal_inconsistency, "permutation composition left the element list");
  };
  std::vector<std::string> names;
  for (const auto& [name, perm] : elems) names.push_back(name);
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) table[i][j] = index_of(compose(elems[i].second, elems[j].second));
  return group_ring(std::move(names), std::move(table), "s3");
}

/// Integer-indexed weight module over the su2-type family: un acts on ek by
/// sum of e_{k+n-2j}, j = 0..n, with constant module dimension 1 and seed
/// e0. The dimension identity is exact precisely at N = 2.
inline ModulePtr torus_module(const Rational& N) {
  AlgebraPtr A = su2_ring(N);
  FusionModuleConfig cfg;
  cfg.algebra = A;
  cfg.basis = Basis::int_indexed("e");
  cfg.seed = Label{0};
  cfg.rules = [](Label u, Label a) {
    Product p;
    for (std::int64_t j = 0; j <= u.idx; ++j) p.push_back({Label{a.idx + u.idx - 2 * j}, Int(1)});
    return p;
  };
  cfg.dim.value = [](Label) { return 1.0; };
  cfg.dim.exact = [](Label) -> std::optional<Rational> { return Rational(1); };
  cfg.dim_identity_exact = (N == 2);
  cfg.description = "torus:N=" + to_string(N);
  return make_fusion_module(std::move(cfg));
}

inline ModulePtr torus_module(int N) { return torus_module(Rational(N)); }

namespace detail {

using IntMatrix = std::vector<std::vector<Int>>;

/// Action matrices c_n generated from the adjacency by the defining
/// recursion c_{n+1} = A c_n - c_{n-1}; extended lazily and checked for
/// negative entries as levels are produced.
struct GraphLevels {
  IntMatrix adjacency;
  std::vector<IntMatrix> levels;
  std::mutex mutex;

  // assumes mutex held
  const IntMatrix& ensure(std::size_t n) {
    std::size_t dim = adjacency.size();
    if (levels.empty()) {
      IntMatrix id(dim, std::vector<Int>(dim, 0));
      for (std::size_t i = 0; i < dim; ++i) id[i][i] = 1;
      levels.push_back(std::move(id));
      levels.push_back(adjacency);
    }
    while (levels.size() <= n) {
      std::size_t level = levels.size();
      IntMatrix next = step(levels[level - 1], levels[level - 2]);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          if (next[i][j] < 0)
            raise(Errc::negative_multiplicity,
                  "action constant is negative at level " + std::to_string(level) +
                      " (graph does not carry a module structure over this algebra)");
      levels.push_back(std::move(next));
    }
    return levels[n];
  }

  // A * prev - prevprev, unchecked
  IntMatrix step(const IntMatrix& prev, const IntMatrix& prevprev) const {
    std::size_t dim = adjacency.size();
    IntMatrix next(dim, std::vector<Int>(dim, 0));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t l = 0; l < dim; ++l) {
        if (adjacency[i][l] == 0) continue;
        for (std::size_t j = 0; j < dim; ++j) next[i][j] += adjacency[i][l] * prev[l][j];
      }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) next[i][j] -= prevprev[i][j];
    return next;
  }
};

}  // namespace detail

/// Module over an su2/verlinde-type algebra whose generator acts by the
/// given symmetric 0/1 adjacency matrix; higher action matrices come from
/// the defining recursion. Construction probes the recursion to probe_depth
/// (or to the full basis for finite algebras, including the vanishing
/// condition at the truncation level) and fails on the first negative
/// entry. Module dimensions are the Perron-Frobenius eigenvector of the
/// adjacency, normalized at the seed.
inline ModulePtr graph_module(AlgebraPtr A, std::vector<std::string> vertex_names,
                              std::vector<std::vector<int>> adjacency, std::size_t seed_index = 0,
                              int probe_depth = 16, std::string description = "graph module") {
  if (A->unit() != Label{0} || A->generators() != std::vector<Label>{Label{1}})
    raise(Errc::parameter_out_of_range,
          "graph modules need an algebra of su2/verlinde type (unit u0, single generator u1)");
  std::size_t n = vertex_names.size();
  if (n == 0 || adjacency.size() != n) raise(Errc::parameter_out_of_range, "adjacency size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency[i].size() != n) raise(Errc::parameter_out_of_range, "adjacency is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency[i][j] != 0 && adjacency[i][j] != 1)
        raise(Errc::parameter_out_of_range, "adjacency entries must be 0 or 1");
      if (adjacency[i][j] != adjacency[j][i]) raise(Errc::parameter_out_of_range, "adjacency must be symmetric");
    }
  }
  if (seed_index >= n) raise(Errc::unknown_label, "seed vertex outside the graph");

  // connectivity
  {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w)
        if (adjacency[v][w] != 0 && !seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    if (count != n) raise(Errc::disconnected, "graph is not connected");
  }

  auto levels = std::make_shared<detail::GraphLevels>();
  levels->adjacency.assign(n, std::vector<Int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) levels->adjacency[i][j] = adjacency[i][j];

  {
    std::lock_guard<std::mutex> lock(levels->mutex);
    auto basis_size = A->basis().size();
    if (basis_size) {
      // finite truncation: all levels must exist and the next one vanish
      std::size_t top = *basis_size - 1;
      levels->ensure(top);
      detail::IntMatrix beyond = levels->step(levels->levels[top], levels->levels[top - 1]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (beyond[i][j] != 0)
            raise(Errc::negative_multiplicity,
                  "recursion does not terminate at level " + std::to_string(top + 1) +
                      "; graph is incompatible with the truncated rules");
    } else {
      levels->ensure(static_cast<std::size_t>(std::max(probe_depth, 2)));
    }
  }

  // Perron-Frobenius weights of the adjacency (power iteration with +I shift)
  auto weights = std::make_shared<std::vector<double>>(n, 1.0);
  {
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    for (int it = 0; it < 100000; ++it) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = x[i];
        for (std::size_t j = 0; j < n; ++j)
          if (adjacency[i][j] != 0) acc += x[j];
        y[i] = acc;
        double ratio = acc / x[i];
        if (i == 0) {
          lo = hi = ratio;
        } else {
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
        }
      }
      double norm = 0.0;
      for (double v : y) norm += v * v;
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
      if (hi - lo <= 1e-13 * hi) break;
    }
    for (std::size_t i = 0; i < n; ++i) (*weights)[i] = x[i] / x[seed_index];
  }

  FusionModuleConfig cfg;
  cfg.algebra = A;
  cfg.basis = Basis::finite(std::move(vertex_names));
  cfg.seed = Label{static_cast<std::int64_t>(seed_index)};
  cfg.rules = [levels](Label u, Label a) {
    std::lock_guard<std::mutex> lock(levels->mutex);
    const detail::IntMatrix& c = levels->ensure(static_cast<std::size_t>(u.idx));
    Product p;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i][static_cast<std::size_t>(a.idx)] != 0)
        p.push_back({Label{static_cast<std::int64_t>(i)}, c[i][static_cast<std::size_t>(a.idx)]});
    return p;
  };
  cfg.dim.value = [weights](Label l) { return (*weights)[static_cast<std::size_t>(l.idx)]; };
  cfg.description = std::move(description);
  return make_fusion_module(std::move(cfg));
}

/// The path graph on the given number of vertices (vertex names v0, v1, ...).
inline ModulePtr path_graph_module(AlgebraPtr A, int vertices) {
  if (vertices < 1) raise(Errc::parameter_out_of_range, "path graph needs at least one vertex");
  std::size_t n = static_cast<std::size_t>(vertices);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i + 1 < n; ++i) adj[i][i + 1] = adj[i + 1][i] = 1;
  return graph_module(A, std::move(names), std::move(adj), 0, 16,
                      "graph:A" + std::to_string(vertices) + "@" + A->description());
}

// ---------------------------------------------------------------------------
// Catalog id grammar

namespace detail {

inline std::int64_t parse_int_param(const std::string& id, const std::string& text) {
  if (text.empty()) raise(Errc::unknown_catalog_entry, "missing integer parameter in '" + id + "'");
  for (char c : text)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      raise(Errc::unknown_catalog_entry, "bad integer parameter in '" + id + "'");
  if (text.size() > 9) raise(Errc::parameter_out_of_range, "parameter too large in '" + id + "'");
  return std::stoll(text);
}

inline std::string expect_key(const std::string& id, const std::string& text, const std::string& key) {
  if (text.substr(0, key.size() + 1) != key + "=")
    raise(Errc::unknown_catalog_entry, "expected " + key + "=... in '" + id + "'");
  return text.substr(key.size() + 1);
}

}  // namespace detail

inline AlgebraPtr make_algebra_from_id(const std::string& id) {
  if (id == "s3") return s3_ring();
  auto colon = id.find(':');
  std::string head = colon == std::string::npos ? id : id.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (head == "su2") {
    Rational N;
    try {
      N = parse_rational(detail::expect_key(id, tail, "N"));
    } catch (const Error& e) {
      if (e.code() == Errc::syntax_error)
        raise(Errc::unknown_catalog_entry, "bad rational parameter in '" + id + "'");
      throw;
    }
    return su2_ring(N);
  }
  if (head == "verlinde")
    return verlinde_ring(static_cast<int>(detail::parse_int_param(id, detail::expect_key(id, tail, "k"))));
  if (head == "cyclic")
    return cyclic_group_ring(static_cast<int>(detail::parse_int_param(id, detail::expect_key(id, tail, "n"))));
  raise(Errc::unknown_catalog_entry, "'" + id + "' is not a catalog algebra");
}

inline bool is_module_id(const std::string& id) {
  return id.rfind("torus:", 0) == 0 || id.rfind("regular@", 0) == 0 || id.rfind("graph:", 0) == 0;
}

inline ModulePtr make_module_from_id(const std::string& id) {
  if (id.rfind("torus:", 0) == 0) {
    Rational N;
    try {
      N = parse_rational(detail::expect_key(id, id.substr(6), "N"));
    } catch (const Error& e) {
      if (e.code() == Errc::syntax_error)
        raise(Errc::unknown_catalog_entry, "bad rational parameter in '" + id + "'");
      throw;
    }
    return torus_module(N);
  }
  if (id.rfind("regular@", 0) == 0) return regular_module(make_algebra_from_id(id.substr(8)));
  if (id.rfind("graph:", 0) == 0) {
    std::string rest = id.substr(6);
    auto at = rest.find('@');
    if (at == std::string::npos)
      raise(Errc::unknown_catalog_entry, "graph module id needs graph:<name>@<algebra>");
    std::string graph = rest.substr(0, at);
    std::string alg = rest.substr(at + 1);
    if (graph.size() < 2 || graph[0] != 'A')
      raise(Errc::unknown_catalog_entry, "unknown graph '" + graph + "' (A<n> paths are available)");
    std::int64_t vertices = detail::parse_int_param(id, graph.substr(1));
    return path_graph_module(make_algebra_from_id(alg), static_cast<int>(vertices));
  }
  raise(Errc::unknown_catalog_entry, "'" + id + "' is not a catalog module");
}

struct CatalogListing {
  std::string pattern;
  std::string summary;
  std::string example;
};

inline std::vector<CatalogListing> catalog_entries() {
  return {
      {"su2:N=<rational>", "infinite self-conjugate family, composition rules, generator dimension N >= 2",
       "su2:N=2"},
      {"verlinde:k=<int>", "finite truncation at level k with quantum dimensions", "verlinde:k=2"},
      {"cyclic:n=<int>", "cyclic group ring with inverse involution, dimension 1", "cyclic:n=3"},
      {"s3", "symmetric group on three points as a group ring", "s3"},
      {"torus:N=<rational>", "integer-indexed weight module over su2:N with dimension 1", "torus:N=2"},
      {"regular@<algebra-id>", "the algebra acting on itself", "regular@su2:N=3"},
      {"graph:A<n>@<algebra-id>", "path graph action generated by the adjacency recursion",
       "graph:A3@verlinde:k=2"},
  };
}

}  // namespace fuselab
