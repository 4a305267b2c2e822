#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "fuselab/algebra.hpp"
#include "fuselab/catalog.hpp"
#include "oracles.hpp"

using namespace fuselab;

namespace {

/// Runs f, expecting it to raise; returns the error code.
template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be raised");
  return Errc::internal_inconsistency;
}

std::map<std::int64_t, std::int64_t> as_multiset(const Product& p) {
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& [l, n] : p) out[l.idx] = n.convert_to<std::int64_t>();
  return out;
}

}  // namespace

TEST_CASE("composition rules match character arithmetic") {
  AlgebraPtr A = su2_ring(2);
  for (std::int64_t m = 0; m <= 6; ++m)
    for (std::int64_t n = 0; n <= 6; ++n)
      CHECK(as_multiset(A->product(Label{m}, Label{n})) == oracles::su2_product(m, n));
}

TEST_CASE("small composition products") {
  AlgebraPtr A = su2_ring(2);
  CHECK(as_multiset(A->product(Label{1}, Label{1})) ==
        std::map<std::int64_t, std::int64_t>{{0, 1}, {2, 1}});
  CHECK(as_multiset(A->product(Label{2}, Label{3})) ==
        std::map<std::int64_t, std::int64_t>{{1, 1}, {3, 1}, {5, 1}});
}

TEST_CASE("generator-dimension recursion") {
  AlgebraPtr A2 = su2_ring(2);
  for (std::int64_t n = 0; n < 8; ++n) CHECK(*A2->dim_exact(Label{n}) == Rational(n + 1));

  AlgebraPtr A3 = su2_ring(3);
  auto frozen = oracles::chebyshev_n3_prefix();
  for (std::size_t n = 0; n < frozen.size(); ++n)
    CHECK(*A3->dim_exact(Label{static_cast<std::int64_t>(n)}) == Rational(frozen[n]));

  // three-term identity d(u1) d(un) = d(u_{n-1}) + d(u_{n+1})
  AlgebraPtr Aq = su2_ring(Rational(5, 2));
  for (std::int64_t n = 1; n < 7; ++n)
    CHECK(*Aq->dim_exact(Label{1}) * *Aq->dim_exact(Label{n}) ==
          *Aq->dim_exact(Label{n - 1}) + *Aq->dim_exact(Label{n + 1}));
  CHECK(*Aq->dim_exact(Label{2}) == Rational(21, 4));
}

TEST_CASE("element arithmetic and dimensions") {
  AlgebraPtr A = su2_ring(2);
  RingElement e = RingElement::basis(Label{0}) + RingElement::basis(Label{1});
  RingElement sq = multiply(*A, e, e);
  RingElement want;
  want.add(Label{0}, 2);
  want.add(Label{1}, 2);
  want.add(Label{2}, 1);
  CHECK(sq == want);
  CHECK(*dim_of_exact(*A, e) == Rational(3));
  CHECK(*dim_of_exact(*A, sq) == Rational(9));
  CHECK(conjugate(*A, e) == e);
}

TEST_CASE("cyclic group ring") {
  AlgebraPtr A = cyclic_group_ring(3);
  Label e = A->basis().parse("e"), g = A->basis().parse("g"), g2 = A->basis().parse("g2");
  CHECK(as_multiset(A->product(g, g)) == std::map<std::int64_t, std::int64_t>{{g2.idx, 1}});
  CHECK(as_multiset(A->product(g, g2)) == std::map<std::int64_t, std::int64_t>{{e.idx, 1}});
  CHECK(A->conjugate_label(g) == g2);
  CHECK(A->conjugate_label(e) == e);
  CHECK(validate_axioms(*A, 8).ok());
}

TEST_CASE("symmetric group ring relations") {
  AlgebraPtr A = s3_ring();
  auto b = [&](const char* n) { return RingElement::basis(A->basis().parse(n)); };
  RingElement unit = b("e");
  CHECK(multiply(*A, b("r"), multiply(*A, b("r"), b("r"))) == unit);  // r^3 = e
  CHECK(multiply(*A, b("s"), b("s")) == unit);                       // s^2 = e
  // s r s = r^{-1}
  CHECK(multiply(*A, b("s"), multiply(*A, b("r"), b("s"))) == b("r2"));
  CHECK(multiply(*A, b("r"), b("s")) != multiply(*A, b("s"), b("r")));  // noncommutative
  CHECK(A->conjugate_label(A->basis().parse("r")) == A->basis().parse("r2"));
  CHECK(validate_axioms(*A, 8).ok());
}

TEST_CASE("reciprocity and anti-multiplicativity hold on balls") {
  for (AlgebraPtr A : {su2_ring(2), verlinde_ring(2), s3_ring()}) {
    BallLayers ball = algebra_ball(*A, 4);
    for (Label z : ball.labels)
      for (Label h : ball.labels) {
        Label zbar = A->conjugate_label(z);
        Label hbar = A->conjugate_label(h);
        for (const auto& [a, n] : A->product(z, h)) {
          Int via1 = 0, via2 = 0;
          for (const auto& [l, m] : A->product(zbar, a))
            if (l == h) via1 = m;
          for (const auto& [l, m] : A->product(a, hbar))
            if (l == z) via2 = m;
          CHECK(via1 == n);
          CHECK(via2 == n);
        }
        RingElement lhs = conjugate(*A, multiply(*A, RingElement::basis(z), RingElement::basis(h)));
        RingElement rhs = multiply(*A, RingElement::basis(hbar), RingElement::basis(zbar));
        CHECK(lhs == rhs);
      }
  }
}

TEST_CASE("validation is clean across the built-in families") {
  for (AlgebraPtr A : {su2_ring(2), su2_ring(3), su2_ring(Rational(5, 2)), verlinde_ring(1),
                       verlinde_ring(2), verlinde_ring(3), verlinde_ring(4), cyclic_group_ring(2),
                       cyclic_group_ring(3), s3_ring()}) {
    ValidationReport rep = validate_axioms(*A, 6);
    INFO(A->description());
    CHECK(rep.ok());
    CHECK(rep.checks_run > 0);
  }
}

TEST_CASE("validation flags a corrupted rule table") {
  AlgebraPtr good = su2_ring(2);
  FusionAlgebraConfig cfg = good->config();
  cfg.rules = [good](Label a, Label b) {
    Product p = good->product(a, b);
    if (a == Label{1} && b == Label{1}) p.push_back({Label{4}, Int(1)});  // spurious term
    return p;
  };
  AlgebraPtr bad = make_fusion_algebra(std::move(cfg));
  ValidationReport rep = validate_axioms(*bad, 4);
  REQUIRE_FALSE(rep.ok());
  bool frobenius_or_dim = false;
  for (const auto& v : rep.violations)
    if (v.check == "frobenius" || v.check == "dimension-multiplicativity" || v.check == "associativity")
      frobenius_or_dim = true;
  CHECK(frobenius_or_dim);
}

TEST_CASE("validation radius must be positive") {
  AlgebraPtr A = su2_ring(2);
  CHECK(code_of([&] { validate_axioms(*A, 0); }) == Errc::usage_error);
}

TEST_CASE("balls around the unit") {
  AlgebraPtr A = su2_ring(2);
  BallLayers ball = algebra_ball(*A, 3);
  CHECK(ball.layer_offsets == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(ball.labels == std::vector<Label>{Label{0}, Label{1}, Label{2}, Label{3}});

  AlgebraPtr V = verlinde_ring(2);
  BallLayers vball = algebra_ball(*V, 5);
  CHECK(vball.labels.size() == 3);  // saturates at the whole basis
  CHECK(vball.layer_offsets == std::vector<std::size_t>{1, 2, 3, 3, 3, 3});

  CHECK(code_of([&] { algebra_ball(*A, 5, 3); }) == Errc::ball_overflow);
}

TEST_CASE("construction-time checks") {
  SECTION("broken unit law") {
    FusionAlgebraConfig cfg;
    cfg.basis = Basis::finite({"e", "g"});
    cfg.unit = Label{0};
    cfg.conjugate = [](Label l) { return l; };
    cfg.rules = [](Label, Label) { return Product{{Label{1}, Int(1)}}; };  // unit*e = g
    cfg.dim.value = [](Label) { return 1.0; };
    cfg.generators = {Label{1}};
    CHECK(code_of([&] { make_fusion_algebra(std::move(cfg)); }) == Errc::unit_law_violation);
  }
  SECTION("involution must be involutive") {
    FusionAlgebraConfig cfg;
    cfg.basis = Basis::finite({"e", "a", "b", "c"});
    cfg.unit = Label{0};
    cfg.conjugate = [](Label l) {
      if (l == Label{1}) return Label{2};
      if (l == Label{2}) return Label{3};  // a -> b -> c: not an involution
      return l;
    };
    cfg.rules = [](Label a, Label b) {
      if (a == Label{0}) return Product{{b, Int(1)}};
      if (b == Label{0}) return Product{{a, Int(1)}};
      return Product{{Label{0}, Int(1)}};
    };
    cfg.dim.value = [](Label) { return 1.0; };
    cfg.generators = {Label{1}};
    CHECK(code_of([&] { make_fusion_algebra(std::move(cfg)); }) == Errc::involution_not_involutive);
  }
  SECTION("rule providers may not emit nonpositive multiplicities") {
    AlgebraPtr good = su2_ring(2);
    FusionAlgebraConfig cfg = good->config();
    cfg.rules = [good](Label a, Label b) {
      Product p = good->product(a, b);
      if (a == Label{1} && b == Label{1}) p.push_back({Label{4}, Int(0)});
      return p;
    };
    AlgebraPtr bad = make_fusion_algebra(std::move(cfg));
    CHECK(code_of([&] { bad->product(Label{1}, Label{1}); }) == Errc::non_positive_multiplicity);
  }
  SECTION("labels outside the basis are rejected") {
    AlgebraPtr V = verlinde_ring(2);
    CHECK(code_of([&] { V->product(Label{1}, Label{7}); }) == Errc::unknown_label);
    CHECK(code_of([&] { V->dim(Label{-1}); }) == Errc::unknown_label);
  }
}

TEST_CASE("spectral dimensions of finite families") {
  for (int k = 1; k <= 4; ++k) {
    AlgebraPtr V = verlinde_ring(k);
    DimensionFunction d = pf_dimension(*V);
    for (int n = 0; n <= k; ++n) {
      INFO("k=" << k << " n=" << n);
      CHECK(std::abs(d.value(Label{n}) - oracles::verlinde_dim(k, n)) < 1e-9);
      CHECK(std::abs(d.value(Label{n}) - V->dim(Label{n})) < 1e-9);
    }
  }
  AlgebraPtr C = cyclic_group_ring(3);
  DimensionFunction dc = pf_dimension(*C);
  for (Label l : C->basis().labels()) CHECK(std::abs(dc.value(l) - 1.0) < 1e-12);

  AlgebraPtr S = s3_ring();
  DimensionFunction ds = pf_dimension(*S);
  for (Label l : S->basis().labels()) CHECK(std::abs(ds.value(l) - 1.0) < 1e-12);
}

TEST_CASE("spectral dimensions need a finite connected picture") {
  CHECK(code_of([&] { pf_dimension(*su2_ring(2)); }) == Errc::not_finite);

  // same table as the finite truncation at level 2, but with the declared
  // generating set {u2}, whose orbit misses u1
  AlgebraPtr V = verlinde_ring(2);
  FusionAlgebraConfig cfg = V->config();
  cfg.generators = {Label{2}};
  AlgebraPtr reduced = make_fusion_algebra(std::move(cfg));
  CHECK(code_of([&] { pf_dimension(*reduced); }) == Errc::reducible);
}
