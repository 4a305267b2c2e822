#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "fuselab/specfile.hpp"

using namespace fuselab;

namespace {

template <class F>
Errc code_of(F&& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an Error to be raised");
  return Errc::internal_inconsistency;
}

const char* kZ2 = R"({
  "kind": "algebra",
  "basis": ["e", "g"],
  "unit": "e",
  "rules": [
    {"left": "g", "right": "g", "result": {"e": 1}}
  ]
})";

const char* kZ3 = R"({
  "kind": "algebra",
  "basis": ["e", "g", "g2"],
  "unit": "e",
  "involution": {"g": "g2"},
  "rules": [
    {"left": "g", "right": "g", "result": {"g2": 1}},
    {"left": "g", "right": "g2", "result": {"e": 1}},
    {"left": "g2", "right": "g", "result": {"e": 1}},
    {"left": "g2", "right": "g2", "result": {"g": 1}}
  ]
})";

const char* kModule = R"({
  "kind": "module",
  "algebra": "cyclic:n=2",
  "basis": ["x0", "x1"],
  "seed": "x0",
  "rules": [
    {"left": "g", "right": "x0", "result": {"x1": 1}},
    {"left": "g", "right": "x1", "result": {"x0": 1}}
  ],
  "dims": {"x0": 1, "x1": "1"}
})";

}  // namespace

TEST_CASE("an explicit two-element table parses and builds") {
  SpecFile s = parse_spec_text(kZ2);
  CHECK(s.kind == "algebra");
  CHECK(s.basis == std::vector<std::string>{"e", "g"});
  CHECK(s.unit == "e");
  REQUIRE(s.rules.size() == 1);
  CHECK(s.rules[0].left == "g");
  CHECK(s.rules[0].result == std::vector<std::pair<std::string, Int>>{{"e", Int(1)}});

  AlgebraPtr A = build_algebra(s);
  CHECK(validate_axioms(*A, 6).ok());
  CHECK(A->dim(A->basis().parse("g")) == 1.0);
  // unit rows are synthesized, so e*g works without a written rule
  CHECK(A->product(A->basis().parse("e"), A->basis().parse("g")).size() == 1);
  // generators default to every non-unit label
  CHECK(A->generators() == std::vector<Label>{Label{1}});
}

TEST_CASE("catalog delegation inside a file") {
  SpecFile s = parse_spec_text(R"({"kind": "algebra", "catalog": "verlinde:k=2"})");
  REQUIRE(s.catalog.has_value());
  AlgebraPtr A = build_algebra(s);
  CHECK(A->description() == "verlinde:k=2");
  CHECK(A->basis().size() == std::optional<std::size_t>(3));
}

TEST_CASE("involution pairs complete automatically") {
  SpecFile s = parse_spec_text(kZ3);
  AlgebraPtr A = build_algebra(s);
  Label g = A->basis().parse("g"), g2 = A->basis().parse("g2");
  CHECK(A->conjugate_label(g) == g2);
  CHECK(A->conjugate_label(g2) == g);  // only g -> g2 was written
  CHECK(validate_axioms(*A, 6).ok());
}

TEST_CASE("module files build against catalog algebras") {
  SpecFile s = parse_spec_text(kModule);
  CHECK(s.kind == "module");
  REQUIRE(s.algebra_id.has_value());
  ModulePtr M = build_module(s);
  CHECK(validate_module(*M, 6).ok());
  CHECK(M->basis().name(M->seed()) == "x0");
  Label g = M->algebra().basis().parse("g");
  Label x0 = M->basis().parse("x0");
  CHECK(M->action(g, x0) == Product{{M->basis().parse("x1"), Int(1)}});
}

TEST_CASE("module files may carry an inline algebra") {
  std::string text = std::string(R"({
    "kind": "module",
    "algebra": )") + kZ2 + R"(,
    "basis": ["x"],
    "seed": "x",
    "rules": [
      {"left": "g", "right": "x", "result": {"x": 1}}
    ]
  })";
  SpecFile s = parse_spec_text(text);
  REQUIRE(s.algebra_inline != nullptr);
  CHECK(s.algebra_inline->kind == "algebra");
  ModulePtr M = build_module(s);
  CHECK(validate_module(*M, 6).ok());
}

TEST_CASE("parse failures carry precise codes") {
  std::string msg;

  SECTION("malformed JSON reports line and column") {
    CHECK(code_of([&] { parse_spec_text("{\n  \"kind\": \"algebra\",,\n}", "f.json"); }, &msg) ==
          Errc::syntax_error);
    CHECK(msg.find("f.json:2") != std::string::npos);
  }
  SECTION("unknown keys are named") {
    CHECK(code_of([&] {
            parse_spec_text(R"({"kind": "algebra", "basis": ["e"], "unit": "e", "extra": 1})");
          }, &msg) == Errc::unknown_key);
    CHECK(msg.find("'extra'") != std::string::npos);
  }
  SECTION("duplicate rules") {
    CHECK(code_of([&] {
            parse_spec_text(R"({"kind": "algebra", "basis": ["e", "g"], "unit": "e", "rules": [
              {"left": "g", "right": "g", "result": {"e": 1}},
              {"left": "g", "right": "g", "result": {"e": 2}}
            ]})");
          }) == Errc::duplicate_rule);
  }
  SECTION("multiplicities must be positive integers") {
    for (const char* bad : {"0", "-2", "1.5", "\"2\""}) {
      std::string text = std::string(R"({"kind": "algebra", "basis": ["e", "g"], "unit": "e",
        "rules": [{"left": "g", "right": "g", "result": {"e": )") + bad + "}}]}";
      INFO(bad);
      CHECK(code_of([&] { parse_spec_text(text); }) == Errc::multiplicity_not_positive_integer);
    }
  }
  SECTION("duplicate basis labels") {
    CHECK(code_of([&] {
            parse_spec_text(R"({"kind": "algebra", "basis": ["e", "e"], "unit": "e"})");
          }) == Errc::syntax_error);
  }
  SECTION("float dimensions are rejected; strings parse exactly") {
    CHECK(code_of([&] {
            parse_spec_text(R"({"kind": "algebra", "basis": ["e"], "unit": "e",
                               "dims": {"e": 0.25}})");
          }) == Errc::syntax_error);
    SpecFile s = parse_spec_text(R"({"kind": "algebra", "basis": ["e"], "unit": "e",
                                     "dims": {"e": "1"}})");
    CHECK(s.dims == std::vector<std::pair<std::string, Rational>>{{"e", Rational(1)}});
  }
  SECTION("bad kind") {
    CHECK(code_of([&] { parse_spec_text(R"({"kind": "ring", "basis": ["e"]})"); }) ==
          Errc::syntax_error);
  }
  SECTION("missing file") {
    CHECK(code_of([&] { parse_spec("/nonexistent/definitely/missing.json"); }) == Errc::io_error);
  }
}

TEST_CASE("build failures carry precise codes") {
  SECTION("unit outside basis") {
    SpecFile s = parse_spec_text(R"({"kind": "algebra", "basis": ["e", "g"], "unit": "q"})");
    CHECK(code_of([&] { build_algebra(s); }) == Errc::unknown_label);
  }
  SECTION("seed outside basis") {
    SpecFile s = parse_spec_text(
        R"({"kind": "module", "algebra": "cyclic:n=2", "basis": ["x"], "seed": "y"})");
    CHECK(code_of([&] { build_module(s); }) == Errc::unknown_label);
  }
  SECTION("missing rules surface on first use") {
    SpecFile s = parse_spec_text(R"({"kind": "algebra", "basis": ["e", "g"], "unit": "e"})");
    AlgebraPtr A = build_algebra(s);  // unit rows alone construct fine
    CHECK(code_of([&] { A->product(Label{1}, Label{1}); }) == Errc::unknown_rule);

    SpecFile m = parse_spec_text(
        R"({"kind": "module", "algebra": "cyclic:n=2", "basis": ["x"], "seed": "x"})");
    ModulePtr M = build_module(m);
    CHECK(code_of([&] { M->action(Label{1}, Label{0}); }) == Errc::unknown_rule);
  }
  SECTION("bad catalog reference") {
    SpecFile s = parse_spec_text(R"({"kind": "algebra", "catalog": "nope:x=1"})");
    CHECK(code_of([&] { build_algebra(s); }) == Errc::unknown_catalog_entry);
  }
}

TEST_CASE("canonical emission is byte stable under reparsing") {
  for (const char* text : {kZ2, kZ3, kModule}) {
    SpecFile first = parse_spec_text(text);
    std::string canon = emit_canonical(first);
    SpecFile second = parse_spec_text(canon);
    CHECK(second == first);
    CHECK(emit_canonical(second) == canon);
  }
}

TEST_CASE("emission normalizes rule order") {
  // same content, rules listed in opposite order
  const char* forward = R"({"kind": "algebra", "basis": ["e", "a", "b"], "unit": "e", "rules": [
    {"left": "a", "right": "a", "result": {"e": 1}},
    {"left": "b", "right": "b", "result": {"e": 1}},
    {"left": "a", "right": "b", "result": {"b": 1}},
    {"left": "b", "right": "a", "result": {"b": 1}}
  ]})";
  const char* shuffled = R"({"kind": "algebra", "basis": ["e", "a", "b"], "unit": "e", "rules": [
    {"left": "b", "right": "a", "result": {"b": 1}},
    {"left": "a", "right": "b", "result": {"b": 1}},
    {"left": "b", "right": "b", "result": {"e": 1}},
    {"left": "a", "right": "a", "result": {"e": 1}}
  ]})";
  CHECK(emit_canonical(parse_spec_text(forward)) == emit_canonical(parse_spec_text(shuffled)));
  CHECK(parse_spec_text(forward) == parse_spec_text(shuffled));
}

TEST_CASE("inline algebras round trip through emission") {
  std::string text = std::string(R"({"kind": "module", "algebra": )") + kZ3 +
                     R"(, "basis": ["x"], "seed": "x",
                        "rules": [{"left": "g", "right": "x", "result": {"x": 1}},
                                  {"left": "g2", "right": "x", "result": {"x": 1}}]})";
  SpecFile first = parse_spec_text(text);
  std::string canon = emit_canonical(first);
  SpecFile second = parse_spec_text(canon);
  CHECK(second == first);
  CHECK(emit_canonical(second) == canon);
  ModulePtr M = build_module(second);
  CHECK(validate_module(*M, 4).ok());
}
