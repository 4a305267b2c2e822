#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuselab/amenability.hpp"
#include "fuselab/catalog.hpp"
#include "fuselab/certificate.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/gamma.hpp"
#include "fuselab/spectral.hpp"
#include "fuselab/specfile.hpp"
#include "fuselab/window.hpp"

namespace fuselab::cli {

// Exit codes: 0 success / AMENABLE_NUMERIC, 1 validation violations,
// 2 usage or malformed input, 3 NOT_AMENABLE_CERTIFIED, 4 INCONCLUSIVE,
// 5 computation failure.
constexpr int exit_ok = 0;
constexpr int exit_violations = 1;
constexpr int exit_usage = 2;
constexpr int exit_not_amenable = 3;
constexpr int exit_inconclusive = 4;
constexpr int exit_computation = 5;

/// Input defects (bad files, ids, elements, parameters) exit 2; failures of
/// a well-posed computation exit 5.
inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::usage_error:
    case Errc::syntax_error:
    case Errc::unknown_key:
    case Errc::duplicate_rule:
    case Errc::multiplicity_not_positive_integer:
    case Errc::unknown_catalog_entry:
    case Errc::io_error:
    case Errc::unknown_label:
    case Errc::unknown_rule:
    case Errc::zero_element:
    case Errc::negative_coefficient:
    case Errc::not_symmetric_element:
    case Errc::parameter_out_of_range:
    case Errc::not_a_group:
    case Errc::negative_multiplicity:
    case Errc::disconnected:
    case Errc::unit_law_violation:
    case Errc::unit_action_violation:
    case Errc::involution_not_involutive:
    case Errc::non_positive_multiplicity:
    case Errc::weight_not_positive:
    case Errc::dimension_not_rational:
      return exit_usage;
    default:
      return exit_computation;
  }
}

inline int exit_for_verdict(Verdict v) {
  switch (v) {
    case Verdict::amenable_numeric: return exit_ok;
    case Verdict::not_amenable_certified: return exit_not_amenable;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return exit_inconclusive;
}

namespace detail {

inline std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string fmt_double(double v, int precision = 9) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace detail

/// `2*u1 + u3`: integer-coefficient sums of basis labels, no negatives.
inline RingElement parse_element(const std::string& text, const Basis& basis) {
  RingElement out;
  bool any = false;
  for (const std::string& raw : detail::split(text, '+')) {
    std::string term = detail::trim(raw);
    if (term.empty()) raise(Errc::syntax_error, "empty term in element '" + text + "'");
    if (term.find('-') != std::string::npos)
      raise(Errc::negative_coefficient, "element syntax allows nonnegative coefficients only");
    Int coeff = 1;
    auto star = term.find('*');
    if (star != std::string::npos) {
      std::string num = detail::trim(term.substr(0, star));
      if (num.empty() || !std::all_of(num.begin(), num.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
          }))
        raise(Errc::syntax_error, "bad coefficient '" + num + "' in element '" + text + "'");
      coeff = Int(num);
      term = detail::trim(term.substr(star + 1));
    }
    out.add(basis.parse(term), coeff);
    any = true;
  }
  if (!any) raise(Errc::syntax_error, "empty element");
  return out;
}

/// `1/2:u0, 0.5:u1`: exact rational weights on basis labels.
inline ProbabilityMeasure parse_measure(const std::string& text, const Basis& basis) {
  ProbabilityMeasure::Weights weights;
  for (const std::string& raw : detail::split(text, ',')) {
    std::string entry = detail::trim(raw);
    if (entry.empty()) raise(Errc::syntax_error, "empty entry in measure '" + text + "'");
    auto colon = entry.find(':');
    if (colon == std::string::npos)
      raise(Errc::syntax_error, "measure entries look like weight:label, got '" + entry + "'");
    Rational w = parse_rational(detail::trim(entry.substr(0, colon)));
    weights[basis.parse(detail::trim(entry.substr(colon + 1)))] += w;
  }
  return ProbabilityMeasure::from_weights(std::move(weights));
}

/// Built-in weight family ids (`affine`, `affine:slope=1,intercept=2`,
/// `constant`, `constant:3`, `dimension`) or a JSON file with a `weights`
/// table.
inline WeightFamily parse_certificate(const std::string& text, const FusionModule& M) {
  if (text == "affine") return affine_weights();
  if (text.rfind("affine:", 0) == 0) {
    Rational slope = 1, intercept = 1;
    for (const std::string& raw : detail::split(text.substr(7), ',')) {
      std::string part = detail::trim(raw);
      auto eq = part.find('=');
      if (eq == std::string::npos)
        raise(Errc::usage_error, "affine certificate parameters look like slope=1,intercept=2");
      std::string key = detail::trim(part.substr(0, eq));
      Rational value = parse_rational(detail::trim(part.substr(eq + 1)));
      if (key == "slope")
        slope = value;
      else if (key == "intercept")
        intercept = value;
      else
        raise(Errc::usage_error, "unknown affine certificate parameter '" + key + "'");
    }
    return affine_weights(slope, intercept);
  }
  if (text == "constant") return constant_weights();
  if (text.rfind("constant:", 0) == 0) return constant_weights(parse_rational(text.substr(9)));
  if (text == "dimension") return dimension_weights(M);
  if (std::filesystem::exists(text)) {
    std::ifstream in(text, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open certificate file '" + text + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      raise(Errc::syntax_error, std::string("certificate file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("weights") || !j.at("weights").is_object())
      raise(Errc::syntax_error, "certificate file needs a top-level 'weights' object");
    std::map<Label, Rational> table;
    for (auto it = j.at("weights").begin(); it != j.at("weights").end(); ++it) {
      Rational w = it.value().is_number_integer() ? Rational(it.value().get<std::int64_t>())
                                                  : parse_rational(it.value().get<std::string>());
      table[M.basis().parse(it.key())] = w;
    }
    return explicit_weights(std::move(table), "file:" + text);
  }
  raise(Errc::usage_error, "certificate '" + text +
                               "' is neither a built-in family (affine, constant, dimension) nor a file");
}

/// A positional input: a catalog id or a definition-file path.
struct ResolvedInput {
  std::string id;
  std::string digest;  // FNV-1a over the file bytes, or over the id string
  AlgebraPtr algebra;
  ModulePtr module;  // null when the input denotes a bare algebra
};

inline ResolvedInput resolve_input(const std::string& given, bool need_module) {
  ResolvedInput r;
  r.id = given;
  if (std::filesystem::exists(given)) {
    std::ifstream in(given, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open '" + given + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    r.digest = detail::fnv1a_hex(bytes);
    SpecFile spec = parse_spec_text(bytes, given);
    if (spec.kind == "module") {
      r.module = build_module(spec, given);
      r.algebra = r.module->config().algebra;
    } else {
      r.algebra = build_algebra(spec, given);
    }
  } else {
    r.digest = detail::fnv1a_hex(given);
    if (is_module_id(given)) {
      r.module = make_module_from_id(given);
      r.algebra = r.module->config().algebra;
    } else {
      r.algebra = make_algebra_from_id(given);
    }
  }
  if (need_module && !r.module)
    raise(Errc::usage_error,
          "'" + given + "' names an algebra; this command needs a module (try regular@" + given + ")");
  return r;
}

namespace detail {

inline nlohmann::json violations_json(const ValidationReport& rep) {
  nlohmann::json j;
  j["checks_run"] = rep.checks_run;
  j["truncated"] = rep.truncated;
  j["ok"] = rep.ok();
  j["violations"] = nlohmann::json::array();
  for (const auto& v : rep.violations)
    j["violations"].push_back({{"check", v.check}, {"witnesses", v.witnesses}, {"detail", v.detail}});
  return j;
}

inline void print_violations(std::ostream& out, const std::string& what, const ValidationReport& rep) {
  out << what << ": " << rep.checks_run << " checks, " << rep.violations.size() << " violation"
      << (rep.violations.size() == 1 ? "" : "s") << (rep.truncated ? " (stopped early)" : "") << "\n";
  for (const auto& v : rep.violations) {
    out << "  [" << v.check << "]";
    for (const auto& w : v.witnesses) out << " " << w;
    out << ": " << v.detail << "\n";
  }
}

inline nlohmann::json certificate_json(const CertificateRecord& rec) {
  nlohmann::json j;
  j["certified"] = rec.certified;
  j["bound"] = to_string(rec.bound);
  j["family"] = rec.family_id;
  j["log"] = rec.log;
  if (rec.failure_witness) j["failure_witness"] = *rec.failure_witness;
  return j;
}

inline nlohmann::json amen_json(const AmenabilityReport& rep) {
  nlohmann::json j;
  j["element"] = rep.element_desc;
  j["measure_mode"] = rep.measure_mode;
  j["target"] = rep.target;
  j["tol"] = rep.tol;
  j["lower_bounds"] = nlohmann::json::array();
  for (const auto& lb : rep.lower_bounds)
    j["lower_bounds"].push_back({{"radius", lb.radius},
                                 {"window_size", lb.window_size},
                                 {"bound", lb.bound},
                                 {"converged", lb.converged}});
  if (rep.certificate) j["certificate"] = certificate_json(*rep.certificate);
  j["notes"] = rep.notes;
  j["verdict"] = verdict_name(rep.verdict);
  return j;
}

inline void print_amen(std::ostream& out, const AmenabilityReport& rep) {
  out << "  test:    " << rep.element_desc << "\n";
  out << "  target:  " << fmt_double(rep.target) << "   tolerance: " << fmt_double(rep.tol) << "\n";
  out << "  radius  window  lower-bound     converged\n";
  for (const auto& lb : rep.lower_bounds)
    out << "  " << std::setw(6) << lb.radius << "  " << std::setw(6) << lb.window_size << "  "
        << std::setw(14) << std::left << fmt_double(lb.bound, 10) << std::right << "  "
        << (lb.converged ? "yes" : "no") << "\n";
  if (rep.certificate) {
    out << "  certificate (" << rep.certificate->family_id << "): "
        << (rep.certificate->certified ? "certified upper bound " : "NOT certified, checked C = ")
        << to_string(rep.certificate->bound) << "\n";
    for (const auto& line : rep.certificate->log) out << "    " << line << "\n";
  }
  for (const auto& n : rep.notes) out << "  note: " << n << "\n";
  out << "verdict: " << verdict_name(rep.verdict) << "\n";
}

struct RunContext {
  nlohmann::json report;
  std::string json_path;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void finish(int exit_code) {
    report["exit_code"] = exit_code;
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (json_path.empty()) return;
    std::ofstream out(json_path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write report to '" + json_path + "'");
    out << report.dump(2) << "\n";
  }
};

}  // namespace detail

/// Runs one command; argument vector excludes the program name. All human
/// output goes to `out`, diagnostics to `err`; the optional JSON report is
/// written even when the command fails.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact fusion algebras and modules: truncated action operators, "
               "norm bounds, and amenability probes"};
  app.require_subcommand(1);

  std::string input, test, element, certificate, certificate_constant, json_path;
  int radius_validate = 8, radius_norm = 100, certificate_radius = 32;
  int max_violations = 100;
  double tol_validate = 1e-9, tol_amen = 1e-3, power_tol = 1e-12, pf_tol = 1e-12;
  std::size_t max_iter = 100000;
  std::vector<int> radii;

  CLI::App* validate = app.add_subcommand("validate", "check the axioms on a ball around the unit/seed");
  validate->add_option("input", input, "catalog id or definition file")->required();
  validate->add_option("--radius", radius_validate, "ball radius (default 8)");
  validate->add_option("--tol", tol_validate, "dimension comparison tolerance (default 1e-9)");
  validate->add_option("--max-violations", max_violations, "stop after this many findings (default 100)");
  validate->add_option("--json", json_path, "write a machine-readable report here");

  CLI::App* amen = app.add_subcommand("amen", "amenability probe for a module");
  amen->add_option("input", input, "catalog module id or module definition file")->required();
  amen->add_option("--test", test, "ring element `2*u1 + u3` or measure `1/2:u0, 1/2:u1`")->required();
  amen->add_option("--radii", radii, "window radius schedule (default 8,32,128)")->delimiter(',');
  amen->add_option("--tol", tol_amen, "verdict tolerance (default 1e-3)");
  amen->add_option("--certificate", certificate,
                   "weight family for a non-amenability certificate (affine, constant, dimension, or a file)");
  amen->add_option("--certificate-constant", certificate_constant,
                   "rational constant C to certify (default: tightest the family admits)");
  amen->add_option("--certificate-radius", certificate_radius,
                   "window radius for certificate verification (default 32)");
  amen->add_option("--max-iter", max_iter, "power iteration cap (default 100000)");
  amen->add_option("--power-tol", power_tol, "power iteration relative tolerance (default 1e-12)");
  amen->add_option("--json", json_path, "write a machine-readable report here");

  CLI::App* norm = app.add_subcommand("norm", "lower bound for the action operator norm of an element");
  norm->add_option("input", input, "catalog module id or module definition file")->required();
  norm->add_option("--element", element, "ring element, e.g. `2*u1 + u3`")->required();
  norm->add_option("--radius", radius_norm, "window radius (default 100)");
  norm->add_option("--max-iter", max_iter, "power iteration cap (default 100000)");
  norm->add_option("--power-tol", power_tol, "power iteration relative tolerance (default 1e-12)");
  norm->add_option("--json", json_path, "write a machine-readable report here");

  CLI::App* pf = app.add_subcommand("pf-dim", "Perron-Frobenius dimensions of a finite algebra");
  pf->add_option("input", input, "catalog algebra id or definition file")->required();
  pf->add_option("--tol", pf_tol, "eigenvector iteration tolerance (default 1e-12)");
  pf->add_option("--json", json_path, "write a machine-readable report here");

  CLI::App* catalog = app.add_subcommand("catalog", "list built-in algebra and module families");
  catalog->add_option("--json", json_path, "write a machine-readable report here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? exit_ok : exit_usage;
  }

  detail::RunContext ctx;
  ctx.json_path = json_path;
  ctx.report["argv"] = args;

  try {
    if (app.got_subcommand(validate)) {
      ctx.report["command"] = "validate";
      ctx.report["settings"] = {{"radius", radius_validate},
                                {"tol", tol_validate},
                                {"max_violations", max_violations},
                                {"max_ball", max_ball_cap()}};
      ResolvedInput in = resolve_input(input, false);
      ctx.report["inputs"] = {{"id", in.id}, {"digest", "fnv1a:" + in.digest}};
      out << "validate " << in.id << " at radius " << radius_validate << "\n";
      ValidationReport alg_rep = validate_axioms(*in.algebra, radius_validate, tol_validate, max_violations);
      detail::print_violations(out, "algebra " + in.algebra->description(), alg_rep);
      ctx.report["results"]["algebra"] = detail::violations_json(alg_rep);
      bool ok = alg_rep.ok();
      if (in.module) {
        ValidationReport mod_rep = validate_module(*in.module, radius_validate, tol_validate, max_violations);
        detail::print_violations(out, "module " + in.module->description(), mod_rep);
        ctx.report["results"]["module"] = detail::violations_json(mod_rep);
        ok = ok && mod_rep.ok();
      }
      out << (ok ? "OK" : "FAIL") << "\n";
      int rc = ok ? exit_ok : exit_violations;
      ctx.finish(rc);
      return rc;
    }

    if (app.got_subcommand(amen)) {
      ctx.report["command"] = "amen";
      if (radii.empty()) radii = {8, 32, 128};
      AmenabilityOptions opts;
      opts.radii = radii;
      opts.tol = tol_amen;
      opts.power.max_iter = max_iter;
      opts.power.tol = power_tol;
      opts.certificate_radius = certificate_radius;
      ctx.report["settings"] = {{"radii", radii},
                                {"tol", tol_amen},
                                {"power",
                                 {{"max_iter", max_iter},
                                  {"tol", power_tol},
                                  {"start_vector", "uniform-positive"}}},
                                {"certificate_radius", certificate_radius},
                                {"max_ball", max_ball_cap()}};
      ResolvedInput in = resolve_input(input, true);
      ctx.report["inputs"] = {{"id", in.id}, {"digest", "fnv1a:" + in.digest}};
      out << "amenability probe on " << in.module->description() << "\n";

      AmenabilityReport rep;
      if (test.find(':') != std::string::npos) {
        ProbabilityMeasure mu = parse_measure(test, in.algebra->basis());
        rep = amenability_test(*in.module, mu, opts);
      } else {
        RingElement u = parse_element(test, in.algebra->basis());
        if (!certificate.empty()) {
          opts.certificate = parse_certificate(certificate, *in.module);
          if (!certificate_constant.empty())
            opts.certificate_constant = parse_rational(certificate_constant);
        }
        rep = amenability_test(*in.module, u, opts);
      }
      detail::print_amen(out, rep);
      ctx.report["results"] = detail::amen_json(rep);
      ctx.report["verdict"] = verdict_name(rep.verdict);
      int rc = exit_for_verdict(rep.verdict);
      ctx.finish(rc);
      return rc;
    }

    if (app.got_subcommand(norm)) {
      ctx.report["command"] = "norm";
      ctx.report["settings"] = {{"radius", radius_norm},
                                {"power",
                                 {{"max_iter", max_iter},
                                  {"tol", power_tol},
                                  {"start_vector", "uniform-positive"}}},
                                {"max_ball", max_ball_cap()}};
      ResolvedInput in = resolve_input(input, true);
      ctx.report["inputs"] = {{"id", in.id}, {"digest", "fnv1a:" + in.digest}};
      RingElement u = parse_element(element, in.algebra->basis());
      std::vector<Label> support;
      for (const auto& [l, c] : u.terms()) support.push_back(l);
      ActionWindow window = enumerate_ball(*in.module, support, radius_norm);
      TruncatedOperator op = build_gamma(*in.module, u, window);
      PowerOptions popts{max_iter, power_tol};
      NormBound nb = norm_lower_bound(op, popts);
      double ceiling = dim_of(*in.algebra, u);
      out << "norm bound for " << op.element_desc << " on " << in.module->description() << "\n";
      out << "  radius " << radius_norm << "  window " << window.size() << " labels\n";
      out << "  lower bound " << detail::fmt_double(nb.value, 12) << "  ("
          << (nb.converged ? "converged" : "NOT converged") << " after " << nb.iterations
          << " iterations)\n";
      out << "  ceiling     " << detail::fmt_double(ceiling, 12) << "  (element dimension)\n";
      ctx.report["results"] = {{"element", op.element_desc},
                               {"radius", radius_norm},
                               {"window_size", window.size()},
                               {"bound", nb.value},
                               {"converged", nb.converged},
                               {"iterations", nb.iterations},
                               {"ceiling", ceiling}};
      if (nb.value > ceiling * (1.0 + 1e-9) + 1e-9)
        raise(Errc::internal_inconsistency, "lower bound " + detail::fmt_double(nb.value, 12) +
                                                " exceeds the dimension ceiling " +
                                                detail::fmt_double(ceiling, 12));
      ctx.finish(exit_ok);
      return exit_ok;
    }

    if (app.got_subcommand(pf)) {
      ctx.report["command"] = "pf-dim";
      ctx.report["settings"] = {{"tol", pf_tol}, {"max_ball", max_ball_cap()}};
      ResolvedInput in = resolve_input(input, false);
      ctx.report["inputs"] = {{"id", in.id}, {"digest", "fnv1a:" + in.digest}};
      if (in.module)
        out << "note: using the underlying algebra " << in.algebra->description() << "\n";
      DimensionFunction d = pf_dimension(*in.algebra, pf_tol);
      std::vector<Label> labels = in.algebra->basis().labels();
      out << "Perron-Frobenius dimensions of " << in.algebra->description() << "\n";
      nlohmann::json dims = nlohmann::json::object();
      for (Label l : labels) {
        out << "  " << std::setw(8) << std::left << in.algebra->basis().name(l) << std::right << "  "
            << detail::fmt_double(d.value(l), 12) << "\n";
        dims[in.algebra->basis().name(l)] = d.value(l);
      }
      double max_residual = 0.0;
      for (Label a : labels)
        for (Label b : labels) {
          double prod = 0.0;
          for (const auto& [l, n] : in.algebra->product(a, b)) prod += to_double(Int(n)) * d.value(l);
          double expect = d.value(a) * d.value(b);
          max_residual = std::max(max_residual, std::abs(prod - expect) / std::max(1.0, std::abs(expect)));
        }
      out << "  multiplicativity residual " << detail::fmt_double(max_residual, 3) << "\n";
      ctx.report["results"] = {{"dims", dims}, {"max_mult_residual", max_residual}};
      if (max_residual > 1e-9)
        raise(Errc::internal_inconsistency,
              "dimension function is not multiplicative to tolerance; residual " +
                  detail::fmt_double(max_residual, 3));
      ctx.finish(exit_ok);
      return exit_ok;
    }

    // catalog
    ctx.report["command"] = "catalog";
    nlohmann::json entries = nlohmann::json::array();
    out << "built-in families:\n";
    for (const auto& e : catalog_entries()) {
      out << "  " << std::setw(26) << std::left << e.pattern << std::right << "  " << e.summary
          << "  (e.g. " << e.example << ")\n";
      entries.push_back({{"pattern", e.pattern}, {"summary", e.summary}, {"example", e.example}});
    }
    ctx.report["results"] = {{"entries", entries}};
    ctx.finish(exit_ok);
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";  // what() carries the code name prefix
    int rc = exit_code_for(e.code());
    ctx.report["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    try {
      ctx.finish(rc);
    } catch (const Error&) {
      // report emission failed; the primary error already went to err
    }
    return rc;
  }
}

}  // namespace fuselab::cli
