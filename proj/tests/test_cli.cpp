#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuselab/cli.hpp"

using namespace fuselab;

namespace {

struct CliResult {
  int rc = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.rc = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Temp-file helper that cleans up after the test.
class TempFile {
 public:
  explicit TempFile(const std::string& tag, const std::string& contents = "") {
    path_ = (std::filesystem::temp_directory_path() / ("fuselab_test_" + tag)).string();
    if (!contents.empty()) {
      std::ofstream f(path_, std::ios::binary);
      f << contents;
    }
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return nlohmann::json::parse(f);
}

}  // namespace

TEST_CASE("catalog listing") {
  CliResult r = run({"catalog"});
  CHECK(r.rc == cli::exit_ok);
  CHECK(r.out.find("su2:N=<rational>") != std::string::npos);
  CHECK(r.out.find("graph:A<n>@<algebra-id>") != std::string::npos);
}

TEST_CASE("validate a clean catalog module") {
  TempFile report("validate_ok.json");
  CliResult r = run({"validate", "torus:N=2", "--radius", "8", "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);
  CHECK(r.out.find("OK") != std::string::npos);

  nlohmann::json j = read_json(report.path());
  CHECK(j["exit_code"] == 0);
  CHECK(j["command"] == "validate");
  CHECK(j["settings"]["radius"] == 8);
  CHECK(j["results"]["algebra"]["ok"] == true);
  CHECK(j["results"]["module"]["ok"] == true);
  CHECK(j["results"]["module"]["violations"].empty());
  std::string digest = j["inputs"]["digest"].get<std::string>();
  CHECK(digest.rfind("fnv1a:", 0) == 0);
  CHECK(digest.size() == 6 + 16);
  CHECK(j.contains("timing_ms"));
}

TEST_CASE("validate flags a corrupted table with a reciprocity witness") {
  TempFile bad("bad_algebra.json", R"({
    "kind": "algebra",
    "basis": ["e", "g"],
    "unit": "e",
    "rules": [{"left": "g", "right": "g", "result": {"g": 1}}]
  })");
  CliResult r = run({"validate", bad.path()});
  CHECK(r.rc == cli::exit_violations);
  CHECK(r.out.find("FAIL") != std::string::npos);
  CHECK(r.out.find("frobenius") != std::string::npos);
}

TEST_CASE("validate rejects a zero radius") {
  CliResult r = run({"validate", "torus:N=2", "--radius", "0"});
  CHECK(r.rc == cli::exit_usage);
  CHECK(r.err.find("UsageError") != std::string::npos);
}

TEST_CASE("amenability probe on the lattice module") {
  TempFile report("amen_torus.json");
  CliResult r = run({"amen", "torus:N=2", "--test", "u1", "--radii", "50,150,250", "--tol", "1e-3",
                     "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);
  CHECK(r.out.find("AMENABLE_NUMERIC") != std::string::npos);

  nlohmann::json j = read_json(report.path());
  CHECK(j["verdict"] == "AMENABLE_NUMERIC");
  CHECK(j["settings"]["radii"] == nlohmann::json({50, 150, 250}));
  CHECK(j["settings"]["power"]["start_vector"] == "uniform-positive");
  CHECK(j["results"]["tol"] == 1e-3);
  CHECK(j["results"]["target"] == 4.0);
  auto bounds = j["results"]["lower_bounds"];
  REQUIRE(bounds.size() == 3);
  CHECK(bounds[2]["bound"].get<double>() >= 4.0 - 1e-3);
  CHECK(bounds[2]["bound"].get<double>() <= 4.0 + 1e-9);
  CHECK(bounds[2]["radius"] == 250);
}

TEST_CASE("certified non-amenability exits with its own code") {
  TempFile report("amen_cert.json");
  CliResult r = run({"amen", "regular@su2:N=3", "--test", "u1", "--certificate", "affine",
                     "--json", report.path()});
  CHECK(r.rc == cli::exit_not_amenable);
  CHECK(r.out.find("NOT_AMENABLE_CERTIFIED") != std::string::npos);

  nlohmann::json j = read_json(report.path());
  CHECK(j["results"]["certificate"]["certified"] == true);
  CHECK(j["results"]["certificate"]["bound"] == "4");
  CHECK(j["results"]["target"] == 6.0);
  CHECK(j["exit_code"] == cli::exit_not_amenable);
}

TEST_CASE("shallow windows at tight tolerance exit inconclusive") {
  CliResult r = run({"amen", "regular@su2:N=2", "--test", "u1", "--radii", "5", "--tol", "1e-6"});
  CHECK(r.rc == cli::exit_inconclusive);
  CHECK(r.out.find("INCONCLUSIVE") != std::string::npos);
}

TEST_CASE("measure tests target the contraction ceiling") {
  TempFile report("amen_measure.json");
  CliResult r =
      run({"amen", "torus:N=2", "--test", "1/2:u0, 1/2:u1", "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);
  nlohmann::json j = read_json(report.path());
  CHECK(j["results"]["measure_mode"] == true);
  CHECK(j["results"]["target"] == 1.0);
  CHECK(j["results"]["element"] == "measure 1/2:u0, 1/2:u1");
}

TEST_CASE("malformed test inputs exit with the usage code") {
  CHECK(run({"amen", "torus:N=2", "--test", "1/2:u0"}).rc == cli::exit_usage);  // sums to 1/2
  CHECK(run({"amen", "torus:N=2", "--test", "2u1"}).rc == cli::exit_usage);     // missing '*'
  CHECK(run({"amen", "torus:N=2", "--test", "u1 - u2"}).rc == cli::exit_usage);
  CHECK(run({"validate", "su2:N=1"}).rc == cli::exit_usage);  // parameter out of range
  CHECK(run({"validate", "nope:x=1"}).rc == cli::exit_usage);
}

TEST_CASE("norm reports the bound and the dimension ceiling") {
  TempFile report("norm_unit.json");
  CliResult r = run({"norm", "torus:N=2", "--element", "u0", "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);
  nlohmann::json j = read_json(report.path());
  CHECK(std::abs(j["results"]["bound"].get<double>() - 1.0) < 1e-9);
  CHECK(j["results"]["ceiling"] == 1.0);

  TempFile report2("norm_chain.json");
  CliResult r2 = run({"norm", "regular@su2:N=3", "--element", "u1", "--radius", "100", "--json",
                      report2.path()});
  CHECK(r2.rc == cli::exit_ok);
  nlohmann::json j2 = read_json(report2.path());
  // window of radius 100 is a 101-point path: largest eigenvalue 2 cos(pi/102)
  CHECK(std::abs(j2["results"]["bound"].get<double>() - 1.9990514390) < 1e-6);
  CHECK(j2["results"]["ceiling"] == 3.0);
  CHECK(j2["results"]["window_size"] == 101);
}

TEST_CASE("norm needs a module input") {
  CliResult r = run({"norm", "su2:N=2", "--element", "u1"});
  CHECK(r.rc == cli::exit_usage);
  CHECK(r.err.find("regular@su2:N=2") != std::string::npos);
}

TEST_CASE("spectral dimensions through the command line") {
  TempFile report("pf_verlinde.json");
  CliResult r = run({"pf-dim", "verlinde:k=2", "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);
  CHECK(r.out.find("1.41421356") != std::string::npos);
  nlohmann::json j = read_json(report.path());
  CHECK(std::abs(j["results"]["dims"]["u1"].get<double>() - 1.4142135623730951) < 1e-9);
  CHECK(j["results"]["max_mult_residual"].get<double>() <= 1e-9);

  CliResult r2 = run({"pf-dim", "cyclic:n=3"});
  CHECK(r2.rc == cli::exit_ok);
  CHECK(r2.out.find("Perron-Frobenius dimensions of cyclic:n=3") != std::string::npos);
  CHECK(r2.out.find("multiplicativity residual") != std::string::npos);
}

TEST_CASE("spectral dimensions require a finite basis") {
  TempFile report("pf_infinite.json");
  CliResult r = run({"pf-dim", "su2:N=2", "--json", report.path()});
  CHECK(r.rc == cli::exit_computation);
  CHECK(r.err.find("NotFinite") != std::string::npos);

  // the failure is still recorded in the report
  nlohmann::json j = read_json(report.path());
  CHECK(j["error"]["code"] == "NotFinite");
  CHECK(j["exit_code"] == cli::exit_computation);

  // module ids resolve to their underlying algebra first
  CliResult r2 = run({"pf-dim", "torus:N=2"});
  CHECK(r2.rc == cli::exit_computation);
  CHECK(r2.out.find("using the underlying algebra su2:N=2") != std::string::npos);
}

TEST_CASE("definition files feed every command") {
  TempFile algebra("cli_z2.json", R"({
    "kind": "algebra",
    "basis": ["e", "g"],
    "unit": "e",
    "rules": [{"left": "g", "right": "g", "result": {"e": 1}}]
  })");
  CliResult r = run({"validate", algebra.path()});
  CHECK(r.rc == cli::exit_ok);

  CliResult pf = run({"pf-dim", algebra.path()});
  CHECK(pf.rc == cli::exit_ok);

  TempFile module("cli_mod.json", R"({
    "kind": "module",
    "algebra": "cyclic:n=2",
    "basis": ["x0", "x1"],
    "seed": "x0",
    "rules": [
      {"left": "g", "right": "x0", "result": {"x1": 1}},
      {"left": "g", "right": "x1", "result": {"x0": 1}}
    ]
  })");
  CliResult amen = run({"amen", module.path(), "--test", "g", "--radii", "4"});
  CHECK(amen.rc == cli::exit_ok);
}

TEST_CASE("certificate weight files") {
  TempFile weights("cli_weights.json", R"({"weights": {"u0": 1, "u1": "1"}})");
  TempFile report("amen_file_cert.json");
  CliResult r = run({"amen", "regular@verlinde:k=1", "--test", "u1", "--certificate",
                     weights.path(), "--json", report.path()});
  CHECK(r.rc == cli::exit_ok);  // finite family: the bound reaches the target
  nlohmann::json j = read_json(report.path());
  REQUIRE(j["results"].contains("certificate"));
  CHECK(j["results"]["certificate"]["family"] == "file:" + weights.path());
  CHECK(j["results"]["certificate"]["certified"] == true);
  CHECK(j["results"]["certificate"]["bound"] == "2");
}

TEST_CASE("argument errors never escape as exceptions") {
  CHECK(run({}).rc == cli::exit_usage);
  CHECK(run({"bogus-subcommand"}).rc == cli::exit_usage);
  CHECK(run({"validate"}).rc == cli::exit_usage);  // missing input
  CHECK(run({"validate", "torus:N=2", "--bogus"}).rc == cli::exit_usage);
  CHECK(run({"amen", "torus:N=2"}).rc == cli::exit_usage);  // missing --test
  CliResult help = run({"--help"});
  CHECK(help.rc == cli::exit_ok);
  CHECK(help.out.find("Usage") != std::string::npos);
}
