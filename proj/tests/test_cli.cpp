#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hardcore/cli.hpp"

namespace cli = hardcore::cli;
using json = nlohmann::ordered_json;

namespace {

std::string run_to_string(const std::vector<std::string>& args, int* code = nullptr) {
  auto config = cli::parse_and_validate(args);
  std::ostringstream out, err;
  int rc = cli::run(config, out, err);
  if (code) *code = rc;
  return out.str();
}

json run_to_json(const std::vector<std::string>& args, int* code = nullptr) {
  return json::parse(run_to_string(args, code));
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    path = std::filesystem::temp_directory_path() /
           ("hardcore-cli-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++) + ".ini");
    std::ofstream f(path);
    f << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
  static int counter;
};

int TempFile::counter = 0;

}  // namespace

TEST_CASE("subcommand parsing fills the run config") {
  auto config = cli::parse_and_validate({"critical", "--b", "2", "--C", "2",
                                         "--bracket", "6,9"});
  CHECK(config.command == "critical");
  CHECK(config.b == 2);
  CHECK(config.C == 2);
  CHECK(config.bracket == "6,9");

  auto fx = cli::parse_and_validate({"fixpoints", "--map", "H", "--gamma", "4"});
  CHECK(fx.command == "fixpoints");
  CHECK(fx.map_name == "H");
  CHECK(fx.gamma == 4.0);
}

TEST_CASE("validation names the offending field") {
  CHECK_THROWS_WITH_AS(
      cli::parse_and_validate({"recurse", "--b", "2", "--C", "1", "--lambda", "-1"}),
      "lambda must be positive", cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"recurse", "--b", "1"}), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"no-such-command"}), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({}), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"exact", "--depth", "0"}),
                  cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"scan", "--grid", "2:1:5"}),
                  cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"exact", "--bc", "const:9"}),
                  cli::UsageError);
  CHECK_THROWS_AS(cli::parse_and_validate({"exact", "--format", "xml"}),
                  cli::UsageError);
}

TEST_CASE("help is surfaced, not treated as an error") {
  CHECK_THROWS_AS(cli::parse_and_validate({"--help"}), cli::HelpRequested);
  try {
    cli::parse_and_validate({"critical", "--help"});
    FAIL("expected help");
  } catch (const cli::HelpRequested& help) {
    CHECK(help.text.find("--bracket") != std::string::npos);
  }
}

TEST_CASE("config file values are read and flags win over them") {
  TempFile file("lambda = 2.5\nb = 3\n");

  auto from_file = cli::parse_and_validate(
      {"recurse", "--C", "1", "--config", file.path.string()});
  CHECK(from_file.lambda == 2.5);
  CHECK(from_file.b == 3);
  CHECK(from_file.warnings.empty());

  auto overridden = cli::parse_and_validate({"recurse", "--C", "1", "--config",
                                             file.path.string(), "--lambda", "4"});
  CHECK(overridden.lambda == 4.0);
  CHECK(overridden.b == 3);  // untouched key still flows in
  REQUIRE(overridden.warnings.size() == 1);
  CHECK(overridden.warnings[0].find("lambda") != std::string::npos);
  CHECK(overridden.warnings[0].find("overridden") != std::string::npos);
}

TEST_CASE("exact command emits the documented schema") {
  int code = -1;
  auto doc = run_to_json({"exact", "--b", "2", "--C", "1", "--lambda", "1",
                          "--depth", "1"},
                         &code);
  CHECK(code == cli::kExitOk);
  CHECK(doc["schema_version"] == "hardcore-tree/v1");
  CHECK(doc["config_echo"]["command"] == "exact");
  CHECK(doc["config_echo"]["b"] == 2);
  auto p = doc["result"]["law"]["p"];
  REQUIRE(p.size() == 2);
  CHECK(p[0].get<double>() == doctest::Approx(0.5));
  CHECK(p[1].get<double>() == doctest::Approx(0.5));
  CHECK(doc["diagnostics"]["exit_code"] == 0);
}

TEST_CASE("fixpoints reports the three-point structure") {
  auto doc = run_to_json({"fixpoints", "--map", "J2", "--b", "2", "--lambda", "7"});
  auto points = doc["result"]["fixed_points"]["points"];
  REQUIRE(points.size() == 3);
  CHECK(points[0]["stability"] == "attracting");
  CHECK(points[1]["stability"] == "repelling");
  CHECK(points[2]["stability"] == "attracting");
  CHECK(doc["result"]["s_shape"]["is_s_shaped"] == true);
}

TEST_CASE("critical brackets the known C=1 value") {
  int code = -1;
  auto doc = run_to_json({"critical", "--b", "2", "--C", "1", "--bracket", "2,8",
                          "--bracket-tol", "1e-4"},
                         &code);
  CHECK(code == cli::kExitOk);
  double lo = doc["result"]["lambda_lo"].get<double>();
  double hi = doc["result"]["lambda_hi"].get<double>();
  CHECK(lo <= 4.0);
  CHECK(hi >= 4.0 - 1e-4);
  CHECK(hi - lo <= 2e-4);
}

TEST_CASE("undetermined outcomes exit with code two") {
  int code = -1;
  auto doc = run_to_json({"order", "--b", "2", "--C", "1", "--lambda-cr", "2.0"},
                         &code);
  CHECK(code == cli::kExitUndetermined);
  CHECK(doc["result"]["order"] == "undetermined");
  CHECK(doc["diagnostics"]["exit_code"] == 2);
}

TEST_CASE("csv output carries the schema header") {
  int code = -1;
  auto config = cli::parse_and_validate({"scan", "--b", "2", "--C", "2", "--grid",
                                         "7.0:7.5:6", "--format", "csv"});
  std::ostringstream out, err;
  code = cli::run(config, out, err);
  CHECK(code == cli::kExitOk);
  std::string text = out.str();
  CHECK(text.rfind("# schema=hardcore-tree/v1\n", 0) == 0);
  CHECK(text.find("lambda,delta,coexists,m,M,iterations") != std::string::npos);
  // header comment, column row, six data rows
  int lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 8);
}

TEST_CASE("seeded sampling runs are byte-identical") {
  std::vector<std::string> args = {"sample", "--b", "2", "--C", "2", "--lambda",
                                   "1", "--depth", "2", "--sweeps", "400",
                                   "--burn-in", "100", "--seed", "9"};
  auto a = run_to_string(args);
  auto b = run_to_string(args);
  CHECK(a == b);
  CHECK(!a.empty());

  std::vector<std::string> other = args;
  other.back() = "10";
  CHECK(run_to_string(other) != a);
}

TEST_CASE("output lands in the requested file") {
  TempFile sink("");
  auto config = cli::parse_and_validate({"exact", "--b", "2", "--C", "1",
                                         "--lambda", "1", "--depth", "1", "--out",
                                         sink.path.string()});
  std::ostringstream out, err;
  cli::run(config, out, err);
  CHECK(out.str().empty());
  std::ifstream f(sink.path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(json::parse(buf.str())["schema_version"] == "hardcore-tree/v1");
}

TEST_CASE("window guard surfaces as a runtime error, not a crash") {
  auto config = cli::parse_and_validate({"window", "--b", "100", "--C", "3"});
  std::ostringstream out, err;
  CHECK_THROWS_WITH_AS(cli::run(config, out, err), "odd-C window needs b >= 1000",
                       std::invalid_argument);
}

TEST_CASE("main maps outcomes to process exit codes") {
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    static std::string name = "hardcore-tree";
    argv.push_back(name.data());
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"--help"}) == cli::kExitOk);
  CHECK(call({"recurse", "--b", "2", "--C", "1", "--lambda", "-1"}) ==
        cli::kExitError);
  CHECK(call({"window", "--b", "100", "--C", "3"}) == cli::kExitError);
}
