#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bergman/cli.hpp"
#include "bergman/serialize.hpp"

using namespace bergman;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bergspec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "bergspec_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
  CHECK_THROWS(format_double(std::numeric_limits<double>::quiet_NaN()));
  CHECK(format_complex_csv({1.0, -2.0}) == "1-2i");
}

TEST_CASE("json writer escapes and orders keys") {
  JsonWriter w;
  w.begin_object().key("b").value("x\"y\n").key("a").begin_array().value(1).value(cplx{0.5, -1}).end_array();
  w.end_object();
  const auto j = json::parse(w.str());
  CHECK(j["b"] == "x\"y\n");
  CHECK(j["a"][1][1] == -1.0);
  CHECK(w.str().find("\"b\"") < w.str().find("\"a\""));
}

TEST_CASE("matrix subcommand") {
  const auto r = run_cli({"matrix", "--symbol", "z", "--n", "3"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["n"] == 3);
  CHECK(j["kind"] == "1d");
  const auto& e = j["entries"];
  REQUIRE(e.size() == 9);
  CHECK(e[1 * 3 + 0][0].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(e[2 * 3 + 1][0].get<double>() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(e[0][0].get<double>() == 0.0);
}

TEST_CASE("two-variable matrix uses n2") {
  const auto r = run_cli({"matrix", "-s", "z*w", "--n2", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["kind"] == "2d");
  CHECK(j["entries"].size() == 16);
}

TEST_CASE("ess1d subcommand") {
  const auto r = run_cli({"ess1d", "--symbol", "z", "--m-theta", "8"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["points"].size() == 8);
  for (const auto& p : j["points"]) CHECK(std::hypot(p[0].get<double>(), p[1].get<double>()) == doctest::Approx(1.0));
}

TEST_CASE("artifact and sidecar files") {
  const auto dir = scratch_dir("sidecar");
  const auto path = dir / "spec.json";
  const auto r = run_cli({"spectrum", "-s", "z*conj(z)", "--n", "4", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto body = json::parse(slurp(path));
  CHECK(body["points"].size() == 4);
  const auto meta = json::parse(slurp(dir / "spec.meta.json"));
  CHECK(meta["subcommand"] == "spectrum");
  CHECK(meta["config"]["n"] == 4);
  CHECK(meta["result"]["assembly"]["mode"] == "exact-monomial");
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch_dir("env");
  ::setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
  const auto r = run_cli({"pseudo", "-s", "z", "--n", "10", "--n-re", "11", "--n-im", "11", "--format", "csv"});
  ::unsetenv(cli::kOutDirEnv);
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir / "pseudo.csv"));
  CHECK(std::filesystem::exists(dir / "pseudo.meta.json"));
  std::istringstream csv(slurp(dir / "pseudo.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("identical runs are byte-identical") {
  const std::vector<std::string> args = {"ess2d", "-s", "z*w", "--n", "30", "--n-re", "41", "--n-im", "41",
                                         "--m-theta", "8", "--m-boundary", "64", "--no-adapt"};
  const auto a = run_cli(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const auto b = run_cli(threaded);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["slices_theta1"].size() == 8);
  CHECK(j.contains("union"));
  CHECK(j.contains("params"));
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"matrix"}).code == 1);
  CHECK(run_cli({"matrix", "-s", "z", "--n", "1000"}).code == 1);
  CHECK(run_cli({"matrix", "-s", "z", "--format", "xml"}).code == 1);
  CHECK(run_cli({"ess1d", "-s", "z+w"}).code == 1);
  CHECK(run_cli({"verify", "-s", "z"}).code == 1);
  const auto bad = run_cli({"matrix", "-s", "z + * w"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("offset 4") != std::string::npos);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("refused winding exits with 3") {
  CHECK(run_cli({"verify", "-s", "z", "--winding", "--probe", "1,0"}).code == 3);
  const auto ok = run_cli({"verify", "-s", "z^3", "--winding", "--probe", "0", "--probe", "2,0.5"});
  REQUIRE(ok.code == 0);
  const auto j = json::parse(ok.out);
  CHECK(j["probes"][0]["winding"] == 3);
  CHECK(j["probes"][1]["winding"] == 0);
}

TEST_CASE("transcendental symbols trigger a quadrature warning") {
  const auto r = run_cli({"matrix", "-s", "abs(z)", "--n", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}
