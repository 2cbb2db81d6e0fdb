#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BLMIX_CLI_PATH
#error "BLMIX_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path =
      "/tmp/blmix_cli_test_" + std::to_string(getpid()) + "_" + std::to_string(counter++);
  const std::string cmd =
      std::string(BLMIX_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_path);
  std::remove(out_path.c_str());
  return res;
}

}  // namespace

using nlohmann::json;

TEST_CASE("mix emits the documented json") {
  const auto res = run_cli("mix --n 50 --m 25 --r 25 --k 1");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["t_mix"] == 68);
  CHECK(j["non_mixing"] == false);
  CHECK(j["params"]["n"] == 50);
  CHECK(j["lambda1"].get<double>() == doctest::Approx(0.92));
  CHECK(j["t_n"].get<double>() == doctest::Approx(23.46).epsilon(0.001));
  CHECK(j["backend"] == "float");
  CHECK(j.contains("q_n"));
  CHECK(j.contains("regime"));
  CHECK(j.contains("epsilon"));
  CHECK(j.contains("lambda2"));
}

TEST_CASE("mix reports structural non-mixing") {
  const auto res = run_cli("mix --n 100 --m 50 --r 50 --k 50");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["t_mix"].is_null());
  CHECK(j["non_mixing"] == true);
  CHECK(j["regime"] == "non-mixing");
}

TEST_CASE("mix on an exactly critical instance") {
  const auto res = run_cli("mix --n 4 --m 2 --r 2 --k 1");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["regime"] == "critical");
  CHECK(j["t_n"].is_null());
  CHECK(j["q_n"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["t_mix"].is_number_integer());
}

TEST_CASE("mix rejects invalid parameters with exit code 2") {
  CHECK(run_cli("mix --n 50 --m 25 --r 25 --k 0").exit_code == 2);
  CHECK(run_cli("mix --n 50 --m 0 --r 25 --k 1").exit_code == 2);
  CHECK(run_cli("mix --n 50 --m 25 --r 25 --k 1 --epsilon 1.5").exit_code == 2);
  CHECK(run_cli("mix --n 50 --m 25 --r 25 --k 1 --epsilon 0.0.1").exit_code == 2);
  CHECK(run_cli("mix --n 50 --m 25 --r 25 --k 1 --bogus-flag 3").exit_code == 2);
}

TEST_CASE("mix exit code 3 when the cap is exhausted") {
  CHECK(run_cli("mix --n 50 --m 25 --r 25 --k 1 --cap 5").exit_code == 3);
}

TEST_CASE("mix output is byte-identical across runs and thread counts") {
  const auto a = run_cli("mix --n 50 --m 25 --r 25 --k 1 --threads 1");
  const auto b = run_cli("mix --n 50 --m 25 --r 25 --k 1 --threads 2");
  const auto c = run_cli("mix --n 50 --m 25 --r 25 --k 1 --threads 2");
  CHECK(a.out == b.out);
  CHECK(b.out == c.out);
}

TEST_CASE("rational backend matches float") {
  const auto f = run_cli("mix --n 20 --m 10 --r 10 --k 2");
  const auto r = run_cli("mix --n 20 --m 10 --r 10 --k 2 --backend rational");
  const json jf = json::parse(f.out), jr = json::parse(r.out);
  CHECK(jf["t_mix"] == jr["t_mix"]);
  CHECK(jr["backend"] == "rational");
}

TEST_CASE("extremes mode reproduces the full sup here") {
  const auto a = run_cli("mix --n 50 --m 25 --r 25 --k 1 --extremes");
  const json j = json::parse(a.out);
  CHECK(j["t_mix"] == 68);
}

TEST_CASE("sweep single cell csv") {
  const auto res = run_cli("sweep --axis k --ratios 0.02 --ns 50");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out == "ratio,n=50\n0.02,68\n");
}

TEST_CASE("sweep is deterministic across thread counts") {
  const auto a = run_cli("sweep --axis k --ratios 0.02,0.04 --ns 50,100 --threads 1");
  const auto b = run_cli("sweep --axis k --ratios 0.02,0.04 --ns 50,100 --threads 2");
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("sweep accepts n ranges and rational backend") {
  const auto res =
      run_cli("sweep --axis k --ratios 0.05 --ns 20:40:20 --backend rational");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.substr(0, 16) == "ratio,n=20,n=40\n");
}

TEST_CASE("sweep writes ERR cells and a sidecar error log") {
  const std::string out = "/tmp/blmix_sweep_" + std::to_string(getpid()) + ".csv";
  const auto res =
      run_cli("sweep --axis k --ratios 0.03 --ns 50 --out " + out);
  REQUIRE(res.exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(csv == "ratio,n=50\n0.03,ERR\n");
  const std::string log = slurp(out + ".errors.log");
  CHECK(log.find("non-integral") != std::string::npos);
  std::remove(out.c_str());
  std::remove((out + ".errors.log").c_str());
}

TEST_CASE("figure skips non-integral cells with a notice") {
  const std::string base = "/tmp/blmix_fig_" + std::to_string(getpid());
  const auto res =
      run_cli("figure --kn 0.03 --rn 0.5 --ns 50,100 --out " + base);
  REQUIRE(res.exit_code == 0);
  const std::string tsv = slurp(base + ".tsv");
  CHECK(tsv.find("100\t") != std::string::npos);
  CHECK(tsv.find("50\t") == std::string::npos);  // k = 1.5 is not integral
  const std::string svg = slurp(base + ".svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::remove((base + ".tsv").c_str());
  std::remove((base + ".svg").c_str());
}

TEST_CASE("figure preset 3 is flat and preset 1 grows") {
  const std::string base = "/tmp/blmix_fig_preset_" + std::to_string(getpid());
  REQUIRE(run_cli("figure --preset 3 --out " + base + "_3").exit_code == 0);
  std::istringstream flat(slurp(base + "_3.tsv"));
  std::string header;
  std::getline(flat, header);
  CHECK(header == "n\tt_mix");
  long n = 0, t = 0, rows = 0;
  while (flat >> n >> t) {
    CHECK(t >= 2);
    CHECK(t <= 3);
    ++rows;
  }
  CHECK(rows == 238);  // n = 52..1000 step 4

  REQUIRE(run_cli("figure --preset 1 --out " + base + "_1").exit_code == 0);
  std::istringstream grow(slurp(base + "_1.tsv"));
  std::getline(grow, header);
  long first_t = -1, last_t = -1;
  while (grow >> n >> t) {
    if (first_t < 0) first_t = t;
    last_t = t;
  }
  CHECK(first_t > 0);
  CHECK(last_t > first_t);  // log-shaped growth across the n range
  for (const char* suffix : {"_3.tsv", "_3.svg", "_1.tsv", "_1.svg"})
    std::remove((base + suffix).c_str());
}

TEST_CASE("verify llt suite exits zero with a json report") {
  const auto res = run_cli("verify --suite llt");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["pass"] == true);
  CHECK(j["suites"][0]["suite"] == "llt");
}
