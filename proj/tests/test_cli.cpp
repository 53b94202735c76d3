#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

const char* binary_path() {
  const char* path = std::getenv("ARSCERT_BIN");
  REQUIRE_MESSAGE(path != nullptr, "ARSCERT_BIN must point at the CLI binary");
  return path;
}

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(binary_path()) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

constexpr char kCertifyArgs[] =
    "certify --sigma 0.5 --d 8 --k 2 --samples 3 --n0 10 --n 20 "
    "--alpha 0.05 --seed 4";

}  // namespace

TEST_CASE("certify writes byte-identical output across runs and job counts") {
  const CliResult first =
      run_cli(std::string(kCertifyArgs) + " --out cli_tmp_a.csv");
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("certified 3 instances") != std::string::npos);

  const CliResult second =
      run_cli(std::string(kCertifyArgs) + " --out cli_tmp_b.csv");
  CHECK(second.exit_code == 0);
  const CliResult threaded =
      run_cli(std::string(kCertifyArgs) + " --jobs 3 --out cli_tmp_c.csv");
  CHECK(threaded.exit_code == 0);

  const std::string a = read_file("cli_tmp_a.csv");
  CHECK(a.rfind("# sigma = 0.5\n", 0) == 0);
  CHECK(a.find("idx,label,predict,radius,correct,time_ms\n") !=
        std::string::npos);
  CHECK(a == read_file("cli_tmp_b.csv"));
  CHECK(a == read_file("cli_tmp_c.csv"));

  std::remove("cli_tmp_a.csv");
  std::remove("cli_tmp_b.csv");
  std::remove("cli_tmp_c.csv");
}

TEST_CASE("certify streams the csv to stdout by default") {
  const CliResult result = run_cli(kCertifyArgs);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("idx,label,predict,radius,correct,time_ms") !=
        std::string::npos);
  CHECK(result.output.find("certified 3 instances") != std::string::npos);
}

TEST_CASE("configuration failures use exit code 2") {
  const CliResult bad_alpha =
      run_cli("certify --sigma 0.5 --d 8 --k 2 --samples 2 --alpha 1.5");
  CHECK(bad_alpha.exit_code == 2);
  CHECK(bad_alpha.output.find("config error: alpha") != std::string::npos);

  const CliResult missing_config =
      run_cli("certify --config cli_tmp_missing.cfg");
  CHECK(missing_config.exit_code == 2);
  CHECK(missing_config.output.find("config error: config") !=
        std::string::npos);
}

TEST_CASE("curve evaluates a results csv") {
  const CliResult results =
      run_cli(std::string(kCertifyArgs) + " --out cli_tmp_results.csv");
  REQUIRE(results.exit_code == 0);

  const CliResult curve = run_cli(
      "curve --in cli_tmp_results.csv --out cli_tmp_curve.csv "
      "--grid 0,0.01,0.02");
  CHECK(curve.exit_code == 0);
  const std::string text = read_file("cli_tmp_curve.csv");
  CHECK(text.find("# rows = 3\n") != std::string::npos);
  CHECK(text.find("radius,accuracy\n") != std::string::npos);
  std::remove("cli_tmp_curve.csv");

  const CliResult unsorted =
      run_cli("curve --in cli_tmp_results.csv --grid 0.2,0.1");
  CHECK(unsorted.exit_code == 2);
  CHECK(unsorted.output.find("config error: grid") != std::string::npos);

  const CliResult missing = run_cli("curve --in cli_tmp_nope.csv");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("error: cannot open results") !=
        std::string::npos);

  std::remove("cli_tmp_results.csv");
}

TEST_CASE("dataset exports and feeds back into certify") {
  const CliResult to_stdout =
      run_cli("dataset --d 8 --k 2 --samples 2 --seed 6");
  CHECK(to_stdout.exit_code == 0);
  CHECK(to_stdout.output.find("d,k,offset,label,x\n") != std::string::npos);

  const CliResult exported = run_cli(
      "dataset --d 8 --k 2 --samples 2 --seed 6 --out cli_tmp_data.csv");
  CHECK(exported.exit_code == 0);

  const CliResult certified = run_cli(
      "certify --dataset cli_tmp_data.csv --d 8 --k 2 --n0 10 --n 20 "
      "--seed 5 --out cli_tmp_dres.csv");
  CHECK(certified.exit_code == 0);
  CHECK(certified.output.find("certified 2 instances") != std::string::npos);

  std::remove("cli_tmp_data.csv");
  std::remove("cli_tmp_dres.csv");
}

TEST_CASE("selfcheck gates the release and the falsification hook bites") {
  const CliResult gate = run_cli("selfcheck");
  CHECK(gate.exit_code == 0);
  CHECK(gate.output.find("suite") == 0);
  CHECK(gate.output.find("FAIL") == std::string::npos);

  const CliResult inflated = run_cli("selfcheck --radius-scale 1.05");
  CHECK(inflated.exit_code == 1);
  CHECK(inflated.output.find("analytic soundness sweep") != std::string::npos);
  CHECK(inflated.output.find("FAIL") != std::string::npos);
}

TEST_CASE("a subcommand is required") {
  const CliResult bare = run_cli("");
  CHECK(bare.exit_code != 0);
}
