#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const fs::path out = dir / ("trigame_out_" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("trigame_err_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string command = std::string(TRIGAME_CLI_PATH) + " " + args +
                              " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(raw);
  result.out = slurp(out);
  result.err = slurp(err);
  fs::remove(out);
  fs::remove(err);
  return result;
}

std::string scenario(const char* name) {
  return (fs::path(TRIGAME_SCENARIO_DIR) / name).string();
}

fs::path write_temp_scenario(const std::string& text) {
  static int counter = 0;
  const fs::path path = fs::temp_directory_path() /
                        ("trigame_scn_" + std::to_string(counter++) + ".scn");
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("no arguments prints help and exits 1") {
  const CliResult r = run_cli("");
  CHECK(r.exit_code == 1);
  CHECK((r.err + r.out).find("simulate") != std::string::npos);
  CHECK((r.err + r.out).find("classify") != std::string::npos);
}

TEST_CASE("help and version flags") {
  CHECK(run_cli("--help").exit_code == 0);
  const CliResult v = run_cli("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("trigame") != std::string::npos);
}

TEST_CASE("unknown subcommand and missing options exit 1") {
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("simulate").exit_code == 1);
  CHECK(run_cli("sweep --scenario " + scenario("condition4.scn")).exit_code == 1);
  CHECK(run_cli("simulate --scenario /nonexistent.scn").exit_code == 1);
}

TEST_CASE("classify emits the stable-corner verdicts") {
  const CliResult json =
      run_cli("classify --scenario " + scenario("condition1.scn") + " --json");
  REQUIRE(json.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(json.out);
  CHECK(j["corners"][3]["corner"] == 4);
  CHECK(j["corners"][3]["verdict"] == "ESS");
  CHECK(j["ess"] == nlohmann::json::array({4}));

  const CliResult text =
      run_cli("classify --scenario " + scenario("condition3.scn"));
  REQUIRE(text.exit_code == 0);
  CHECK(text.out.find("corner 8") != std::string::npos);
  CHECK(text.out.find("ESS corners: 8") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory CSV") {
  const fs::path out_csv =
      fs::temp_directory_path() / "trigame_cli_condition3.csv";
  const CliResult r = run_cli("simulate --scenario " +
                              scenario("condition3.scn") + " --out " +
                              out_csv.string());
  REQUIRE(r.exit_code == 0);
  const auto rows = trigame::testing::parse_csv(slurp(out_csv));
  REQUIRE(!rows.empty());
  const auto& last = rows.back();
  CHECK(std::abs(last[1] - 1.0) < 1e-3);
  CHECK(std::abs(last[2] - 1.0) < 1e-3);
  CHECK(std::abs(last[3] - 1.0) < 1e-3);
  CHECK(r.err.find("corner 8") != std::string::npos);
  fs::remove(out_csv);

  const CliResult to_stdout =
      run_cli("simulate --scenario " + scenario("condition1.scn"));
  REQUIRE(to_stdout.exit_code == 0);
  CHECK(to_stdout.out.substr(0, 8) == "t,x,y,z\n");
}

TEST_CASE("compare prints one row per delay") {
  const CliResult r =
      run_cli("compare --scenario " + scenario("condition1_delays.scn"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("0.01") != std::string::npos);
  CHECK(r.out.find("0.05") != std::string::npos);
  CHECK(r.out.find("0.07") != std::string::npos);
  CHECK(r.out.find("common limit corner: 4") != std::string::npos);
}

TEST_CASE("sweep writes the grid and its sidecar") {
  const fs::path scn = write_temp_scenario(
      "label = cli sweep\n"
      "experiment = sweep\n"
      "tau = 0.01\n"
      "i_j = 30\nc_lc = 10\nt_rj = 10\nc_hj = 5\nc_dj = 10\n"
      "c_mj = 10\nc_sj = 10\nc_sc = 15\nc_mc = 10\nc_ii = 20\n"
      "sweep_a = c_dj:5:25:4\n"
      "sweep_b = c_sj:5:25:4\n"
      "observable = final_x\n");
  const fs::path out_csv = fs::temp_directory_path() / "trigame_cli_grid.csv";
  const CliResult r = run_cli("sweep --scenario " + scn.string() + " --out " +
                              out_csv.string());
  REQUIRE(r.exit_code == 0);
  const auto rows = trigame::testing::parse_csv(slurp(out_csv));
  CHECK(rows.size() == 16);
  const fs::path sidecar = out_csv.parent_path() / "trigame_cli_grid.json";
  REQUIRE(fs::exists(sidecar));
  const nlohmann::json meta = nlohmann::json::parse(slurp(sidecar));
  CHECK(meta["axis_a"]["count"] == 4);
  fs::remove(scn);
  fs::remove(out_csv);
  fs::remove(sidecar);
}

TEST_CASE("equilibria lists all corners and the interior note") {
  const CliResult r =
      run_cli("equilibria --scenario " + scenario("condition2.scn"));
  REQUIRE(r.exit_code == 0);
  for (int corner = 1; corner <= 8; ++corner) {
    CHECK(r.out.find("corner " + std::to_string(corner)) != std::string::npos);
  }
  CHECK(r.out.find("interior") != std::string::npos);
}

TEST_CASE("experiment-kind mismatches exit 1") {
  CHECK(run_cli("simulate --scenario " + scenario("condition4.scn")).exit_code ==
        1);
  CHECK(run_cli("compare --scenario " + scenario("condition1.scn")).exit_code ==
        1);
}

TEST_CASE("validation failures exit 1 with a diagnostic") {
  const fs::path bad = write_temp_scenario("tau = -1\n");
  const CliResult r = run_cli("classify --scenario " + bad.string());
  CHECK(r.exit_code == 1);
  CHECK(!r.err.empty());
  fs::remove(bad);
}

TEST_CASE("numerical failures exit 2") {
  std::string text =
      "label = runaway\n"
      "experiment = run\n"
      "tau = 0.2\n"
      "i_j = 30\nc_lc = 10\nt_rj = 10\nc_hj = 5\nc_dj = 10\n"
      "c_mj = 10\nc_sj = 10\nc_sc = 15\nc_mc = 10\nc_ii = 20\n";
  const fs::path scn = write_temp_scenario(text);
  const CliResult r = run_cli("simulate --scenario " + scn.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("diverged") != std::string::npos);
  fs::remove(scn);
}
