#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "banditlab/core.hpp"

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(BANDITLAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buffer[4096];
  while (std::size_t n = std::fread(buffer, 1, sizeof(buffer), pipe)) {
    output.append(buffer, n);
  }
  const int status = pclose(pipe);
  return CommandResult{WEXITSTATUS(status), output};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("banditlab_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("profiles command lists all eight built-ins", "[cli]") {
  const CommandResult result = run_cli("profiles");
  CHECK(result.exit_code == 0);
  for (const auto& p : banditlab::builtin_profiles()) {
    CHECK(result.output.find(p.name) != std::string::npos);
  }
  CHECK(result.output.find("100") != std::string::npos);  // PD beta
}

TEST_CASE("profiles --format csv round-trips the table", "[cli]") {
  const CommandResult result = run_cli("profiles --format csv");
  REQUIRE(result.exit_code == 0);

  std::istringstream lines(result.output);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "name,tau,alpha,phi,beta,jitter_tau,jitter_alpha,jitter_phi,jitter_beta");

  std::size_t row = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    REQUIRE(fields.size() == 9);
    const banditlab::BiasProfile expected = banditlab::named_profile(fields[0]);
    CHECK(std::stod(fields[1]) == expected.tau);
    CHECK(std::stod(fields[2]) == expected.alpha);
    CHECK(std::stod(fields[3]) == expected.phi);
    CHECK(std::stod(fields[4]) == expected.beta);
    CHECK(std::stod(fields[8]) == expected.jitter_beta);
    ++row;
  }
  CHECK(row == banditlab::builtin_profiles().size());
}

TEST_CASE("run happy path on a bernoulli environment", "[cli]") {
  const CommandResult result =
      run_cli("run --profile TS --env bernoulli:0.9,0.1 --mode normal --horizon 2000 --seed 42");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("error rate") != std::string::npos);
  CHECK(result.output.find("bernoulli:0.9,0.1") != std::string::npos);
}

TEST_CASE("validation failures exit 2 with guidance", "[cli]") {
  const CommandResult unknown_profile =
      run_cli("run --profile XX --env bernoulli:0.9,0.1");
  CHECK(unknown_profile.exit_code == 2);
  CHECK(unknown_profile.output.find("TS") != std::string::npos);  // lists valid names

  const CommandResult bad_mode =
      run_cli("run --profile TS --env bernoulli:0.9,0.1 --mode sideways");
  CHECK(bad_mode.exit_code == 2);

  const CommandResult bad_flag = run_cli("run --profile TS --env bernoulli:0.9,0.1 --horizon x");
  CHECK(bad_flag.exit_code == 2);

  const CommandResult no_command = run_cli("frobnicate");
  CHECK(no_command.exit_code == 2);
}

TEST_CASE("missing dataset files exit 3 with fetch instructions", "[cli]") {
  TempDir dir("missing_data");
  const CommandResult result =
      run_cli("run --profile TS --env covertype --data-dir " + dir.path.string());
  CHECK(result.exit_code == 3);
  CHECK(result.output.find("archive.ics.uci.edu") != std::string::npos);
  CHECK(result.output.find("covtype.data") != std::string::npos);
}

TEST_CASE("datasets command lists the registry", "[cli]") {
  TempDir dir("datasets");
  const CommandResult result = run_cli("datasets --data-dir " + dir.path.string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("covertype") != std::string::npos);
  CHECK(result.output.find("poker_hand") != std::string::npos);
  CHECK(result.output.find("absent") != std::string::npos);
}

TEST_CASE("run writes a full-state trace on request", "[cli]") {
  TempDir dir("trace");
  const fs::path trace_path = dir.path / "trace.csv";
  const CommandResult result =
      run_cli("run --profile M --env bernoulli:0.6,0.4 --horizon 50 --seed 5 --trace --out " +
              trace_path.string());
  CHECK(result.exit_code == 0);
  REQUIRE(fs::exists(trace_path));
  const std::string trace = slurp(trace_path);
  CHECK(trace.find("step,arm,reward,regret,S_0,F_0,S_1,F_1") == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 51);  // header + 50 steps
}

TEST_CASE("suite produces per-mode tables plus the average file", "[cli]") {
  TempDir data("suite_data");
  // stand the fixture in for a dataset directory
  fs::copy_file(fs::path(BANDITLAB_TEST_DATA_DIR) / "fixture_3class.csv",
                data.path / "CNAE-9.data");

  TempDir out1("suite_out1");
  TempDir out2("suite_out2");
  const std::string base =
      "suite --profiles TS,M --envs cnae9,bernoulli:0.8,0.2 --modes normal,positive "
      "--horizon 400 --runs 3 --seed 9 --format md --raw --jobs 2 --data-dir " +
      data.path.string();

  const CommandResult first = run_cli(base + " --out " + out1.path.string());
  REQUIRE(first.exit_code == 0);
  // the CNAE-9 stand-in has 3 classes, not the declared 9: warn but run
  CHECK(first.output.find("warning") != std::string::npos);

  for (const char* name : {"results_normal.csv", "results_positive.csv", "results_average.csv",
                           "results_normal.md", "runs_raw.csv"}) {
    INFO(name);
    CHECK(fs::exists(out1.path / name));
  }
  CHECK(!fs::exists(out1.path / "results_negative.csv"));

  const std::string table = slurp(out1.path / "results_normal.csv");
  CHECK(table.find("dataset,mode,profile,mean_error_pct,std_error_pct,runs,horizon,base_seed") ==
        0);
  CHECK(table.find("cnae9,normal,TS,") != std::string::npos);

  const std::string markdown = slurp(out1.path / "results_normal.md");
  CHECK(markdown.find("**") != std::string::npos);  // per-row best is bolded

  // byte-identical rerun
  const CommandResult second = run_cli(base + " --out " + out2.path.string());
  REQUIRE(second.exit_code == 0);
  for (const char* name : {"results_normal.csv", "results_positive.csv", "results_average.csv",
                           "runs_raw.csv"}) {
    INFO(name);
    CHECK(slurp(out1.path / name) == slurp(out2.path / name));
  }
}

TEST_CASE("config files feed the suite and flags override them", "[cli]") {
  TempDir dir("config");
  const fs::path cfg_path = dir.path / "suite.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "profiles = TS,M\n"
           "envs = bernoulli:0.7,0.3\n"
           "modes = normal\n"
           "horizon = 100\n"
           "runs = 2\n"
           "seed = 4\n"
           "out = " << (dir.path / "out_a").string() << "\n";
  }

  const CommandResult from_config = run_cli("suite --config " + cfg_path.string());
  REQUIRE(from_config.exit_code == 0);
  const std::string table_a = slurp(dir.path / "out_a" / "results_normal.csv");
  CHECK(table_a.find(",100,4") != std::string::npos);  // horizon, seed columns

  const CommandResult overridden =
      run_cli("suite --config " + cfg_path.string() + " --horizon 200 --out " +
              (dir.path / "out_b").string());
  REQUIRE(overridden.exit_code == 0);
  const std::string table_b = slurp(dir.path / "out_b" / "results_normal.csv");
  CHECK(table_b.find(",200,4") != std::string::npos);
  CHECK(table_b.find(",100,4") == std::string::npos);
}

TEST_CASE("custom profiles defined in config are runnable", "[cli]") {
  TempDir dir("custom_profile");
  const fs::path cfg_path = dir.path / "custom.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "profile.steady.tau = 0.9\n"
           "profile.steady.alpha = 2\n";
  }
  const CommandResult result = run_cli("run --config " + cfg_path.string() +
                                       " --profile steady --env bernoulli:0.9,0.1 --horizon 500");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("steady") != std::string::npos);
  CHECK(result.output.find("tau=0.9") != std::string::npos);
}
