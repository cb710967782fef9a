#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kCli = OBMIMO_CLI_PATH;

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_command(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cmd.log";
  const std::string cmd =
      std::string(kCli) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("obmimo_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_config() {
  return R"([campaign]
m = 8
k = 2
setups = 6
uses = 4
seed = 11
workers = 2
detectors = ["mrc", "bmmse", "admm-soft"]

[admm]
iterations = 15
)";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run writes a well-formed CSV and manifest") {
  const fs::path dir = make_temp_dir("run");
  std::ofstream(dir / "cfg.toml") << tiny_config();
  const auto res = run_command(
      "run --config " + (dir / "cfg.toml").string() + " --out-dir " + dir.string(),
      dir);
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(dir / "results.csv"));
  REQUIRE(fs::exists(dir / "manifest.json"));

  std::ifstream csv(dir / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "detector,user_index,ber,bit_errors,total_bits,avg_snr_db");

  // 3 detectors x K=2 rows, sorted by (detector, user_index).
  std::vector<std::string> detectors;
  std::vector<int> users;
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto comma1 = line.find(',');
    const auto comma2 = line.find(',', comma1 + 1);
    detectors.push_back(line.substr(0, comma1));
    users.push_back(std::stoi(line.substr(comma1 + 1, comma2 - comma1 - 1)));
  }
  CHECK(rows == 6);
  for (int i = 1; i < rows; ++i)
    CHECK(std::make_pair(detectors[i - 1], users[i - 1]) <
          std::make_pair(detectors[i], users[i]));

  const std::string manifest = read_file(dir / "manifest.json");
  CHECK(manifest.find("\"master_seed\": 11") != std::string::npos);
  CHECK(manifest.find("results.csv") != std::string::npos);
}

TEST_CASE("missing config exits with code 2 and names the path") {
  const fs::path dir = make_temp_dir("missing");
  const auto res = run_command("run --config /no/such/file.toml", dir);
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("/no/such/file.toml") != std::string::npos);
}

TEST_CASE("invalid config key exits with code 2 and names the field") {
  const fs::path dir = make_temp_dir("badkey");
  std::ofstream(dir / "bad.toml") << "[campaign]\nbogus = 1\n";
  const auto res =
      run_command("run --config " + (dir / "bad.toml").string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("campaign.bogus") != std::string::npos);
}

TEST_CASE("identical seeds give byte-identical CSVs") {
  const fs::path dir = make_temp_dir("repro");
  std::ofstream(dir / "cfg.toml") << tiny_config();
  const fs::path out1 = dir / "a", out2 = dir / "b";
  const std::string base = "run --config " + (dir / "cfg.toml").string() +
                           " --seed 42 --out-dir ";
  CHECK(run_command(base + out1.string(), dir).exit_code == 0);
  CHECK(run_command(base + out2.string() + " --workers 1", dir).exit_code == 0);
  CHECK(read_file(out1 / "results.csv") == read_file(out2 / "results.csv"));
}

TEST_CASE("flag overrides reach the campaign") {
  const fs::path dir = make_temp_dir("flags");
  std::ofstream(dir / "cfg.toml") << tiny_config();
  const auto res = run_command("run --config " + (dir / "cfg.toml").string() +
                                   " --setups 3 --uses 2 --detectors mrc --out-dir " +
                                   dir.string(),
                               dir);
  CHECK(res.exit_code == 0);
  const std::string csv = read_file(dir / "results.csv");
  CHECK(csv.find("MRC") != std::string::npos);
  CHECK(csv.find("BMMSE") == std::string::npos);
  CHECK(csv.find(",32,") != std::string::npos);  // 2 * 3 * 2 bits per user
}

TEST_CASE("validate passes on a healthy build") {
  const fs::path dir = make_temp_dir("validate");
  const auto res = run_command("validate", dir);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("[PASS]") != std::string::npos);
  CHECK(res.output.find("[FAIL]") == std::string::npos);
}

TEST_CASE("validate detects a corrupted arcsine clamp") {
  const fs::path dir = make_temp_dir("corrupt");
  const auto res = run_command("validate --test-corrupt-arcsine-clamp", dir);
  CHECK(res.exit_code != 0);
  CHECK(res.output.find("[FAIL] arcsine C_rr diagonal") != std::string::npos);
}
