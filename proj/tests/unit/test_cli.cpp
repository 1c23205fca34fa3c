#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fbmpersist/cli.hpp"

namespace fs = std::filesystem;
using namespace fbmpersist::cli;

namespace {

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fbmpersist");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return fbmpersist::cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fbmpersist_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("persist example") {
  const auto out = scratch("persist");
  CHECK(invoke({"persist", "--model", "fbm", "--H", "0.5", "--domain", "cube", "--d", "1", "--T", "16", "--N",
                "20000", "--seed", "7", "--out", out.string()}) == kExitOk);
  CHECK(fs::exists(out / "manifest.json"));
  const auto csv = slurp(out / "persist.csv");
  const auto line = csv.substr(csv.find('\n') + 1);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["version"] == FBMPERSIST_VERSION);
  CHECK(manifest["config"]["seed"] == 7);
  // p_hat column
  std::vector<std::string> cols;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',' || line[i] == '\n') {
      cols.push_back(line.substr(start, i - start));
      start = i + 1;
      if (i < line.size() && line[i] == '\n') break;
    }
  const double p = std::stod(cols[11]);
  CHECK(p >= 0.197);
  CHECK(p <= 0.26);
}

TEST_CASE("outputs are reproducible and independent of workers") {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  CHECK(invoke({"persist", "--T", "4,8", "--N", "3000", "--seed", "3", "--out", a.string()}) == 0);
  CHECK(invoke({"persist", "--T", "4,8", "--N", "3000", "--seed", "3", "--workers", "4", "--out", b.string()}) == 0);
  CHECK(slurp(a / "persist.csv") == slurp(b / "persist.csv"));
}

TEST_CASE("curve validate example") {
  const auto out = scratch("curve");
  CHECK(invoke({"curve", "validate", "--d", "2", "--nmax", "16", "--out", out.string()}) == kExitOk);
  const auto rep = nlohmann::json::parse(slurp(out / "curve_report.json"));
  CHECK(rep["passed"] == true);
}

TEST_CASE("exit codes") {
  const auto out = scratch("codes");
  CHECK(invoke({"exponent", "--T", "8,16", "--out", out.string()}) == kExitConfig);
  CHECK(invoke({"persist", "--H", "1.5", "--out", out.string()}) == kExitConfig);
  CHECK(invoke({"persist", "--mesh", "0.3", "--out", out.string()}) == kExitConfig);
  CHECK(invoke({"persist", "--bogus", "1"}) == kExitConfig);
  CHECK(invoke({"persist", "--d", "2", "--T", "200", "--N", "100", "--out", out.string()}) == kExitCap);
  CHECK(invoke({}) == kExitConfig);
}

TEST_CASE("config file with flag override") {
  const auto out = scratch("config");
  fs::create_directories(out);
  const auto cfg = out / "run.json";
  std::ofstream(cfg) << R"({"T": [4, 8, 16], "N": 500, "seed": 11, "mesh": 1.0, "out": ")" << out.string()
                     << R"("})";
  CHECK(invoke({"exponent", "--config", cfg.string(), "--seed", "12"}) == kExitOk);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 12);
  CHECK(manifest["config"]["N"] == 500);
  CHECK(manifest["config"]["T"].size() == 3);
  CHECK(fs::exists(out / "plot_data.csv"));
  CHECK(fs::exists(out / "exponent.json"));

  std::ofstream(cfg) << R"({"Tee": 4})";
  CHECK(invoke({"persist", "--config", cfg.string()}) == kExitConfig);
}

TEST_CASE("output directory from the environment") {
  const auto out = scratch("env");
  setenv("FBMPERSIST_OUT", out.string().c_str(), 1);
  CHECK(invoke({"maxscale", "--T", "4,8", "--N", "200"}) == kExitOk);
  unsetenv("FBMPERSIST_OUT");
  CHECK(fs::exists(out / "maxscale.csv"));
}

TEST_CASE("config json round trip") {
  RunConfig c;
  c.command = "persist";
  c.T = {2, 3};
  c.H = 0.3;
  const auto back = config_from_json(config_to_json(c));
  CHECK(back.T == c.T);
  CHECK(back.H == 0.3);
  CHECK(config_from_json(nlohmann::json{{"T", 5.0}}).T == std::vector<double>{5.0});
}

TEST_CASE("sample and verify commands write reports") {
  const auto out = scratch("verify");
  CHECK(invoke({"sample", "--T", "2", "--N", "5", "--out", out.string()}) == kExitOk);
  CHECK(fs::exists(out / "samples.csv"));
  CHECK(invoke({"verify", "lemma2", "--T", "8", "--N", "500", "--out", out.string()}) == kExitOk);
  CHECK(fs::exists(out / "lemma2_report.json"));
  CHECK(fs::exists(out / "lemma2_summary.txt"));
  CHECK(invoke({"curve", "build", "--d", "2", "--nmax", "3", "--out", out.string()}) == kExitOk);
  CHECK(fs::exists(out / "curve.csv"));
}
