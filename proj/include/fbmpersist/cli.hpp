#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fbmpersist::cli {

/// Every field has a flag of the same name (--H, --T, ...) and a key of the
/// same name in the JSON config file. Flags override the file.
struct RunConfig {
  std::string command;  // e.g. "persist", "curve validate", "verify chain"

  std::string model = "fbm";  // fbm | perturbed
  double H = 0.5;
  double sigma = 1.0;
  double ell = 1.0;

  std::string domain = "cube";  // cube | ball
  int d = 1;
  double size = 0.5;

  std::vector<double> T{16.0};
  double barrier = 1.0;
  double mesh = 0.25;  // net spacing delta; 1/delta must be an integer
  std::uint64_t seed = 1;
  std::size_t N = 10000;
  unsigned workers = 1;
  std::size_t cap = 20000;

  std::int64_t nmax = 16;
  double eps = 1.0;
  int L = 3;

  double rho = 1.0;
  double a = 2.0;
  double c = 0.0;
  double b = 1.0;
  double kappa = 2.0;
  std::vector<double> r{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::int64_t n = 6;
  double q = 0.5;

  std::string out;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCap = 4;

/// Runs one command; results and manifest.json go to the output directory.
int run(const RunConfig& config);

int main(int argc, char** argv);

}  // namespace fbmpersist::cli
