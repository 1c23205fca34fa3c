#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbmpersist/covmodel.hpp"
#include "fbmpersist/geometry.hpp"
#include "fbmpersist/persistence.hpp"

namespace fbmpersist {

/// One asserted inequality value <= bound + slack. Exact checks carry zero
/// slack; Monte Carlo checks carry 3 joint standard errors.
struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  std::string note;

  double margin() const { return bound + slack - value; }
};

Check make_check(std::string name, double value, double bound, double slack, std::string note = {});

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  nlohmann::json info = nlohmann::json::object();

  bool passed() const;
  const Check* find(const std::string& name) const;
  nlohmann::json to_json() const;
  void print_table(std::ostream& os) const;
};

inline constexpr double kSigmaSlack = 3.0;

/// Seed of an auxiliary batch, distinct from the main stream of `seed`.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag);

/// Interpolation inequalities between a rho-net U_T and the domain T*domain.
/// The continuum is proxied by the net of spacing rho/4, which contains U_T,
/// so both share one realization.
VerifyReport lemma2_check(const CovarianceModel& model, const Domain& domain, double T, double rho,
                          double a, double c, double b, std::uint64_t seed, std::size_t N,
                          const RunOptions& options = {});

/// Discretization gap between [T*domain] and the spacing-1/4 net.
VerifyReport corollary3_check(const CovarianceModel& model, const Domain& domain, double T, double kappa,
                              std::uint64_t seed, std::size_t N, const RunOptions& options = {});

/// corollary3_check over several scales plus the trend check on
/// gap / sqrt(ln T) (non-increasing up to 3 sigma).
VerifyReport corollary3_sweep(const CovarianceModel& model, const Domain& domain, std::span<const double> Ts,
                              double kappa, std::uint64_t seed, std::size_t N, const RunOptions& options = {});

/// Net of spacing 1/8 in the closed unit ball about the origin.
std::vector<Point> unit_ball_net(int dim, int refinement = 8);

/// Empirical tail P(M >= r) of the maximum over a net and a Gaussian-shape
/// check on its largest well-populated grid points.
VerifyReport fernique_tail_check(const CovarianceModel& model, const std::vector<Point>& net,
                                 std::uint64_t seed, std::size_t N, std::span<const double> r_grid,
                                 const RunOptions& options = {});

/// Empirical run of the lower-bound chain on the enumeration curve for
/// fbm(H) in dimension d up to level n with m = floor(q n).
VerifyReport chain_report(double hurst, int dim, std::int64_t n, double q, double eps, std::uint64_t seed,
                          std::size_t N, const RunOptions& options = {});

}  // namespace fbmpersist
