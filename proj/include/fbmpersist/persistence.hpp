#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbmpersist/covmodel.hpp"
#include "fbmpersist/curve.hpp"
#include "fbmpersist/geometry.hpp"
#include "fbmpersist/stats.hpp"

namespace fbmpersist {

inline constexpr std::size_t kDefaultPointCap = 20000;

struct RunOptions {
  std::size_t point_cap = kDefaultPointCap;
  unsigned workers = 1;
};

/// Points of the (1/refinement)-net of T * domain; throws CapExceededError
/// when the net is larger than the cap.
std::vector<Point> persistence_net(const Domain& domain, double T, int refinement,
                                   std::size_t point_cap);

/// Barrier event used throughout: max < barrier for a positive barrier, and
/// max <= 0 when the barrier is 0.
bool below_barrier(double max_value, double barrier);

struct PersistenceEstimate {
  CovarianceModel model = CovarianceModel::fbm(0.5);
  Domain domain = Domain::make(DomainKind::TangentCube, 1, 1.0);
  double T = 1.0;
  double barrier = 1.0;
  int refinement = 1;  // mesh spacing = 1 / refinement
  std::size_t n_points = 0;
  std::uint64_t seed = 0;
  Proportion p;
};

/// Fraction of realizations whose maximum over the net of T * domain stays
/// below the barrier.
PersistenceEstimate estimate_p(const CovarianceModel& model, const Domain& domain, double T,
                               double barrier, int refinement, std::uint64_t seed, std::size_t N,
                               const RunOptions& options = {});

/// Per-realization maxima over the net of T * domain (used by estimate_p,
/// estimate_EM and the verification suites).
std::vector<double> sample_maxima(const CovarianceModel& model, const std::vector<Point>& points,
                                  std::uint64_t seed, std::size_t N, unsigned workers);

struct MaxEstimate {
  double T = 1.0;
  int refinement = 1;
  std::size_t n_points = 0;
  MeanEstimate mean;
};

/// Mean of the maximum over the net of T * domain.
MaxEstimate estimate_EM(const CovarianceModel& model, const Domain& domain, double T, int refinement,
                        std::uint64_t seed, std::size_t N, const RunOptions& options = {});

struct ExponentFit {
  std::vector<double> T;
  std::vector<double> p;
  std::vector<double> std_error;
  std::vector<double> weights;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Weighted least squares of log p on log T with delta-method weights
/// (p / stderr)^2. When some input has zero standard error all weights are
/// set to 1.
ExponentFit fit_exponent(std::span<const double> T, std::span<const double> p,
                         std::span<const double> std_error);
ExponentFit fit_exponent(std::span<const PersistenceEstimate> estimates);

/// Probability that curve entry i is a running maximum of the field along
/// the curve: P(xi(t_i) >= max_{k < i} xi(t_k)), with xi(t_0) = 0.
Proportion record_prob(const CovarianceModel& model, const EnumerationCurve& curve, std::size_t i,
                       std::uint64_t seed, std::size_t N, const RunOptions& options = {});

}  // namespace fbmpersist
