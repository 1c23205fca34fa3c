#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmpersist/geometry.hpp"

namespace fbmpersist {

enum class ModelKind { Fbm, PerturbedFbm };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Isotropic Gaussian field with stationary increments, pinned at the origin,
/// defined through its variogram nu(h) = E(xi(t + h) - xi(t))^2.
///
///   Fbm:           nu(h) = h^(2H)
///   PerturbedFbm:  nu(h) = h^(2H) + sigma^2 (1 - exp(-(h/ell)^2))
///
/// The perturbation is O(h^2) at zero and bounded at infinity, so the
/// perturbed field keeps E xi^2(t) ~ |t|^(2H) without being self-similar.
class CovarianceModel {
 public:
  static CovarianceModel fbm(double hurst);
  static CovarianceModel perturbed_fbm(double hurst, double sigma, double ell);

  ModelKind kind() const { return kind_; }
  double hurst() const { return hurst_; }
  double sigma() const { return sigma_; }
  double ell() const { return ell_; }

  double variogram(double h) const;

  /// (nu(|t|) + nu(|s|) - nu(|t - s|)) / 2 with the Euclidean norm.
  double covariance(const Point& t, const Point& s) const;

  std::string describe() const;

  bool operator==(const CovarianceModel&) const = default;

 private:
  CovarianceModel(ModelKind kind, double hurst, double sigma, double ell)
      : kind_(kind), hurst_(hurst), sigma_(sigma), ell_(ell) {}

  ModelKind kind_;
  double hurst_;
  double sigma_;
  double ell_;
};

/// How gram() certifies positive semidefiniteness.
enum class PsdCheck {
  None,         // caller relies on the factorization gate
  Eigenvalues,  // smallest eigenvalue >= -kPsdTolerance * trace
};

inline constexpr double kPsdTolerance = 1e-8;

struct GramMatrix {
  std::vector<Point> points;
  Eigen::MatrixXd entries;
  CovarianceModel model;

  double trace() const { return entries.trace(); }
};

/// Covariance matrix of the field on a set of distinct points.
/// Throws ConfigError on duplicate points or on a PSD violation.
GramMatrix gram(const CovarianceModel& model, const std::vector<Point>& points,
                PsdCheck check = PsdCheck::Eigenvalues);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

void write_gram_csv(std::ostream& os, const GramMatrix& g);

/// Grid diagnostics for the growth conditions
///   E xi^2(t) <= k |t|^(2H)   and   E xi^2(t) ~ c^2 |t|^(2H), t -> infinity.
struct ConditionsReport {
  double k_sup = 0.0;       // sup over the grid of nu(h) / h^(2H)
  double k_argmax = 0.0;    // grid radius attaining k_sup
  double c2_tail = 0.0;     // mean ratio over the last decade of the grid
  double tail_spread = 0.0; // (max - min) / mean of the ratio over the last decade
  bool sup_finite = false;
  bool tail_stable = false;

  bool passed() const { return sup_finite && tail_stable; }
};

inline constexpr double kTailStabilityTolerance = 0.01;

ConditionsReport check_conditions_ab(const CovarianceModel& model, std::span<const double> radii);

/// Log-spaced radii on [lo, hi] with the given number of points per decade.
std::vector<double> log_radius_grid(double lo = 1e-3, double hi = 1e3, int per_decade = 20);

}  // namespace fbmpersist
