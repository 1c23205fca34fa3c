#include "fbmpersist/covmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

const char* to_string(ModelKind kind) {
  return kind == ModelKind::Fbm ? "fbm" : "perturbed_fbm";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "fbm") return ModelKind::Fbm;
  if (name == "perturbed_fbm" || name == "perturbed") return ModelKind::PerturbedFbm;
  throw ConfigError("unknown model kind '" + name + "' (expected fbm or perturbed_fbm)");
}

CovarianceModel CovarianceModel::fbm(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst index must lie in (0, 1)");
  return CovarianceModel(ModelKind::Fbm, hurst, 0.0, 1.0);
}

CovarianceModel CovarianceModel::perturbed_fbm(double hurst, double sigma, double ell) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst index must lie in (0, 1)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("perturbation amplitude must be >= 0");
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ConfigError("perturbation length must be > 0");
  return CovarianceModel(ModelKind::PerturbedFbm, hurst, sigma, ell);
}

double CovarianceModel::variogram(double h) const {
  if (h < 0.0 || std::isnan(h)) throw ConfigError("variogram lag must be nonnegative");
  if (h == 0.0) return 0.0;
  double v = std::pow(h, 2.0 * hurst_);
  if (kind_ == ModelKind::PerturbedFbm) {
    const double u = h / ell_;
    v += sigma_ * sigma_ * -std::expm1(-u * u);
  }
  return v;
}

double CovarianceModel::covariance(const Point& t, const Point& s) const {
  return 0.5 * (variogram(euclidean_norm(t)) + variogram(euclidean_norm(s)) -
                variogram(euclidean_distance(t, s)));
}

std::string CovarianceModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(H=" << hurst_;
  if (kind_ == ModelKind::PerturbedFbm) os << ", sigma=" << sigma_ << ", ell=" << ell_;
  os << ")";
  return os.str();
}

GramMatrix gram(const CovarianceModel& model, const std::vector<Point>& points, PsdCheck check) {
  const auto n = static_cast<Eigen::Index>(points.size());
  {
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto [it, inserted] = seen.emplace(points[i].coords, i);
      if (!inserted)
        throw ConfigError("duplicate point in gram(): indices " + std::to_string(it->second) +
                          " and " + std::to_string(i));
    }
  }

  std::vector<double> self(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) self[i] = model.variogram(euclidean_norm(points[i]));

  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = self[j];
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (self[i] + self[j] - model.variogram(euclidean_distance(points[i], points[j])));
      K(i, j) = v;
      K(j, i) = v;
    }
  }

  if (check == PsdCheck::Eigenvalues && n > 0) {
    const double lam = min_eigenvalue(K);
    if (lam < -kPsdTolerance * K.trace()) {
      std::ostringstream os;
      os << "gram matrix is not positive semidefinite: min eigenvalue " << lam << ", trace " << K.trace();
      throw ConfigError(os.str());
    }
  }
  return GramMatrix{points, std::move(K), model};
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void write_gram_csv(std::ostream& os, const GramMatrix& g) {
  const auto n = g.entries.rows();
  os.precision(17);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) os << (j ? "," : "") << g.entries(i, j);
    os << '\n';
  }
}

ConditionsReport check_conditions_ab(const CovarianceModel& model, std::span<const double> radii) {
  ConditionsReport r;
  if (radii.empty()) return r;
  const double two_h = 2.0 * model.hurst();

  std::vector<double> ratio(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ratio[i] = model.variogram(radii[i]) / std::pow(radii[i], two_h);
    if (ratio[i] > r.k_sup || i == 0) {
      r.k_sup = ratio[i];
      r.k_argmax = radii[i];
    }
  }
  r.sup_finite = std::isfinite(r.k_sup);

  const double top = radii.back();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < top / 10.0 * (1.0 - 1e-12)) continue;
    lo = std::min(lo, ratio[i]);
    hi = std::max(hi, ratio[i]);
    sum += ratio[i];
    ++count;
  }
  r.c2_tail = sum / static_cast<double>(count);
  r.tail_spread = (hi - lo) / r.c2_tail;
  r.tail_stable = std::isfinite(r.c2_tail) && r.tail_spread < kTailStabilityTolerance;
  return r;
}

std::vector<double> log_radius_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0 && hi > lo) || per_decade < 1) throw ConfigError("invalid radius grid");
  const double decades = std::log10(hi / lo);
  const int steps = static_cast<int>(std::lround(decades * per_decade));
  std::vector<double> out;
  out.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, decades * i / steps));
  return out;
}

}  // namespace fbmpersist
