#include "fbmpersist/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fbmpersist/errors.hpp"
#include "fbmpersist/sampler.hpp"

namespace fbmpersist {

namespace {

void check_count(std::size_t N) {
  if (N < 100) throw ConfigError("realization count must be >= 100");
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    std::ostringstream os;
    os << "point set has " << n << " points, above the cap of " << cap
       << "; lower T or coarsen the mesh";
    throw CapExceededError(os.str());
  }
}

}  // namespace

std::vector<Point> persistence_net(const Domain& domain, double T, int refinement,
                                   std::size_t point_cap) {
  if (refinement < 1) throw ConfigError("mesh refinement must be >= 1 (spacing 1/m)");
  const auto scaled = domain.scaled(T);
  // Cheap upper bound on the net size before enumerating it.
  double bound = 1.0;
  for (int i = 0; i < domain.dim(); ++i) bound *= 2.0 * scaled.extent() * refinement + 1.0;
  if (bound > 64.0 * static_cast<double>(point_cap)) check_cap(static_cast<std::size_t>(bound), point_cap);
  auto pts = net_points(scaled, refinement);
  check_cap(pts.size(), point_cap);
  return pts;
}

bool below_barrier(double max_value, double barrier) {
  return barrier == 0.0 ? max_value <= 0.0 : max_value < barrier;
}

std::vector<double> sample_maxima(const CovarianceModel& model, const std::vector<Point>& points,
                                  std::uint64_t seed, std::size_t N, unsigned workers) {
  std::vector<double> maxima(N);
  if (points.empty()) return maxima;
  const FieldSampler sampler(model, points);
  sampler.for_each(seed, 0, N, workers, [&](std::size_t idx, std::span<const double> v) {
    maxima[idx] = *std::max_element(v.begin(), v.end());
  });
  return maxima;
}

PersistenceEstimate estimate_p(const CovarianceModel& model, const Domain& domain, double T,
                               double barrier, int refinement, std::uint64_t seed, std::size_t N,
                               const RunOptions& options) {
  check_count(N);
  if (!(barrier >= 0.0)) throw ConfigError("barrier must be >= 0");
  const auto pts = persistence_net(domain, T, refinement, options.point_cap);
  const auto maxima = sample_maxima(model, pts, seed, N, options.workers);

  std::size_t hits = 0;
  for (double m : maxima) hits += below_barrier(m, barrier) ? 1 : 0;

  PersistenceEstimate e;
  e.model = model;
  e.domain = domain;
  e.T = T;
  e.barrier = barrier;
  e.refinement = refinement;
  e.n_points = pts.size();
  e.seed = seed;
  e.p = Proportion::from_counts(hits, N);
  return e;
}

MaxEstimate estimate_EM(const CovarianceModel& model, const Domain& domain, double T, int refinement,
                        std::uint64_t seed, std::size_t N, const RunOptions& options) {
  check_count(N);
  const auto pts = persistence_net(domain, T, refinement, options.point_cap);
  const auto maxima = sample_maxima(model, pts, seed, N, options.workers);
  MaxEstimate e;
  e.T = T;
  e.refinement = refinement;
  e.n_points = pts.size();
  e.mean = mean_estimate(maxima);
  return e;
}

ExponentFit fit_exponent(std::span<const double> T, std::span<const double> p,
                         std::span<const double> std_error) {
  if (T.size() != p.size() || T.size() != std_error.size())
    throw ConfigError("exponent fit inputs must have equal lengths");
  if (std::set<double>(T.begin(), T.end()).size() < 3) throw ConfigError("need >= 3 scales for an exponent fit");
  for (double v : p)
    if (!(v > 0.0)) throw ConfigError("a persistence estimate is 0; raise N or lower T");
  for (double t : T)
    if (!(t > 0.0)) throw ConfigError("scales must be positive");

  ExponentFit f;
  f.T.assign(T.begin(), T.end());
  f.p.assign(p.begin(), p.end());
  f.std_error.assign(std_error.begin(), std_error.end());
  const bool weighted = std::all_of(std_error.begin(), std_error.end(), [](double s) { return s > 0.0; });
  std::vector<double> x, y;
  for (std::size_t i = 0; i < T.size(); ++i) {
    x.push_back(std::log(T[i]));
    y.push_back(std::log(p[i]));
    const double rel = std_error[i] / p[i];
    f.weights.push_back(weighted ? 1.0 / (rel * rel) : 1.0);
  }
  const auto lin = weighted_linear_fit(x, y, f.weights);
  f.slope = lin.slope;
  f.intercept = lin.intercept;
  f.slope_std_error = lin.slope_stderr;
  return f;
}

ExponentFit fit_exponent(std::span<const PersistenceEstimate> estimates) {
  std::vector<double> T, p, s;
  for (const auto& e : estimates) {
    T.push_back(e.T);
    p.push_back(e.p.p_hat);
    s.push_back(e.p.std_error);
  }
  return fit_exponent(T, p, s);
}

Proportion record_prob(const CovarianceModel& model, const EnumerationCurve& curve, std::size_t i,
                       std::uint64_t seed, std::size_t N, const RunOptions& options) {
  check_count(N);
  if (i >= curve.entries.size()) throw ConfigError("curve index out of range");
  if (!curve.entries[i].first_visit) throw ConfigError("record_prob needs a first-visit index");
  if (i == 0) return Proportion::from_counts(N, N);

  std::vector<Point> pts;
  for (std::size_t k = 0; k <= i; ++k)
    if (curve.entries[k].first_visit) pts.push_back(curve.entries[k].point.to_point());
  check_cap(pts.size(), options.point_cap);

  std::vector<char> record(N, 0);
  const FieldSampler sampler(model, pts);
  sampler.for_each(seed, 0, N, options.workers, [&](std::size_t idx, std::span<const double> v) {
    const double xi = v.back();
    const double prev = *std::max_element(v.begin(), v.end() - 1);
    record[idx] = xi >= prev ? 1 : 0;
  });
  std::size_t hits = 0;
  for (char r : record) hits += static_cast<std::size_t>(r);
  return Proportion::from_counts(hits, N);
}

}  // namespace fbmpersist
