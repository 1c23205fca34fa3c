#include "fbmpersist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Proportion Proportion::from_counts(std::size_t hits, std::size_t count) {
  Proportion p;
  p.count = count;
  p.hits = hits;
  if (count == 0) return p;
  const double n = static_cast<double>(count);
  p.p_hat = static_cast<double>(hits) / n;
  p.std_error = std::sqrt(p.p_hat * (1.0 - p.p_hat) / n);

  const double z2 = kWilsonZ95 * kWilsonZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p.p_hat + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ95 * std::sqrt(p.p_hat * (1.0 - p.p_hat) / n + z2 / (4.0 * n * n)) / denom;
  p.ci_lo = std::max(0.0, std::min(centre - half, p.p_hat));
  p.ci_hi = std::min(1.0, std::max(centre + half, p.p_hat));
  return p;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate m;
  m.count = xs.size();
  if (xs.empty()) return m;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  m.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum ss;
    for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
    m.sd = std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
    m.std_error = m.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return m;
}

namespace {

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)
double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  // Stephens' small-sample correction.
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return KsResult{d, kolmogorov_survival(lambda)};
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw ConfigError("fit inputs must have equal lengths");
  if (x.size() < 2) throw ConfigError("fit needs at least two points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  if (!(det > 0.0)) throw ConfigError("degenerate fit: need at least two distinct abscissae");
  LinearFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  f.slope_stderr = std::sqrt(sw / det);
  f.intercept_stderr = std::sqrt(swxx / det);
  return f;
}

}  // namespace fbmpersist
