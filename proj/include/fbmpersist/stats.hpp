#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbmpersist {

double normal_cdf(double x);

/// Binomial proportion with standard error and 95% Wilson interval.
struct Proportion {
  std::size_t count = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;

  static Proportion from_counts(std::size_t hits, std::size_t count);
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct MeanEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double sd = 0.0;
};

MeanEstimate mean_estimate(std::span<const double> xs);

/// Two-sample Kolmogorov-Smirnov statistic with asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Weighted least squares y ~ intercept + slope * x with weights equal to
/// inverse variances; standard errors come from (X^T W X)^-1.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w);

}  // namespace fbmpersist
