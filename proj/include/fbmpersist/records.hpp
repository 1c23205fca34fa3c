#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbmpersist/curve.hpp"

namespace fbmpersist {

/// Record functional along a sequence xi_0 = 0, xi_1, xi_2, ...
///
///   M_0 = 0,  M_i = max(M_{i-1}, xi_i),
///   F_i = sum_{k=1..i} (xi_k - M_{k-1})_+
///
/// partial_F is accumulated with compensated summation, so F_i = M_i holds
/// to rounding even on long sequences.
struct RecordTrace {
  std::vector<double> values;
  std::vector<double> running_max;  // M_i, i = 0..n-1
  std::vector<double> increments;   // increments[i] = (xi_i - M_{i-1})_+, increments[0] = 0
  std::vector<double> partial_F;    // F_i

  double F() const { return partial_F.back(); }
  double M() const { return running_max.back(); }
};

/// Throws ConfigError on an empty sequence or when values[0] != 0.
RecordTrace record_trace(std::span<const double> values);

struct LevelSums {
  double zone1 = 0.0;
  double zone2 = 0.0;
};

/// Sums of record increments over the level-n entries of the curve, split by
/// zone. Revisited entries are never records and contribute zero.
LevelSums level_sums(const EnumerationCurve& curve, const RecordTrace& trace, std::int64_t n);

/// F at the last first visit of level n, i.e. F(n Delta) = M over [n Delta].
double F_at_level(const EnumerationCurve& curve, const RecordTrace& trace, std::int64_t n);

/// Per-realization shell inequality
///   F(n Delta) - F((n-1) Delta) <= 2 * Sigma^2_n.
struct ShellBound {
  bool holds = true;
  double lhs = 0.0;
  double zone2_sum = 0.0;
  double margin = 0.0;  // 2 * Sigma^2_n - lhs
};

ShellBound shell_increment_bound_check(const EnumerationCurve& curve, const RecordTrace& trace,
                                       std::int64_t n);

}  // namespace fbmpersist
