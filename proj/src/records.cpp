#include "fbmpersist/records.hpp"

#include <algorithm>
#include <cmath>

#include "fbmpersist/errors.hpp"
#include "fbmpersist/stats.hpp"

namespace fbmpersist {

namespace {

void check_aligned(const EnumerationCurve& curve, const RecordTrace& trace, std::int64_t n) {
  if (trace.values.size() != curve.entries.size())
    throw ConfigError("record trace and curve have different lengths");
  if (n < 1 || n > curve.n_max) throw ConfigError("level out of range for this curve");
}

}  // namespace

RecordTrace record_trace(std::span<const double> values) {
  if (values.empty()) throw ConfigError("record_trace needs a nonempty sequence");
  if (values[0] != 0.0) throw ConfigError("record_trace expects the origin value 0 at index 0");

  RecordTrace t;
  const auto n = values.size();
  t.values.assign(values.begin(), values.end());
  t.running_max.resize(n);
  t.increments.resize(n);
  t.partial_F.resize(n);
  t.running_max[0] = 0.0;
  t.increments[0] = 0.0;
  t.partial_F[0] = 0.0;

  CompensatedSum F;
  for (std::size_t i = 1; i < n; ++i) {
    const double inc = std::max(values[i] - t.running_max[i - 1], 0.0);
    t.increments[i] = inc;
    t.running_max[i] = std::max(t.running_max[i - 1], values[i]);
    F.add(inc);
    t.partial_F[i] = F.value();
  }
  return t;
}

LevelSums level_sums(const EnumerationCurve& curve, const RecordTrace& trace, std::int64_t n) {
  check_aligned(curve, trace, n);
  CompensatedSum z1, z2;
  for (std::size_t i = 1; i < curve.entries.size(); ++i) {
    const auto& e = curve.entries[i];
    if (e.level != n) continue;
    (e.zone == 1 ? z1 : z2).add(trace.increments[i]);
  }
  return {z1.value(), z2.value()};
}

double F_at_level(const EnumerationCurve& curve, const RecordTrace& trace, std::int64_t n) {
  if (trace.values.size() != curve.entries.size())
    throw ConfigError("record trace and curve have different lengths");
  if (n < 0 || n > curve.n_max) throw ConfigError("level out of range for this curve");
  return trace.partial_F[curve.last_first_visit[static_cast<std::size_t>(n)]];
}

ShellBound shell_increment_bound_check(const EnumerationCurve& curve, const RecordTrace& trace,
                                       std::int64_t n) {
  check_aligned(curve, trace, n);
  const std::size_t lo = curve.last_first_visit[static_cast<std::size_t>(n - 1)];
  const std::size_t hi = curve.last_first_visit[static_cast<std::size_t>(n)];
  CompensatedSum lhs;
  for (std::size_t i = lo + 1; i <= hi; ++i) lhs.add(trace.increments[i]);

  ShellBound b;
  b.lhs = lhs.value();
  b.zone2_sum = level_sums(curve, trace, n).zone2;
  b.margin = 2.0 * b.zone2_sum - b.lhs;
  b.holds = b.margin >= -1e-12 * (1.0 + std::abs(b.lhs));
  return b;
}

}  // namespace fbmpersist
