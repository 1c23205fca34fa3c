#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbmpersist/covmodel.hpp"
#include "fbmpersist/geometry.hpp"

namespace fbmpersist {

// ---------------------------------------------------------------------------
// Random streams
//
// Realization i of a batch with master seed s draws its standard normals from
// the stream seeded with derive_seed(s, i). A stream is the SplitMix64
// sequence: state += 0x9E3779B97F4A7C15, output = mix(state). Uniforms are
// u = ((x >> 11) + 0.5) * 2^-53 and normals are Phi^-1(u), so a batch is a
// deterministic function of (model, points, seed, index range).
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// derive_seed(master, i) = mix(master + (i + 1) * 0x9E3779B97F4A7C15)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next_uniform();
  double next_normal();

 private:
  std::uint64_t state_;
};

double inverse_normal_cdf(double u);

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// Cholesky factor of the Gram matrix restricted to points of nonzero
/// variance (everything except the pinned origin).
struct Factorization {
  Eigen::MatrixXd lower;
  std::vector<std::size_t> active;  // positions of the factored points in the point list
  std::size_t n_points = 0;
  double jitter = 0.0;
  double reconstruction_error = 0.0;  // ||L L^T - K||_F
};

/// Jitter ladder, in units of trace(K).
inline constexpr double kJitterLadder[] = {0.0, 1e-12, 1e-10, 1e-8};

/// Throws NumericalError when no rung of the jitter ladder yields a factor.
Factorization factorize(const GramMatrix& g);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Realizations are produced in blocks of kSampleChunk consecutive indices
/// aligned at multiples of kSampleChunk. Every block is computed at full
/// width, so a realization's values do not depend on the requested range or
/// on the number of workers.
inline constexpr std::size_t kSampleChunk = 256;

class FieldSampler {
 public:
  FieldSampler(const CovarianceModel& model, std::vector<Point> points);
  explicit FieldSampler(const GramMatrix& g);

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Factorization& factorization() const { return factor_; }
  const CovarianceModel& model() const { return model_; }

  /// Called once per realization with its global index and the field values
  /// in point order. Calls may come from several threads at once; a visitor
  /// must only write state owned by that index.
  using Visitor = std::function<void(std::size_t index, std::span<const double> values)>;

  void for_each(std::uint64_t seed, std::size_t first, std::size_t count, unsigned workers,
                const Visitor& visit) const;

 private:
  void fill_chunk(std::uint64_t seed, std::size_t chunk, Eigen::MatrixXd& normals,
                  Eigen::MatrixXd& values) const;

  CovarianceModel model_;
  std::vector<Point> points_;
  Factorization factor_;
};

/// Materialized realizations: values(r, j) is realization first_index + r at
/// points[j].
struct SampleBatch {
  using Values = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::vector<Point> points;
  Values values;
  std::uint64_t master_seed = 0;
  std::size_t first_index = 0;
  CovarianceModel model = CovarianceModel::fbm(0.5);

  std::size_t count() const { return static_cast<std::size_t>(values.rows()); }
};

SampleBatch sample(const CovarianceModel& model, const std::vector<Point>& points,
                   std::uint64_t master_seed, std::size_t count, std::size_t first_index = 0,
                   unsigned workers = 1);

SampleBatch sample(const FieldSampler& sampler, std::uint64_t master_seed, std::size_t count,
                   std::size_t first_index = 0, unsigned workers = 1);

/// Per-realization maximum over the given point indices.
std::vector<double> max_over(const SampleBatch& batch, std::span<const std::size_t> subset);

}  // namespace fbmpersist
