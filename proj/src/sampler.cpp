#include "fbmpersist/sampler.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master + (index + 1) * kGolden);
}

std::uint64_t NormalStream::next_u64() {
  state_ += kGolden;
  return splitmix64_mix(state_);
}

double NormalStream::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next_normal() { return inverse_normal_cdf(next_uniform()); }

double inverse_normal_cdf(double u) {
  // Phi^-1(u) = -sqrt(2) erfc^-1(2u)
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

Factorization factorize(const GramMatrix& g) {
  const auto& K = g.entries;
  Factorization f;
  f.n_points = static_cast<std::size_t>(K.rows());
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    if (K(i, i) != 0.0) f.active.push_back(static_cast<std::size_t>(i));

  const auto n = static_cast<Eigen::Index>(f.active.size());
  if (n == 0) return f;

  Eigen::MatrixXd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = K(f.active[i], f.active[j]);
  const double tr = A.trace();

  for (double rung : kJitterLadder) {
    const double jitter = rung * tr;
    Eigen::MatrixXd B = A;
    B.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) continue;

    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd R = L.triangularView<Eigen::Lower>() * L.transpose();
    R -= A;
    const double err = R.norm();
    // The jitter itself contributes exactly jitter * sqrt(n) to the error.
    if (!(err <= kPsdTolerance * tr + jitter * std::sqrt(static_cast<double>(n)))) continue;

    f.lower = std::move(L);
    f.jitter = jitter;
    f.reconstruction_error = err;
    return f;
  }
  std::ostringstream os;
  os << "Cholesky factorization failed for " << g.model.describe() << " on " << n
     << " points after jitter up to 1e-8 * trace";
  throw NumericalError(os.str());
}

FieldSampler::FieldSampler(const CovarianceModel& model, std::vector<Point> points)
    : model_(model), points_(std::move(points)) {
  factor_ = factorize(gram(model_, points_, PsdCheck::None));
}

FieldSampler::FieldSampler(const GramMatrix& g) : model_(g.model), points_(g.points) {
  factor_ = factorize(g);
}

void FieldSampler::fill_chunk(std::uint64_t seed, std::size_t chunk, Eigen::MatrixXd& normals,
                              Eigen::MatrixXd& values) const {
  const auto n = static_cast<Eigen::Index>(factor_.active.size());
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kSampleChunk); ++c) {
    NormalStream stream(derive_seed(seed, chunk * kSampleChunk + static_cast<std::size_t>(c)));
    for (Eigen::Index r = 0; r < n; ++r) normals(r, c) = stream.next_normal();
  }
  values.noalias() = factor_.lower.triangularView<Eigen::Lower>() * normals;
}

void FieldSampler::for_each(std::uint64_t seed, std::size_t first, std::size_t count,
                            unsigned workers, const Visitor& visit) const {
  if (count == 0) return;
  const std::size_t first_chunk = first / kSampleChunk;
  const std::size_t last_chunk = (first + count - 1) / kSampleChunk;
  const std::size_t n_chunks = last_chunk - first_chunk + 1;
  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    try {
      const auto n_active = static_cast<Eigen::Index>(factor_.active.size());
      const auto width = static_cast<Eigen::Index>(kSampleChunk);
      Eigen::MatrixXd normals(n_active, width);
      Eigen::MatrixXd values(n_active, width);
      std::vector<double> row(points_.size(), 0.0);
      for (std::size_t k = next++; k < n_chunks; k = next++) {
        const std::size_t chunk = first_chunk + k;
        if (n_active > 0) fill_chunk(seed, chunk, normals, values);
        for (std::size_t c = 0; c < kSampleChunk; ++c) {
          const std::size_t index = chunk * kSampleChunk + c;
          if (index < first || index >= first + count) continue;
          for (Eigen::Index r = 0; r < n_active; ++r)
            row[factor_.active[r]] = values(r, static_cast<Eigen::Index>(c));
          visit(index, row);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_chunks;
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

SampleBatch sample(const FieldSampler& sampler, std::uint64_t master_seed, std::size_t count,
                   std::size_t first_index, unsigned workers) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  SampleBatch batch;
  batch.points = sampler.points();
  batch.model = sampler.model();
  batch.master_seed = master_seed;
  batch.first_index = first_index;
  batch.values.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(sampler.size()));
  sampler.for_each(master_seed, first_index, count, workers,
                   [&](std::size_t index, std::span<const double> row) {
                     const auto r = static_cast<Eigen::Index>(index - first_index);
                     for (std::size_t j = 0; j < row.size(); ++j)
                       batch.values(r, static_cast<Eigen::Index>(j)) = row[j];
                   });
  return batch;
}

SampleBatch sample(const CovarianceModel& model, const std::vector<Point>& points,
                   std::uint64_t master_seed, std::size_t count, std::size_t first_index,
                   unsigned workers) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  return sample(FieldSampler(model, points), master_seed, count, first_index, workers);
}

std::vector<double> max_over(const SampleBatch& batch, std::span<const std::size_t> subset) {
  if (subset.empty()) throw ConfigError("max_over needs a nonempty subset");
  for (auto j : subset)
    if (j >= batch.points.size()) throw ConfigError("max_over index out of range");
  std::vector<double> out(batch.count());
  for (std::size_t r = 0; r < out.size(); ++r) {
    double m = batch.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(subset[0]));
    for (auto j : subset) m = std::max(m, batch.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    out[r] = m;
  }
  return out;
}

}  // namespace fbmpersist
