#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbmpersist/batch_io.hpp"
#include "fbmpersist/errors.hpp"
#include "fbmpersist/persistence.hpp"
#include "fbmpersist/sampler.hpp"
#include "fbmpersist/stats.hpp"

using namespace fbmpersist;

namespace {

Point P(std::vector<double> c) { return Point{std::move(c)}; }

std::vector<Point> grid_points(int d, int r) {
  std::vector<Point> pts;
  const auto dom = Domain::make(DomainKind::TangentCube, d, r / 2.0);
  for (const auto& p : lattice_points(dom)) pts.push_back(p.to_point(0.5));
  return pts;
}

}  // namespace

TEST_CASE("seed derivation is the documented mix") {
  // SplitMix64 reference: first output of the generator seeded with 0.
  CHECK(splitmix64_mix(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(0, 0) == splitmix64_mix(0x9E3779B97F4A7C15ULL));
  CHECK(derive_seed(7, 3) == splitmix64_mix(7 + 4 * 0x9E3779B97F4A7C15ULL));
  NormalStream s(0);
  CHECK(s.next_u64() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("uniforms are in the open unit interval and normals are symmetric") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
  NormalStream s(42);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform();
    CHECK_UNARY(u > 0.0 && u < 1.0);
    const double z = inverse_normal_cdf(u);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("factorization examples") {
  const auto f1 = factorize(gram(CovarianceModel::fbm(0.5), {P({4})}));
  REQUIRE(f1.lower.rows() == 1);
  CHECK(f1.lower(0, 0) == doctest::Approx(2.0));

  const auto f2 = factorize(gram(CovarianceModel::fbm(0.5), {P({1}), P({2})}));
  CHECK(f2.lower(0, 0) == doctest::Approx(1.0));
  CHECK(f2.lower(1, 0) == doctest::Approx(1.0));
  CHECK(f2.lower(1, 1) == doctest::Approx(1.0));
  CHECK(f2.lower(0, 1) == 0.0);

  const auto f0 = factorize(gram(CovarianceModel::fbm(0.5), {P({0})}));
  CHECK(f0.lower.size() == 0);
  CHECK(f0.active.empty());
}

TEST_CASE("factorization reconstructs the gram") {
  for (double H : {0.1, 0.5, 0.95}) {
    const auto g = gram(CovarianceModel::fbm(H), grid_points(2, 8), PsdCheck::None);
    const auto f = factorize(g);
    CHECK(f.reconstruction_error <= 1e-8 * g.trace() + f.jitter * std::sqrt(double(f.active.size())));
    CHECK(f.active.size() == g.points.size() - 1);
  }
}

TEST_CASE("pinned origin and determinism") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto pts = grid_points(1, 6);
  const auto a = sample(m, pts, 99, 300);
  const auto b = sample(m, pts, 99, 300);
  CHECK(a.values == b.values);
  for (Eigen::Index r = 0; r < a.values.rows(); ++r) CHECK(a.values(r, 0) == 0.0);
  const auto c = sample(m, pts, 100, 300);
  CHECK(a.values != c.values);
}

TEST_CASE("results do not depend on workers or on the index range") {
  const auto m = CovarianceModel::perturbed_fbm(0.5, 1.0, 1.0);
  const auto pts = grid_points(2, 4);
  const auto full = sample(m, pts, 5, 1000, 0, 1);
  const auto par = sample(m, pts, 5, 1000, 0, 4);
  CHECK(full.values == par.values);
  const auto head = sample(m, pts, 5, 377, 0, 2);
  const auto tail = sample(m, pts, 5, 623, 377, 3);
  CHECK(head.values == full.values.topRows(377));
  CHECK(tail.values == full.values.bottomRows(623));
}

TEST_CASE("variance and correlation") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto v = sample(m, {P({0}), P({1})}, 1, 100000);
  double sq = 0.0, sum = 0.0;
  for (Eigen::Index r = 0; r < v.values.rows(); ++r) {
    sq += v.values(r, 1) * v.values(r, 1);
    sum += v.values(r, 1);
  }
  CHECK(std::abs(sq / 1e5 - 1.0) < 4 * std::sqrt(2.0 / 1e5));
  CHECK(std::abs(sum / 1e5) < 4.0 / std::sqrt(1e5));

  const auto w = sample(m, {P({1, 0}), P({0, 1})}, 2, 100000);
  const Eigen::MatrixXd X = w.values;
  const Eigen::VectorXd mu = X.colwise().mean();
  const Eigen::MatrixXd C = (X.rowwise() - mu.transpose()).transpose() * (X.rowwise() - mu.transpose()) / 1e5;
  const double rho = C(0, 1) / std::sqrt(C(0, 0) * C(1, 1));
  CHECK(std::abs(rho - 0.2928932) < 4 * 0.0032);
}

TEST_CASE("self-similarity in law of the maximum") {
  const double H = 0.3, lambda = 3.0;
  const auto m = CovarianceModel::fbm(H);
  const auto pts = grid_points(2, 4);
  auto big = pts;
  for (auto& p : big)
    for (auto& c : p.coords) c *= lambda;
  std::vector<std::size_t> all(pts.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto a = max_over(sample(m, big, 10, 10000), all);
  auto b = max_over(sample(m, pts, 11, 10000), all);
  for (auto& x : b) x *= std::pow(lambda, H);
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
}

TEST_CASE("max_over") {
  SampleBatch b;
  b.points = {P({0}), P({1}), P({2})};
  b.values.resize(1, 3);
  b.values << 0.0, -1.2, 0.7;
  const std::vector<std::size_t> all{0, 1, 2}, origin{0}, no_max{0, 1};
  CHECK(max_over(b, all)[0] == 0.7);
  CHECK(max_over(b, origin)[0] == 0.0);
  CHECK(max_over(b, no_max)[0] == 0.0);
  CHECK_THROWS_AS(max_over(b, std::vector<std::size_t>{}), ConfigError);

  const auto s = sample(CovarianceModel::fbm(0.5), grid_points(1, 4), 3, 200);
  const std::vector<std::size_t> sub{1, 3, 4};
  const auto mx = max_over(s, sub);
  for (std::size_t r = 0; r < 200; ++r) {
    double want = -1e300;
    for (auto j : sub) want = std::max(want, s.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    CHECK(mx[r] == want);
  }
  for (double x : max_over(s, origin)) CHECK(x == 0.0);
}

TEST_CASE("batch io round trip") {
  const auto s = sample(CovarianceModel::fbm(0.7), grid_points(2, 2), 77, 50);
  std::stringstream bin;
  write_batch_binary(bin, s);
  const auto r = read_batch_binary(bin);
  CHECK(r.values == s.values);
  CHECK(r.master_seed == 77);
  CHECK(r.model == s.model);
  CHECK(points_digest(r.points) == points_digest(s.points));

  std::ostringstream csv;
  write_batch_csv(csv, s);
  CHECK(csv.str().rfind("# ", 0) == 0);
  CHECK(csv.str().find("seed=77") != std::string::npos);
  CHECK(csv.str().find("p0,p1") != std::string::npos);
}
