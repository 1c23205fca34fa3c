#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbmpersist/errors.hpp"
#include "fbmpersist/persistence.hpp"
#include "fbmpersist/stats.hpp"

using namespace fbmpersist;

namespace {

double brownian_anchor(double T) { return 2.0 * normal_cdf(1.0 / std::sqrt(T)) - 1.0; }

const Domain unit_interval = Domain::make(DomainKind::TangentCube, 1, 0.5);

}  // namespace

TEST_CASE("barrier rule") {
  CHECK(below_barrier(0.0, 0.0));
  CHECK_FALSE(below_barrier(1e-300, 0.0));
  CHECK(below_barrier(0.999, 1.0));
  CHECK_FALSE(below_barrier(1.0, 1.0));
}

TEST_CASE("origin-only net gives p = 1 and EM = 0") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto e = estimate_p(m, unit_interval, 0.1, 1.0, 1, 3, 200);
  CHECK(e.n_points == 1);
  CHECK(e.p.p_hat == 1.0);
  const auto em = estimate_EM(m, unit_interval, 0.1, 1, 3, 200);
  CHECK(em.mean.mean == 0.0);
}

TEST_CASE("preconditions") {
  const auto m = CovarianceModel::fbm(0.5);
  CHECK_THROWS_AS(estimate_p(m, unit_interval, 4, 1.0, 1, 1, 99), ConfigError);
  CHECK_THROWS_AS(estimate_p(m, unit_interval, 4, 1.0, 0, 1, 100), ConfigError);
  CHECK_THROWS_AS(estimate_p(m, unit_interval, 4, -1.0, 1, 1, 100), ConfigError);
  CHECK_THROWS_AS(estimate_p(m, Domain::make(DomainKind::TangentCube, 2, 1.0), 200, 1.0, 1, 1, 100),
                  CapExceededError);
  RunOptions small{10, 1};
  CHECK_THROWS_AS(estimate_p(m, unit_interval, 16, 1.0, 1, 1, 100, small), CapExceededError);
}

TEST_CASE("closed-form anchor at T=16 with delta=1/4") {
  const auto e = estimate_p(CovarianceModel::fbm(0.5), unit_interval, 16, 1.0, 4, 2024, 20000);
  CHECK(e.n_points == 65);
  CHECK(e.p.p_hat >= brownian_anchor(16) - 3 * e.p.std_error);
  CHECK(e.p.p_hat <= brownian_anchor(16) + 0.08 + 3 * e.p.std_error);
}

TEST_CASE("coarser net has larger persistence") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto coarse = estimate_p(m, unit_interval, 16, 1.0, 1, 9, 20000);
  const auto fine = estimate_p(m, unit_interval, 16, 1.0, 4, 9, 20000);
  CHECK(coarse.p.p_hat >= fine.p.p_hat - 3 * std::hypot(coarse.p.std_error, fine.p.std_error));
}

TEST_CASE("barrier monotonicity is realization-wise") {
  const auto m = CovarianceModel::fbm(0.7);
  const auto d = Domain::make(DomainKind::TangentBall, 2, 1.0);
  const auto lo = estimate_p(m, d, 3, 0.5, 1, 4, 2000);
  const auto hi = estimate_p(m, d, 3, 1.0, 1, 4, 2000);
  CHECK(lo.p.hits <= hi.p.hits);
}

TEST_CASE("persistence decreases along nested lattices") {
  const auto m = CovarianceModel::fbm(0.5);
  double prev = 1.0, prev_se = 0.0;
  for (double T : {4.0, 8.0, 16.0, 32.0}) {
    const auto e = estimate_p(m, unit_interval, T, 1.0, 1, 17, 5000);
    CHECK(e.p.p_hat <= prev + 3 * std::hypot(prev_se, e.p.std_error));
    prev = e.p.p_hat;
    prev_se = e.p.std_error;
  }
}

TEST_CASE("half-Gaussian mean of max(0, xi)") {
  const auto m = CovarianceModel::fbm(0.35);
  const auto maxima = sample_maxima(m, {Point{{0.0}}, Point{{1.0}}}, 5, 40000, 1);
  const auto est = mean_estimate(maxima);
  CHECK(std::abs(est.mean - 0.3989422804014327) <= 3 * est.std_error);
}

TEST_CASE("doubling domination of the scaled maximum") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto a = estimate_EM(m, unit_interval, 16, 1, 3, 10000);
  const auto b = estimate_EM(m, unit_interval, 32, 1, 4, 10000);
  CHECK(b.mean.mean / std::sqrt(2.0) >= a.mean.mean - 3 * std::hypot(a.mean.std_error, b.mean.std_error / std::sqrt(2.0)));
}

TEST_CASE("self-similar rescaling of the maximum") {
  const double H = 0.5, T = 8.0;
  const auto m = CovarianceModel::fbm(H);
  const auto big = sample_maxima(m, persistence_net(unit_interval, T, 1, 1000), 1, 10000, 1);
  auto small = sample_maxima(m, persistence_net(unit_interval, 1.0, 8, 1000), 2, 10000, 1);
  for (auto& x : small) x *= std::pow(T, H);
  CHECK(ks_two_sample(big, small).p_value > 1e-3);
}

TEST_CASE("exponent fit") {
  {
    const std::vector<double> T{4, 8, 16}, p{std::pow(4, -1.5), std::pow(8, -1.5), std::pow(16, -1.5)}, se{0, 0, 0};
    const auto f = fit_exponent(T, p, se);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  }
  {
    std::vector<double> T{8, 16, 32, 64, 128}, p, se;
    for (double t : T) {
      p.push_back(brownian_anchor(t));
      se.push_back(0.0);
    }
    const auto f = fit_exponent(T, p, se);
    CHECK(f.slope >= -0.58);
    CHECK(f.slope <= -0.42);
  }
  {
    const std::vector<double> T{2, 4, 8}, p{0.3, 0.3, 0.3}, se{0.01, 0.01, 0.01};
    CHECK(fit_exponent(T, p, se).slope == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    const std::vector<double> T{2, 4, 8}, p{0.3, 0.2, 0.1}, se{0.03, 0.02, 0.01};
    const auto f = fit_exponent(T, p, se);
    CHECK(f.weights[0] == doctest::Approx(100.0));
    CHECK(f.weights[2] == doctest::Approx(100.0));
    CHECK(std::isfinite(f.slope_std_error));
  }
  const std::vector<double> T2{4, 8}, p2{0.1, 0.05}, s2{0.01, 0.01};
  CHECK_THROWS_WITH_AS(fit_exponent(T2, p2, s2), "need >= 3 scales for an exponent fit", ConfigError);
  const std::vector<double> T3{4, 8, 16}, p3{0.1, 0.0, 0.01}, s3{0.01, 0.0, 0.01};
  CHECK_THROWS_AS(fit_exponent(T3, p3, s3), ConfigError);
}

TEST_CASE("record probability") {
  const auto m = CovarianceModel::fbm(0.5);
  const auto c = build_curve(2, 3, 1.0, 3);
  const auto one = record_prob(m, c, 1, 3, 20000);
  CHECK(std::abs(one.p_hat - 0.5) <= 3 * std::sqrt(0.25 / 20000));
  CHECK(record_prob(m, c, 0, 3, 100).p_hat == 1.0);
  std::size_t revisit = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.entries[i].first_visit) revisit = i;
  REQUIRE(revisit > 0);
  CHECK_THROWS_AS(record_prob(m, c, revisit, 3, 100), ConfigError);
  CHECK_THROWS_AS(record_prob(m, c, c.size(), 3, 100), ConfigError);

  // Zone-2 record probability vs persistence of the shrunken box.
  const auto box = containment_box(2, 3, 1.0);
  REQUIRE_FALSE(box.empty());
  std::vector<Point> pts;
  for (const auto& o : box) pts.push_back(o.to_point());
  std::size_t hits = 0;
  for (double x : sample_maxima(m, pts, 77, 20000, 1)) hits += below_barrier(x, 0.0);
  const auto pbox = Proportion::from_counts(hits, 20000);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& e = c.entries[i];
    if (!e.first_visit || e.level != 3 || e.zone != 2) continue;
    const auto pr = record_prob(m, c, i, 5, 20000);
    CHECK(pr.p_hat <= pbox.p_hat + 3 * std::hypot(pr.std_error, pbox.std_error));
  }
}
