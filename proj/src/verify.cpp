#include "fbmpersist/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fbmpersist/errors.hpp"
#include "fbmpersist/records.hpp"
#include "fbmpersist/sampler.hpp"
#include "fbmpersist/stats.hpp"

namespace fbmpersist {

Check make_check(std::string name, double value, double bound, double slack, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.slack = slack;
  c.note = std::move(note);
  c.passed = value <= bound + slack;
  return c;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"slack", c.slack},
                           {"margin", c.margin()},
                           {"note", c.note}});
  }
  j["info"] = info;
  return j;
}

void VerifyReport::print_table(std::ostream& os) const {
  os << suite << ": " << (passed() ? "PASS" : "FAIL") << "\n";
  os << std::left << std::setw(28) << "check" << std::right << std::setw(14) << "value" << std::setw(14)
     << "bound" << std::setw(12) << "slack" << std::setw(14) << "margin"
     << "  result\n";
  for (const auto& c : checks) {
    os << std::left << std::setw(28) << c.name << std::right << std::setprecision(6) << std::setw(14) << c.value
       << std::setw(14) << c.bound << std::setw(12) << c.slack << std::setw(14) << c.margin() << "  "
       << (c.passed ? "pass" : "FAIL");
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64_mix(seed ^ splitmix64_mix(tag + 0x5851F42D4C957F2DULL));
}

namespace {

void check_count(std::size_t N) {
  if (N < 100) throw ConfigError("realization count must be >= 100");
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw CapExceededError("point set has " + std::to_string(n) + " points, above the cap of " +
                           std::to_string(cap));
}

bool all_divisible(const LatticePoint& p, std::int64_t k) {
  return std::all_of(p.coords.begin(), p.coords.end(), [k](std::int64_t c) { return c % k == 0; });
}

// Lattice points of the 1/4-refined net of `domain` scaled by `factor`
// (spacing `spacing / 4`), plus the positions of the coarse sub-lattice.
struct NestedNet {
  std::vector<Point> fine;
  std::vector<std::size_t> coarse;
};

NestedNet nested_net(const Domain& domain, double factor, double spacing, std::size_t cap) {
  const auto scaled = domain.scaled(factor);
  double bound = 1.0;
  for (int i = 0; i < domain.dim(); ++i) bound *= 2.0 * scaled.extent() + 1.0;
  if (bound > 64.0 * static_cast<double>(cap)) check_cap(static_cast<std::size_t>(bound), cap);
  const auto lat = lattice_points(scaled);
  check_cap(lat.size(), cap);
  NestedNet net;
  for (const auto& p : lat) {
    if (all_divisible(p, 4)) net.coarse.push_back(net.fine.size());
    net.fine.push_back(p.to_point(spacing / 4.0));
  }
  return net;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

double variance(std::span<const double> xs) { return std::pow(mean_estimate(xs).sd, 2); }

struct PairMaxima {
  std::vector<double> fine;
  std::vector<double> coarse;
};

PairMaxima coupled_maxima(const CovarianceModel& model, const NestedNet& net, std::uint64_t seed, std::size_t N,
                          unsigned workers) {
  PairMaxima out{std::vector<double>(N), std::vector<double>(N)};
  const FieldSampler sampler(model, net.fine);
  sampler.for_each(seed, 0, N, workers, [&](std::size_t idx, std::span<const double> v) {
    out.fine[idx] = *std::max_element(v.begin(), v.end());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j : net.coarse) m = std::max(m, v[j]);
    out.coarse[idx] = m;
  });
  return out;
}

}  // namespace

VerifyReport lemma2_check(const CovarianceModel& model, const Domain& domain, double T, double rho, double a,
                          double c, double b, std::uint64_t seed, std::size_t N, const RunOptions& options) {
  check_count(N);
  if (!(T > 0.0) || !(rho > 0.0)) throw ConfigError("T and rho must be positive");
  if (!(a > c)) throw ConfigError("thresholds must satisfy a > c");
  if (!(b > 0.0)) throw ConfigError("b must be positive");

  const auto net = nested_net(domain, 4.0 * T / rho, rho, options.point_cap);
  if (net.coarse.empty()) throw ConfigError("the rho-net of the domain is empty");

  std::vector<Point> ball;
  const int d = domain.dim();
  for (const auto& p : lattice_points(Domain::make(DomainKind::TangentCube, d, 4.0))) {
    // shift [0,8] x [-4,4]^(d-1) to [-4,4]^d
    LatticePoint q = p;
    q.coords[0] -= 4;
    double r2 = 0.0;
    for (auto x : q.coords) r2 += static_cast<double>(x * x);
    if (r2 <= 16.0) ball.push_back(q.to_point(rho / 4.0));
  }

  const auto mx = coupled_maxima(model, net, seed, N, options.workers);
  const auto mb = sample_maxima(model, ball, sub_seed(seed, 1), N, options.workers);
  const double U = static_cast<double>(net.coarse.size());
  const double n = static_cast<double>(N);

  std::size_t subset_violations = 0, below_c = 0, below_a = 0, ball_hits = 0;
  std::vector<double> ind_diff(N), gap(N), ball_excess(N);
  for (std::size_t r = 0; r < N; ++r) {
    subset_violations += mx.coarse[r] > mx.fine[r] ? 1 : 0;
    const bool u = mx.coarse[r] <= c;
    const bool f = mx.fine[r] <= a;
    below_c += u;
    below_a += f;
    ind_diff[r] = static_cast<double>(u) - static_cast<double>(f);
    gap[r] = mx.fine[r] - mx.coarse[r];
    ball_hits += mb[r] >= a - c ? 1 : 0;
    ball_excess[r] = std::max(mb[r] - b, 0.0);
  }
  const double pU = below_c / n, pD = below_a / n, pB = ball_hits / n;
  const auto gap_est = mean_estimate(gap);
  const auto excess_est = mean_estimate(ball_excess);
  const auto fine_est = mean_estimate(mx.fine);
  const auto coarse_est = mean_estimate(mx.coarse);

  VerifyReport rep;
  rep.suite = "lemma2";
  rep.checks.push_back(make_check("subset_max", static_cast<double>(subset_violations), 0.0, 0.0,
                                  "realizations with M(U) > M(fine net)"));
  {
    const double value = pU - pD - U * pB;
    const double sigma = std::sqrt(variance(ind_diff) / n + U * U * pB * (1.0 - pB) / n);
    rep.checks.push_back(make_check("probability_interpolation", value, 0.0, kSigmaSlack * sigma,
                                    "P(M(U)<=c) - P(M(D)<=a) - |U| P(M(B)>=a-c)"));
  }
  {
    const double value = gap_est.mean - b - U * excess_est.mean;
    const double sigma = std::sqrt(std::pow(gap_est.std_error, 2) + U * U * std::pow(excess_est.std_error, 2));
    rep.checks.push_back(make_check("mean_interpolation", value, 0.0, kSigmaSlack * sigma,
                                    "EM(D) - EM(U) - b - |U| E(M(B)-b)+"));
  }
  rep.info = {{"model", model.describe()},
              {"domain", to_string(domain.kind())},
              {"dim", d},
              {"size", domain.size()},
              {"T", T},
              {"rho", rho},
              {"a", a},
              {"c", c},
              {"b", b},
              {"seed", seed},
              {"N", N},
              {"n_fine", net.fine.size()},
              {"n_coarse", net.coarse.size()},
              {"n_ball", ball.size()},
              {"P_U_le_c", pU},
              {"P_D_le_a", pD},
              {"P_B_ge_a_minus_c", pB},
              {"EM_fine", fine_est.mean},
              {"EM_coarse", coarse_est.mean},
              {"E_ball_excess", excess_est.mean}};
  return rep;
}

namespace {

struct Cor3Point {
  double T = 0.0;
  double ratio = 0.0;
  double ratio_se = 0.0;
};

VerifyReport corollary3_single(const CovarianceModel& model, const Domain& domain, double T, double kappa,
                               std::uint64_t seed, std::size_t N, const RunOptions& options, Cor3Point& out) {
  check_count(N);
  if (!(T > 1.0)) throw ConfigError("T must exceed 1");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  const auto net = nested_net(domain, 4.0 * T, 1.0, options.point_cap);
  if (net.coarse.empty()) throw ConfigError("the lattice part of the domain is empty");

  const auto mx = coupled_maxima(model, net, seed, N, options.workers);
  const double level = std::sqrt(kappa * std::log(T));
  std::size_t subset_violations = 0, lat_hits = 0, fine_hits = 0;
  std::vector<double> gap(N), ind_diff(N);
  for (std::size_t r = 0; r < N; ++r) {
    subset_violations += mx.coarse[r] > mx.fine[r] ? 1 : 0;
    const bool l = mx.coarse[r] <= 0.0;
    const bool f = mx.fine[r] <= level;
    lat_hits += l;
    fine_hits += f;
    ind_diff[r] = static_cast<double>(l) - static_cast<double>(f);
    gap[r] = mx.fine[r] - mx.coarse[r];
  }
  const auto gap_est = mean_estimate(gap);
  const auto diff_est = mean_estimate(ind_diff);
  const double sq = std::sqrt(std::log(T));
  out.T = T;
  out.ratio = gap_est.mean / sq;
  out.ratio_se = gap_est.std_error / sq;

  VerifyReport rep;
  rep.suite = "cor3";
  rep.checks.push_back(make_check("subset_max_T=" + format_number(T),
                                  static_cast<double>(subset_violations), 0.0, 0.0,
                                  "realizations with M(lattice) > M(fine net)"));
  rep.info = {{"T", T},
              {"kappa", kappa},
              {"n_fine", net.fine.size()},
              {"n_lattice", net.coarse.size()},
              {"P_lattice_le_0", static_cast<double>(lat_hits) / N},
              {"P_fine_le_level", static_cast<double>(fine_hits) / N},
              {"level", level},
              {"residual", diff_est.mean},
              {"residual_std_error", diff_est.std_error},
              {"EM_fine", mean_estimate(mx.fine).mean},
              {"EM_lattice", mean_estimate(mx.coarse).mean},
              {"gap", gap_est.mean},
              {"gap_std_error", gap_est.std_error},
              {"gap_over_sqrt_lnT", out.ratio},
              {"gap_over_sqrt_lnT_std_error", out.ratio_se}};
  return rep;
}

}  // namespace

VerifyReport corollary3_check(const CovarianceModel& model, const Domain& domain, double T, double kappa,
                              std::uint64_t seed, std::size_t N, const RunOptions& options) {
  Cor3Point pt;
  auto rep = corollary3_single(model, domain, T, kappa, seed, N, options, pt);
  rep.info["model"] = model.describe();
  rep.info["seed"] = seed;
  rep.info["N"] = N;
  return rep;
}

VerifyReport corollary3_sweep(const CovarianceModel& model, const Domain& domain, std::span<const double> Ts,
                              double kappa, std::uint64_t seed, std::size_t N, const RunOptions& options) {
  if (Ts.empty()) throw ConfigError("corollary3_sweep needs at least one T");
  std::vector<double> sorted(Ts.begin(), Ts.end());
  std::sort(sorted.begin(), sorted.end());

  VerifyReport rep;
  rep.suite = "cor3";
  rep.info = {{"model", model.describe()}, {"seed", seed}, {"N", N}, {"kappa", kappa}};
  rep.info["scales"] = nlohmann::json::array();
  std::vector<Cor3Point> pts;
  for (double T : sorted) {
    Cor3Point pt;
    auto single = corollary3_single(model, domain, T, kappa, seed, N, options, pt);
    for (auto& c : single.checks) rep.checks.push_back(std::move(c));
    rep.info["scales"].push_back(single.info);
    pts.push_back(pt);
  }
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double value = pts[j].ratio - pts[j - 1].ratio;
    const double sigma = std::hypot(pts[j].ratio_se, pts[j - 1].ratio_se);
    rep.checks.push_back(make_check("gap_trend_T=" + format_number(pts[j].T), value, 0.0,
                                    kSigmaSlack * sigma, "increase of gap/sqrt(ln T) over the previous scale"));
  }
  return rep;
}

std::vector<Point> unit_ball_net(int dim, int refinement) {
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  if (refinement < 1) throw ConfigError("refinement must be >= 1");
  std::vector<Point> out;
  const double r2max = static_cast<double>(refinement) * refinement;
  for (const auto& p : lattice_points(Domain::make(DomainKind::TangentCube, dim, refinement))) {
    LatticePoint q = p;
    q.coords[0] -= refinement;
    double r2 = 0.0;
    for (auto x : q.coords) r2 += static_cast<double>(x * x);
    if (r2 <= r2max) out.push_back(q.to_point(1.0 / refinement));
  }
  return out;
}

VerifyReport fernique_tail_check(const CovarianceModel& model, const std::vector<Point>& net, std::uint64_t seed,
                                 std::size_t N, std::span<const double> r_grid, const RunOptions& options) {
  check_count(N);
  if (net.empty()) throw ConfigError("fernique_tail_check needs a nonempty net");
  if (r_grid.empty()) throw ConfigError("empty r grid");
  check_cap(net.size(), options.point_cap);
  std::vector<double> rs(r_grid.begin(), r_grid.end());
  std::sort(rs.begin(), rs.end());

  const auto maxima = sample_maxima(model, net, seed, N, options.workers);
  const bool degenerate = std::all_of(maxima.begin(), maxima.end(), [](double m) { return m == 0.0; });

  VerifyReport rep;
  rep.suite = "fernique";
  rep.info = {{"model", model.describe()}, {"n_points", net.size()}, {"seed", seed}, {"N", N},
              {"degenerate", degenerate}};
  rep.info["tail"] = nlohmann::json::array();

  struct Row {
    double r;
    Proportion p;
  };
  std::vector<Row> eligible;
  for (double r : rs) {
    std::size_t hits = 0;
    for (double m : maxima) hits += m >= r ? 1 : 0;
    const auto p = Proportion::from_counts(hits, N);
    const bool use = r > 0.0 && p.p_hat < 0.5 && hits >= 30;
    rep.info["tail"].push_back({{"r", r}, {"hits", hits}, {"p_hat", p.p_hat}, {"used", use}});
    if (use) eligible.push_back({r, p});
  }
  if (degenerate) return rep;
  if (eligible.size() < 2)
    throw ConfigError("insufficient tail hits: widen N or lower the r grid");

  auto log_se = [N](const Proportion& p) { return std::sqrt((1.0 - p.p_hat) / (p.p_hat * static_cast<double>(N))); };

  for (std::size_t k = eligible.size() - 2; k < eligible.size(); ++k) {
    const auto& e = eligible[k];
    rep.checks.push_back(make_check("gaussian_shape_r=" + format_number(e.r),
                                    std::log(e.p.p_hat) / (e.r * e.r), 0.0, 0.0, "log P(M>=r) / r^2 < 0"));
    rep.checks.back().passed = rep.checks.back().value < 0.0;
  }
  {
    const auto& lo = eligible.front();
    const auto& hi = eligible.back();
    const double value = -std::log(lo.p.p_hat) / lo.r + std::log(hi.p.p_hat) / hi.r;
    const double sigma = std::hypot(log_se(lo.p) / lo.r, log_se(hi.p) / hi.r);
    rep.checks.push_back(make_check("superlinear_decay", value, 0.0, kSigmaSlack * sigma,
                                    "-log P / r must grow from the smallest to the largest used r"));
  }

  std::vector<double> x, y, w;
  for (const auto& e : eligible) {
    x.push_back(e.r * e.r);
    y.push_back(std::log(e.p.p_hat));
    const double s = log_se(e.p);
    w.push_back(1.0 / (s * s));
  }
  const auto fit = weighted_linear_fit(x, y, w);
  rep.info["fit_slope"] = fit.slope;
  rep.info["fit_intercept"] = fit.intercept;
  rep.info["fitted_scale"] = fit.slope < 0.0 ? std::sqrt(-0.5 / fit.slope) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

VerifyReport chain_report(double hurst, int dim, std::int64_t n, double q, double eps, std::uint64_t seed,
                          std::size_t N, const RunOptions& options) {
  check_count(N);
  if (n < 1) throw ConfigError("chain_report needs n >= 1");
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
  const auto model = CovarianceModel::fbm(hurst);
  const auto curve = build_curve(dim, n, eps, 3);
  const std::int64_t m = static_cast<std::int64_t>(std::floor(q * static_cast<double>(n)));

  // Field points are the first visits in curve order.
  const auto fv = curve.first_visits();
  check_cap(fv.size(), options.point_cap);
  std::vector<Point> pts;
  std::vector<std::int64_t> level_of;
  std::vector<std::size_t> pos_of_index(curve.size(), EnumerationCurve::npos);
  for (std::size_t j = 0; j < fv.size(); ++j) {
    pos_of_index[fv[j]] = j;
    pts.push_back(curve.entries[fv[j]].point.to_point());
    level_of.push_back(curve.entries[fv[j]].level);
  }
  std::vector<std::size_t> entry_pos(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k)
    entry_pos[k] = pos_of_index[curve.first_index[curve.box.index(curve.entries[k].point)]];

  // Zone-2 first visits on the shells (m, n].
  std::vector<std::size_t> tracked;
  for (std::size_t i : fv) {
    const auto& e = curve.entries[i];
    if (e.level > m && e.zone == 2) tracked.push_back(i);
  }
  const std::size_t S = static_cast<std::size_t>(n - m);
  const std::size_t Z = tracked.size();

  std::vector<double> fdiff(N), shell_margin(N * S), inc(N * Z);
  std::vector<char> id_bad(N, 0), rec(N * Z, 0), shell_ok(N * S, 1);

  const FieldSampler sampler(model, pts);
  sampler.for_each(seed, 0, N, options.workers, [&](std::size_t r, std::span<const double> v) {
    std::vector<double> vals(curve.size());
    for (std::size_t k = 0; k < curve.size(); ++k) vals[k] = v[entry_pos[k]];
    const auto trace = record_trace(vals);

    std::vector<double> lvmax(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
      auto& slot = lvmax[static_cast<std::size_t>(level_of[j])];
      slot = std::max(slot, v[j]);
    }
    for (std::size_t k = 1; k < lvmax.size(); ++k) lvmax[k] = std::max(lvmax[k], lvmax[k - 1]);

    const double f = F_at_level(curve, trace, n) - F_at_level(curve, trace, m);
    const double brute = lvmax[static_cast<std::size_t>(n)] - lvmax[static_cast<std::size_t>(m)];
    fdiff[r] = f;
    id_bad[r] = std::abs(f - brute) > 1e-9 * (1.0 + std::abs(brute)) ? 1 : 0;

    for (std::size_t s = 0; s < S; ++s) {
      const auto sb = shell_increment_bound_check(curve, trace, m + 1 + static_cast<std::int64_t>(s));
      shell_margin[r * S + s] = sb.margin;
      shell_ok[r * S + s] = sb.holds ? 1 : 0;
    }
    for (std::size_t z = 0; z < Z; ++z) {
      const std::size_t i = tracked[z];
      inc[r * Z + z] = trace.increments[i];
      rec[r * Z + z] = trace.values[i] >= trace.running_max[i - 1] ? 1 : 0;
    }
  });

  VerifyReport rep;
  rep.suite = "chain";
  const double nd = static_cast<double>(n);

  std::size_t identity_bad = 0;
  for (char b : id_bad) identity_bad += static_cast<std::size_t>(b);
  rep.checks.push_back(make_check("record_identity", static_cast<double>(identity_bad), 0.0, 0.0,
                                  "realizations where F(n)-F(m) differs from M(n)-M(m)"));

  std::size_t shell_bad = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  nlohmann::json shells = nlohmann::json::array();
  for (std::size_t s = 0; s < S; ++s) {
    std::size_t bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < N; ++r) {
      bad += shell_ok[r * S + s] ? 0 : 1;
      worst = std::min(worst, shell_margin[r * S + s]);
    }
    shells.push_back({{"level", m + 1 + static_cast<std::int64_t>(s)}, {"violations", bad}, {"min_margin", worst}});
    shell_bad += bad;
    worst_margin = std::min(worst_margin, worst);
  }
  rep.checks.push_back(make_check("shell_bound", static_cast<double>(shell_bad), 0.0, 0.0,
                                  "realization-shells with increments above twice the zone-2 sum"));

  const auto report = validate_curve(curve);
  const auto* cont = report.find("containment");
  rep.checks.push_back(make_check("containment", cont && cont->passed ? 0.0 : 1.0, 0.0, 0.0,
                                  cont ? cont->detail : std::string("missing")));

  // Record probability at each tracked entry against the box persistence of
  // its level.
  std::vector<Proportion> rec_p(Z);
  std::vector<double> inc_mean(Z);
  for (std::size_t z = 0; z < Z; ++z) {
    std::size_t hits = 0;
    std::vector<double> col(N);
    for (std::size_t r = 0; r < N; ++r) {
      hits += static_cast<std::size_t>(rec[r * Z + z]);
      col[r] = inc[r * Z + z];
    }
    rec_p[z] = Proportion::from_counts(hits, N);
    inc_mean[z] = mean_estimate(col).mean;
  }
  nlohmann::json boxes = nlohmann::json::array();
  for (std::int64_t k = m + 1; k <= n; ++k) {
    const auto offsets = containment_box(dim, k, eps);
    Proportion box_p = Proportion::from_counts(N, N);
    if (!offsets.empty()) {
      std::vector<Point> bp;
      for (const auto& o : offsets) bp.push_back(o.to_point());
      check_cap(bp.size(), options.point_cap);
      const auto mb = sample_maxima(model, bp, sub_seed(seed, 100 + static_cast<std::uint64_t>(k)), N,
                                    options.workers);
      std::size_t hits = 0;
      for (double x : mb) hits += below_barrier(x, 0.0) ? 1 : 0;
      box_p = Proportion::from_counts(hits, N);
    }
    double worst = std::numeric_limits<double>::infinity();
    double worst_value = 0.0, worst_slack = 0.0, max_rec = 0.0;
    for (std::size_t z = 0; z < Z; ++z) {
      if (curve.entries[tracked[z]].level != k) continue;
      const double sigma = std::hypot(rec_p[z].std_error, box_p.std_error);
      const double margin = box_p.p_hat + kSigmaSlack * sigma - rec_p[z].p_hat;
      max_rec = std::max(max_rec, rec_p[z].p_hat);
      if (margin < worst) {
        worst = margin;
        worst_value = rec_p[z].p_hat;
        worst_slack = kSigmaSlack * sigma;
      }
    }
    boxes.push_back({{"level", k}, {"box_points", offsets.size()}, {"P_box_le_0", box_p.p_hat},
                     {"max_record_prob", max_rec}});
    if (std::isfinite(worst))
      rep.checks.push_back(make_check("record_vs_box_n=" + std::to_string(k), worst_value, box_p.p_hat, worst_slack,
                                      "record probability <= P(M(box) <= 0)"));
  }

  const double rho_n = schedule_rho(n, eps);
  double rho_mn = std::numeric_limits<double>::infinity();
  for (std::int64_t k = std::max<std::int64_t>(m, 1); k <= n; ++k) rho_mn = std::min(rho_mn, schedule_rho(k, eps));
  rep.checks.push_back(make_check("rho_floor", q * rho_n - 1.0, rho_mn, 0.0, "q rho_n - 1 <= rho_{m,n}"));

  const auto fest = mean_estimate(fdiff);
  const double max_inc = Z ? *std::max_element(inc_mean.begin(), inc_mean.end()) : 0.0;
  double max_rec = 0.0;
  for (const auto& p : rec_p) max_rec = std::max(max_rec, p.p_hat);
  const double qh = std::pow(q, hurst);

  rep.info = {{"H", hurst},
              {"dim", dim},
              {"n", n},
              {"q", q},
              {"m", m},
              {"eps", eps},
              {"seed", seed},
              {"N", N},
              {"curve_length", curve.size()},
              {"n_points", pts.size()},
              {"rho_n", rho_n},
              {"rho_mn", rho_mn},
              {"E_F_diff", fest.mean},
              {"E_F_diff_std_error", fest.std_error},
              {"min_shell_margin", S ? worst_margin : 0.0},
              {"zone2_tracked", Z},
              {"max_zone2_increment_mean", max_inc},
              {"max_record_prob", max_rec},
              {"curve_checks_all_passed", report.all_passed()}};
  if (m < n) rep.info["C_H_calibration"] = fest.mean / (std::pow(nd, hurst) * (1.0 - qh));
  if (max_inc > 0.0) rep.info["aggregation_ratio"] = fest.mean / (std::pow(nd, dim) * max_inc);
  if (n > 1) rep.info["record_scale"] = std::pow(nd, hurst - dim) / std::sqrt(std::log(nd));
  rep.info["shells"] = shells;
  rep.info["boxes"] = boxes;
  return rep;
}

}  // namespace fbmpersist
