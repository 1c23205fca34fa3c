#include "fbmpersist/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

namespace {

constexpr double kZoneTolerance = 1e-12;

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

std::int64_t squared_distance(const LatticePoint& a, const LatticePoint& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const auto diff = a.coords[i] - b.coords[i];
    s += diff * diff;
  }
  return s;
}

LatticePoint add(const LatticePoint& a, const LatticePoint& b) {
  LatticePoint out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
  return out;
}

// Calls f on every point of [-r, r]^d in lexicographic order.
template <class F>
void for_each_in_cube(int dim, std::int64_t r, F&& f) {
  LatticePoint p{std::vector<std::int64_t>(dim, -r)};
  while (true) {
    f(p);
    int k = dim - 1;
    while (k >= 0 && p.coords[k] == r) {
      p.coords[k] = -r;
      --k;
    }
    if (k < 0) return;
    ++p.coords[k];
  }
}

// Boustrophedon order over the free coordinates of one face.
bool serpentine_less(const LatticePoint& a, const LatticePoint& b, int fixed_axis) {
  std::int64_t parity_a = 0;
  std::int64_t parity_b = 0;
  for (int i = 0; i < static_cast<int>(a.dim()); ++i) {
    if (i == fixed_axis) continue;
    const auto ua = (parity_a & 1) ? -a.coords[i] : a.coords[i];
    const auto ub = (parity_b & 1) ? -b.coords[i] : b.coords[i];
    if (ua != ub) return ua < ub;
    parity_a += a.coords[i];
    parity_b += b.coords[i];
  }
  return false;
}

class CurveBuilder {
 public:
  CurveBuilder(int dim, std::int64_t n_max, double eps, int step_bound) {
    curve_.dim = dim;
    curve_.n_max = n_max;
    curve_.eps = eps;
    curve_.step_bound = step_bound;
    curve_.box = LatticeBox(dim, n_max);
    curve_.first_index.assign(curve_.box.size(), EnumerationCurve::npos);
    curve_.last_first_visit.assign(static_cast<std::size_t>(n_max) + 1, 0);
  }

  EnumerationCurve build() {
    const int d = curve_.dim;
    append(LatticePoint{std::vector<std::int64_t>(d, 0)});

    for (std::int64_t n = 1; n <= curve_.n_max; ++n) {
      std::vector<LatticePoint> zone1;
      std::vector<std::vector<LatticePoint>> zone2(2 * d);
      for_each_in_cube(d, n, [&](const LatticePoint& p) {
        if (sup_norm(p) != n) return;
        const auto c = classify(p, curve_.eps);
        if (c.zone == 1)
          zone1.push_back(p);
        else
          zone2[c.face].push_back(p);
      });

      for (const auto& target : greedy_order(std::move(zone1))) move_to(target, n);
      for (int face = 0; face < 2 * d; ++face) {
        auto& pts = zone2[face];
        std::sort(pts.begin(), pts.end(), [axis = face / 2](const LatticePoint& a, const LatticePoint& b) {
          return serpentine_less(a, b, axis);
        });
        for (const auto& target : pts) move_to(target, n);
      }
    }
    return std::move(curve_);
  }

 private:
  void append(const LatticePoint& p) {
    CurveEntry e;
    e.point = p;
    if (sup_norm(p) != 0) {
      const auto c = classify(p, curve_.eps);
      e.level = c.level;
      e.face = c.face;
      e.zone = c.zone;
    }
    auto& slot = curve_.first_index[curve_.box.index(p)];
    e.first_visit = (slot == EnumerationCurve::npos);
    const std::size_t i = curve_.entries.size();
    if (e.first_visit) {
      slot = i;
      curve_.last_first_visit[static_cast<std::size_t>(e.level)] = i;
    }
    curve_.entries.push_back(std::move(e));
  }

  const LatticePoint& current() const { return curve_.entries.back().point; }

  // Jumps straight to the target when within the step bound; otherwise walks
  // through the solid cube of sup-radius n-1, which is fully visited by the
  // time shell n is being covered.
  void move_to(const LatticePoint& target, std::int64_t n) {
    const std::int64_t L = curve_.step_bound;
    if (sup_distance(current(), target) <= L) {
      append(target);
      return;
    }
    LatticePoint anchor = target;
    for (auto& c : anchor.coords) c = std::clamp(c, -(n - 1), n - 1);

    LatticePoint w = current();
    while (sup_distance(w, target) > L) {
      for (std::size_t k = 0; k < w.coords.size(); ++k) {
        const auto diff = anchor.coords[k] - w.coords[k];
        w.coords[k] += std::clamp(diff, -L, L);
      }
      append(w);
    }
    append(target);
  }

  std::vector<LatticePoint> greedy_order(std::vector<LatticePoint> pts) const {
    std::vector<LatticePoint> out;
    out.reserve(pts.size());
    LatticePoint cur = current();
    while (!pts.empty()) {
      std::size_t best = 0;
      auto best_key = std::make_tuple(std::numeric_limits<std::int64_t>::max(),
                                      std::numeric_limits<std::int64_t>::max());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto key = std::make_tuple(sup_distance(cur, pts[i]), squared_distance(cur, pts[i]));
        if (key < best_key || (key == best_key && pts[i] < pts[best])) {
          best_key = key;
          best = i;
        }
      }
      cur = pts[best];
      out.push_back(cur);
      pts[best] = std::move(pts.back());
      pts.pop_back();
    }
    return out;
  }

  EnumerationCurve curve_;
};

}  // namespace

double schedule_Ln(std::int64_t n, double eps) {
  if (n < 1) throw ConfigError("schedule_Ln needs n >= 1");
  if (!(eps > 0.0)) throw ConfigError("schedule exponent must be positive");
  return std::max(1.5, std::pow(std::log(static_cast<double>(n) + 2.0), eps));
}

double schedule_rho(std::int64_t n, double eps) { return static_cast<double>(n) / schedule_Ln(n, eps); }

ShellClass classify(const LatticePoint& p, double eps) {
  const auto level = sup_norm(p);
  if (level == 0) throw ConfigError("the origin has no shell level");
  ShellClass c;
  c.level = level;
  int axis = 0;
  while (iabs(p.coords[axis]) != level) ++axis;
  c.face = 2 * axis + (p.coords[axis] < 0 ? 1 : 0);

  std::int64_t within = 0;
  for (int i = 0; i < static_cast<int>(p.dim()); ++i)
    if (i != axis) within = std::max(within, iabs(p.coords[i]));
  const double n = static_cast<double>(level);
  const double threshold = n * (1.0 - 1.0 / schedule_Ln(level, eps));
  c.zone = (static_cast<double>(within) <= threshold + kZoneTolerance * n) ? 2 : 1;
  return c;
}

LatticeBox::LatticeBox(int dim, std::int64_t radius) : dim_(dim), radius_(radius) {
  size_ = 1;
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(2 * radius + 1);
}

bool LatticeBox::contains(const LatticePoint& p) const {
  if (static_cast<int>(p.dim()) != dim_) return false;
  for (auto c : p.coords)
    if (iabs(c) > radius_) return false;
  return true;
}

std::size_t LatticeBox::index(const LatticePoint& p) const {
  std::size_t idx = 0;
  const auto side = static_cast<std::size_t>(2 * radius_ + 1);
  for (auto c : p.coords) idx = idx * side + static_cast<std::size_t>(c + radius_);
  return idx;
}

std::vector<std::size_t> EnumerationCurve::first_visits() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].first_visit) out.push_back(i);
  return out;
}

EnumerationCurve build_curve(int dim, std::int64_t n_max, double eps, int step_bound) {
  if (dim < 1) throw ConfigError("curve dimension must be >= 1");
  if (n_max < 1) throw ConfigError("curve n_max must be >= 1");
  if (!(eps > 0.0)) throw ConfigError("curve schedule exponent must be positive");
  if (step_bound < 2) throw ConfigError("curve step bound must be >= 2");
  return CurveBuilder(dim, n_max, eps, step_bound).build();
}

EnumerationCurve curve_from_points(int dim, std::int64_t n_max, double eps, int step_bound,
                                   const std::vector<LatticePoint>& walk) {
  EnumerationCurve c;
  c.dim = dim;
  c.n_max = n_max;
  c.eps = eps;
  c.step_bound = step_bound;
  std::int64_t radius = n_max;
  for (const auto& p : walk) {
    if (static_cast<int>(p.dim()) != dim) throw ConfigError("walk point has the wrong dimension");
    radius = std::max(radius, sup_norm(p));
  }
  c.box = LatticeBox(dim, radius);
  c.first_index.assign(c.box.size(), EnumerationCurve::npos);
  c.last_first_visit.assign(static_cast<std::size_t>(radius) + 1, 0);
  for (std::size_t i = 0; i < walk.size(); ++i) {
    CurveEntry e;
    e.point = walk[i];
    if (sup_norm(e.point) != 0) {
      const auto cls = classify(e.point, eps);
      e.level = cls.level;
      e.face = cls.face;
      e.zone = cls.zone;
    }
    auto& slot = c.first_index[c.box.index(e.point)];
    e.first_visit = slot == EnumerationCurve::npos;
    if (e.first_visit) {
      slot = i;
      c.last_first_visit[static_cast<std::size_t>(e.level)] = i;
    }
    c.entries.push_back(std::move(e));
  }
  return c;
}

bool CurveReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CurveCheck& c) { return c.passed; });
}

const CurveCheck* CurveReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<LatticePoint> containment_offsets(int dim, std::int64_t level, int face, double eps) {
  const double rho = schedule_rho(level, eps);
  const int axis = face / 2;
  const std::int64_t inward = (face % 2 == 0) ? -1 : 1;
  const auto depth = static_cast<std::int64_t>(std::floor(2.0 * rho + kZoneTolerance));
  const auto half = static_cast<std::int64_t>(std::floor(rho - 1.0 + kZoneTolerance));

  std::vector<LatticePoint> out;
  if (depth < 1 || (dim > 1 && half < 0)) return out;
  LatticePoint off{std::vector<std::int64_t>(dim, 0)};
  // Odometer over the depth along the axis and [-half, half] elsewhere.
  std::vector<std::int64_t> lo(dim, -half), hi(dim, half);
  lo[axis] = 1;
  hi[axis] = depth;
  off.coords = lo;
  while (true) {
    LatticePoint p = off;
    p.coords[axis] *= inward;
    out.push_back(std::move(p));
    int k = dim - 1;
    while (k >= 0 && off.coords[k] == hi[k]) {
      off.coords[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++off.coords[k];
  }
  return out;
}

std::vector<LatticePoint> containment_box(int dim, std::int64_t level, double eps) {
  return containment_offsets(dim, level, /*face=-e1*/ 1, eps);
}

CurveReport validate_curve(const EnumerationCurve& curve) {
  CurveReport report;
  const auto& E = curve.entries;
  const int d = curve.dim;

  auto fail = [](CurveCheck& c, std::size_t index, std::string detail) {
    if (!c.passed) return;
    c.passed = false;
    c.counterexample = index;
    c.detail = std::move(detail);
  };

  CurveCheck origin{"origin_start"};
  if (E.empty() || sup_norm(E.front().point) != 0) fail(origin, 0, "curve does not start at the origin");

  std::int64_t radius = curve.n_max;
  for (const auto& e : E) radius = std::max(radius, sup_norm(e.point));
  const LatticeBox box(d, radius);
  std::vector<std::size_t> first(box.size(), EnumerationCurve::npos);

  CurveCheck step{"step_bound"};
  CurveCheck annotations{"annotations"};
  CurveCheck monotone{"level_monotone"};
  CurveCheck zones{"zone_order"};
  std::int64_t last_level = 0;
  bool zone2_seen = false;

  for (std::size_t i = 0; i < E.size(); ++i) {
    const auto& p = E[i].point;
    if (i + 1 < E.size()) {
      const auto s = sup_distance(p, E[i + 1].point);
      if (s < 1 || s > curve.step_bound) {
        std::ostringstream os;
        os << "step " << i << "->" << i + 1 << " has sup-norm " << s << " (bound " << curve.step_bound << ")";
        fail(step, i, os.str());
      }
    }

    auto& slot = first[box.index(p)];
    const bool is_first = slot == EnumerationCurve::npos;
    if (is_first) slot = i;

    ShellClass cls;
    if (sup_norm(p) != 0) cls = classify(p, curve.eps);
    if (E[i].level != cls.level || E[i].face != cls.face || E[i].zone != cls.zone ||
        E[i].first_visit != is_first)
      fail(annotations, i, "stored level/face/zone/first_visit disagree with recomputation");

    if (!is_first) continue;
    if (cls.level < last_level) {
      std::ostringstream os;
      os << "first visit of level " << cls.level << " after level " << last_level;
      fail(monotone, i, os.str());
    }
    if (cls.level > last_level) zone2_seen = false;
    last_level = std::max(last_level, cls.level);
    if (cls.level == last_level) {
      if (cls.zone == 2) zone2_seen = true;
      if (cls.zone == 1 && zone2_seen) fail(zones, i, "zone-1 first visit after a zone-2 first visit");
    }
  }

  CurveCheck onto{"onto"};
  for_each_in_cube(d, curve.n_max, [&](const LatticePoint& p) {
    if (!onto.passed) return;
    if (first[box.index(p)] == EnumerationCurve::npos) {
      std::ostringstream os;
      os << "lattice point (";
      for (std::size_t k = 0; k < p.coords.size(); ++k) os << (k ? "," : "") << p.coords[k];
      os << ") never visited";
      fail(onto, E.size(), os.str());
    }
  });

  CurveCheck contain{"containment"};
  for (std::size_t i = 0; i < E.size() && contain.passed; ++i) {
    const auto& p = E[i].point;
    if (first[box.index(p)] != i || sup_norm(p) == 0) continue;
    const auto cls = classify(p, curve.eps);
    if (cls.zone != 2) continue;
    for (const auto& off : containment_offsets(d, cls.level, cls.face, curve.eps)) {
      const auto q = add(p, off);
      if (!box.contains(q) || first[box.index(q)] >= i) {
        fail(contain, i, "containment box point not visited before this zone-2 first visit");
        break;
      }
    }
  }

  report.checks = {origin, step, onto, monotone, zones, annotations, contain};
  const double cube = std::pow(2.0 * static_cast<double>(curve.n_max) + 1.0, d);
  report.length_ratio = static_cast<double>(E.size()) / cube;
  return report;
}

bool difference_set_contains(const EnumerationCurve& curve, std::size_t i, const LatticePoint& probe) {
  if (i >= curve.entries.size()) throw ConfigError("curve index out of range");
  const auto q = add(curve.entries[i].point, probe);
  if (!curve.box.contains(q)) return false;
  const auto k = curve.first_index[curve.box.index(q)];
  return k != EnumerationCurve::npos && k <= i;
}

void write_curve_csv(std::ostream& os, const EnumerationCurve& curve) {
  os << "index";
  for (int k = 0; k < curve.dim; ++k) os << ",t" << (k + 1);
  os << ",level,face,zone,first_visit\n";
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    const auto& e = curve.entries[i];
    os << i;
    for (auto c : e.point.coords) os << ',' << c;
    os << ',' << e.level << ',' << e.face << ',' << e.zone << ',' << (e.first_visit ? 1 : 0) << '\n';
  }
}

}  // namespace fbmpersist
