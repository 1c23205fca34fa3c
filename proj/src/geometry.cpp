#include "fbmpersist/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

Point LatticePoint::to_point(double spacing) const {
  Point p;
  p.coords.reserve(coords.size());
  for (auto c : coords) p.coords.push_back(static_cast<double>(c) * spacing);
  return p;
}

double euclidean_norm(const Point& p) {
  double s = 0.0;
  for (double x : p.coords) s += x * x;
  return std::sqrt(s);
}

double euclidean_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double diff = a.coords[i] - b.coords[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

std::int64_t sup_norm(const LatticePoint& p) {
  std::int64_t m = 0;
  for (auto c : p.coords) m = std::max(m, c < 0 ? -c : c);
  return m;
}

std::int64_t sup_distance(const LatticePoint& a, const LatticePoint& b) {
  std::int64_t m = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const auto diff = a.coords[i] - b.coords[i];
    m = std::max(m, diff < 0 ? -diff : diff);
  }
  return m;
}

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::TangentBall:
      return "ball";
    case DomainKind::TangentCube:
      return "cube";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "ball" || name == "tangent_ball") return DomainKind::TangentBall;
  if (name == "cube" || name == "tangent_cube") return DomainKind::TangentCube;
  throw ConfigError("unknown domain kind '" + name + "' (expected ball or cube)");
}

Domain Domain::make(DomainKind kind, int dim, double size) {
  if (dim < 1) throw ConfigError("domain dimension must be >= 1");
  if (!(size > 0.0) || !std::isfinite(size)) throw ConfigError("domain size must be positive");
  return Domain(kind, dim, size, 1.0);
}

Domain Domain::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ConfigError("scale factor must be positive");
  return Domain(kind_, dim_, size_, scale_ * factor);
}

bool Domain::contains(const Point& p) const {
  if (static_cast<int>(p.dim()) != dim_) return false;
  const double e = extent();
  switch (kind_) {
    case DomainKind::TangentBall: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double diff = p.coords[i] - (i == 0 ? e : 0.0);
        s += diff * diff;
      }
      return s - e * e <= kMembershipTolerance * std::max(1.0, e * e);
    }
    case DomainKind::TangentCube: {
      const double tol = kMembershipTolerance * std::max(1.0, e);
      if (p.coords[0] < -tol || p.coords[0] > 2.0 * e + tol) return false;
      for (int i = 1; i < dim_; ++i)
        if (std::abs(p.coords[i]) > e + tol) return false;
      return true;
    }
  }
  return false;
}

double Domain::volume() const {
  const double e = extent();
  if (kind_ == DomainKind::TangentCube) return std::pow(2.0 * e, dim_);
  const double half = 0.5 * dim_;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(e, dim_);
}

std::vector<LatticePoint> lattice_points(const Domain& domain) {
  const int d = domain.dim();
  const double e = domain.extent();
  const double slack = kMembershipTolerance * std::max(1.0, e);

  std::vector<std::int64_t> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    const double a = (i == 0) ? 0.0 : -e;
    const double b = (i == 0) ? 2.0 * e : e;
    lo[i] = static_cast<std::int64_t>(std::ceil(a - slack));
    hi[i] = static_cast<std::int64_t>(std::floor(b + slack));
  }

  std::vector<LatticePoint> out;
  LatticePoint cur{lo};
  // Odometer with the last coordinate fastest gives lexicographic order.
  while (true) {
    if (domain.contains(cur.to_point())) out.push_back(cur);
    int k = d - 1;
    while (k >= 0 && cur.coords[k] == hi[k]) {
      cur.coords[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++cur.coords[k];
  }
  return out;
}

std::vector<Point> net_points(const Domain& domain, int refinement) {
  if (refinement < 1) throw ConfigError("net refinement must be >= 1");
  const auto lattice = lattice_points(domain.scaled(refinement));
  std::vector<Point> out;
  out.reserve(lattice.size());
  const double spacing = 1.0 / refinement;
  for (const auto& p : lattice) out.push_back(p.to_point(spacing));
  return out;
}

std::pair<Domain, Domain> sandwich(const Domain& domain) {
  const int d = domain.dim();
  const double s = domain.size();
  const double T = domain.scale();
  const auto ball = Domain::make(DomainKind::TangentBall, d, s).scaled(T);
  const auto cube = Domain::make(DomainKind::TangentCube, d, s).scaled(T);
  return {ball, cube};
}

void write_points_csv(std::ostream& os, const std::vector<LatticePoint>& points) {
  if (points.empty()) return;
  const auto d = points.front().dim();
  for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << "t" << (i + 1);
  os << '\n';
  for (const auto& p : points) {
    for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << p.coords[i];
    os << '\n';
  }
}

}  // namespace fbmpersist
