#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

namespace fbmpersist {

/// A point of R^d.
struct Point {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const Point&) const = default;
};

/// A point of Z^d.
struct LatticePoint {
  std::vector<std::int64_t> coords;

  std::size_t dim() const { return coords.size(); }
  std::int64_t operator[](std::size_t i) const { return coords[i]; }
  auto operator<=>(const LatticePoint&) const = default;

  Point to_point(double spacing = 1.0) const;
};

double euclidean_norm(const Point& p);
double euclidean_distance(const Point& a, const Point& b);
std::int64_t sup_norm(const LatticePoint& p);
std::int64_t sup_distance(const LatticePoint& a, const LatticePoint& b);

enum class DomainKind { TangentBall, TangentCube };

const char* to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Closed convex domain touching the origin, tangent there to {t1 = 0} and
/// lying in the half-space t1 >= 0.
///
/// TangentBall(r) is the ball of radius r centred at r*e1; TangentCube(h) is
/// [0, 2h] x [-h, h]^(d-1). The scale factor T dilates about the origin, so
/// the effective size is size() * scale().
class Domain {
 public:
  static Domain make(DomainKind kind, int dim, double size);

  Domain scaled(double factor) const;

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double size() const { return size_; }
  double scale() const { return scale_; }
  double extent() const { return size_ * scale_; }

  /// Membership in the closed domain with a relative tolerance of 1e-12.
  bool contains(const Point& p) const;

  /// Lebesgue volume of the scaled domain.
  double volume() const;

  bool operator==(const Domain&) const = default;

 private:
  Domain(DomainKind kind, int dim, double size, double scale)
      : kind_(kind), dim_(dim), size_(size), scale_(scale) {}

  DomainKind kind_;
  int dim_;
  double size_;
  double scale_;
};

inline constexpr double kMembershipTolerance = 1e-12;

/// Integer points of the closed domain in lexicographic order.
std::vector<LatticePoint> lattice_points(const Domain& domain);

/// Points of (1/refinement) Z^d inside the domain, lexicographic order.
/// refinement = 1 gives the integer lattice.
std::vector<Point> net_points(const Domain& domain, int refinement);

/// Inscribed tangent ball and circumscribed tangent cube.
std::pair<Domain, Domain> sandwich(const Domain& domain);

void write_points_csv(std::ostream& os, const std::vector<LatticePoint>& points);

}  // namespace fbmpersist
