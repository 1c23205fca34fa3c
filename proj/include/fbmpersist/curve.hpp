#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fbmpersist/geometry.hpp"

namespace fbmpersist {

/// Band parameter of shell n: L_n = max(1.5, ln(n + 2)^eps).
double schedule_Ln(std::int64_t n, double eps);

/// rho_n = n / L_n.
double schedule_rho(std::int64_t n, double eps);

/// Faces of the sup-norm shell S_n are numbered 2*axis + (negative ? 1 : 0),
/// so face 0 is +e1, face 1 is -e1, face 2 is +e2, ...
struct ShellClass {
  std::int64_t level = 0;
  int face = -1;
  int zone = 0;  // 1 = edge band, 2 = face bulk
};

/// Level (sup-norm), face and zone of a non-origin lattice point.
///
/// The face is the smallest axis with |t_axis| = level. The point is in zone
/// 2 when its sup-distance to the face centre, measured within the face, is at
/// most level * (1 - 1/L_level); otherwise zone 1.
ShellClass classify(const LatticePoint& p, double eps);

struct CurveEntry {
  LatticePoint point;
  std::int64_t level = 0;
  int face = -1;
  int zone = 0;
  bool first_visit = false;
};

/// Dense index over the lattice box [-radius, radius]^d.
class LatticeBox {
 public:
  LatticeBox() = default;
  LatticeBox(int dim, std::int64_t radius);

  bool contains(const LatticePoint& p) const;
  std::size_t index(const LatticePoint& p) const;
  std::size_t size() const { return size_; }
  int dim() const { return dim_; }
  std::int64_t radius() const { return radius_; }

 private:
  int dim_ = 0;
  std::int64_t radius_ = 0;
  std::size_t size_ = 0;
};

/// Onto walk t_0 = 0, t_1, t_2, ... over the lattice cube of sup-radius
/// n_max that first-visits shells in increasing order and, within each
/// shell, zone 1 before zone 2. Revisits act as connectors.
struct EnumerationCurve {
  int dim = 0;
  std::int64_t n_max = 0;
  double eps = 1.0;
  int step_bound = 3;
  std::vector<CurveEntry> entries;

  /// last_first_visit[n] is the curve index of the last first visit of level n
  /// (N_n); last_first_visit[0] = 0.
  std::vector<std::size_t> last_first_visit;

  /// first_index[box.index(p)] is the first curve index visiting p, or npos.
  LatticeBox box;
  std::vector<std::size_t> first_index;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t size() const { return entries.size(); }

  /// Curve indices of first visits, in order.
  std::vector<std::size_t> first_visits() const;
};

EnumerationCurve build_curve(int dim, std::int64_t n_max, double eps, int step_bound = 3);

/// Annotates an arbitrary walk; used to validate hand-made sequences.
EnumerationCurve curve_from_points(int dim, std::int64_t n_max, double eps, int step_bound,
                                   const std::vector<LatticePoint>& walk);

struct CurveCheck {
  std::string name;
  bool passed = true;
  std::optional<std::size_t> counterexample;
  std::string detail;
};

struct CurveReport {
  std::vector<CurveCheck> checks;
  double length_ratio = 0.0;  // entries / (2 n_max + 1)^d

  bool all_passed() const;
  const CurveCheck* find(const std::string& name) const;
};

/// Offsets of the containment box attached to a zone-2 point of level n on
/// the given face: 1..2rho_n steps inward along the face axis and
/// |offset| <= rho_n - 1 along every other axis.
std::vector<LatticePoint> containment_offsets(int dim, std::int64_t level, int face, double eps);

/// Canonical box [1, 2rho_n] x [-(rho_n - 1), rho_n - 1]^(d-1) as lattice
/// points (the orientation attached to face -e1).
std::vector<LatticePoint> containment_box(int dim, std::int64_t level, double eps);

/// Checks: origin start, step bound, onto-ness, first-visit level
/// monotonicity, zone ordering, annotation consistency and containment of
/// the box at every zone-2 first visit.
CurveReport validate_curve(const EnumerationCurve& curve);

/// Whether probe is in D_i = { t_k - t_i : 0 <= k <= i }.
bool difference_set_contains(const EnumerationCurve& curve, std::size_t i, const LatticePoint& probe);

void write_curve_csv(std::ostream& os, const EnumerationCurve& curve);

}  // namespace fbmpersist
