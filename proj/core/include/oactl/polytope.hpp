#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace oactl {

/// Bounded convex set { x : A x <= b } in 2 or 3 dimensions. Rows of A are
/// unit length.
struct Polytope {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd interior;  // a point inside the set
  std::optional<std::vector<Eigen::VectorXd>> vertices;

  static Polytope from_halfspaces(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd interior);
  static Polytope empty_set(int dim);

  int dim() const { return static_cast<int>(a.cols()); }
  bool empty() const { return a.rows() == 0 && interior.size() == 0; }
};

/// Convex hull of 3-D points as halfspaces. Coplanar facets are merged.
/// Empty when the points span less than a solid.
Polytope convex_hull(const std::vector<Eigen::Vector3d>& points, double tol = 1e-9);

/// True iff A f <= b + tol element-wise.
bool contains(const Polytope& polytope, const Eigen::VectorXd& f, double tol = 1e-9);

/// max d.x over the polytope (LP). Returns nullopt for an empty set.
std::optional<double> support(const Polytope& polytope, const Eigen::VectorXd& direction);

struct Interval {
  double min = 0.0;
  double max = 0.0;
};

/// Range of the last coordinate over a 3-D polytope.
std::optional<Interval> z_range(const Polytope& polytope);

/// Planar convex polygon { p : A p <= b }, non-redundant rows, CCW vertices.
struct Polygon {
  Eigen::MatrixX2d a;
  Eigen::VectorXd b;
  std::vector<Eigen::Vector2d> vertices;

  bool empty() const { return vertices.empty(); }
  bool contains(const Eigen::Vector2d& p, double tol = 1e-9) const;
};

/// Intersection of half-planes a_i . p <= b_i. Rows with near-zero normals
/// are dropped (or make the result empty when b_i < 0). The input must be
/// bounded; an unbounded or empty intersection yields an empty polygon.
Polygon intersect_halfplanes(const Eigen::MatrixX2d& a, const Eigen::VectorXd& b);

/// { (x, y) : (x, y, z) in polytope } with redundant rows removed. Empty when
/// z lies outside the polytope's z-range.
Polygon plane_slice(const Polytope& polytope3d, double z);

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<int>> faces;  // 0-based, CCW seen from outside
};

/// Vertices and faces of a bounded 3-D polytope, face by face.
Mesh polytope_mesh(const Polytope& polytope3d);

void write_obj(std::ostream& out, const Mesh& mesh);
void write_obj(std::ostream& out, const Polygon& polygon, double z);

}  // namespace oactl
