#include "oactl/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <utility>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Geometry>

#include "oactl/linprog.hpp"

namespace oactl {

namespace {

constexpr double kBox = 1e6;

struct HalfPlane {
  Eigen::Vector2d n;  // unit outward normal
  double c;           // n . p <= c
  Eigen::Vector2d dir;
  double angle;
  bool box;
};

double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u.x() * v.y() - u.y() * v.x(); }

Eigen::Vector2d intersect(const HalfPlane& h1, const HalfPlane& h2) {
  Eigen::Matrix2d m;
  m << h1.n.transpose(), h2.n.transpose();
  return m.inverse() * Eigen::Vector2d(h1.c, h2.c);
}

bool outside(const HalfPlane& h, const Eigen::Vector2d& p) { return h.n.dot(p) > h.c + 1e-12 * (1.0 + std::abs(h.c)); }

double polygon_area(const std::vector<Eigen::Vector2d>& v) {
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) area += cross2(v[i], v[(i + 1) % v.size()]);
  return 0.5 * area;
}

}  // namespace

Polytope Polytope::from_halfspaces(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd interior) {
  if (a.rows() != b.size() || a.cols() != interior.size()) {
    throw std::invalid_argument("Polytope: inconsistent dimensions");
  }
  Polytope p;
  Eigen::Index kept = 0;
  p.a.resize(a.rows(), a.cols());
  p.b.resize(b.size());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double len = a.row(r).norm();
    if (len < 1e-12) continue;
    p.a.row(kept) = a.row(r) / len;
    p.b[kept] = b[r] / len;
    ++kept;
  }
  p.a.conservativeResize(kept, a.cols());
  p.b.conservativeResize(kept);
  p.interior = std::move(interior);
  return p;
}

Polytope Polytope::empty_set(int dim) {
  Polytope p;
  p.a.resize(0, dim);
  p.b.resize(0);
  return p;
}

namespace {

struct HullFace {
  int a, b, c;
  Eigen::Vector3d n;
  double d;
};

// Outward unit normal, using `inside` to pick the orientation.
HullFace make_face(const std::vector<Eigen::Vector3d>& p, int a, int b, int c, const Eigen::Vector3d& inside) {
  Eigen::Vector3d n = (p[b] - p[a]).cross(p[c] - p[a]);
  if (n.dot(inside - p[a]) > 0.0) {
    std::swap(b, c);
    n = -n;
  }
  n.normalize();
  return {a, b, c, n, n.dot(p[a])};
}

}  // namespace

Polytope convex_hull(const std::vector<Eigen::Vector3d>& points, double tol) {
  std::vector<Eigen::Vector3d> p;
  double scale = 1.0;
  for (const auto& q : points) scale = std::max(scale, q.cwiseAbs().maxCoeff());
  const double eps = tol * scale;
  for (const auto& q : points) {
    if (std::none_of(p.begin(), p.end(), [&](const Eigen::Vector3d& r) { return (r - q).norm() <= eps; })) {
      p.push_back(q);
    }
  }
  if (p.size() < 4) return Polytope::empty_set(3);

  // Initial tetrahedron from extreme points.
  const int n = static_cast<int>(p.size());
  auto farthest = [&](auto&& dist) {
    int best = -1;
    double value = -1.0;
    for (int i = 0; i < n; ++i) {
      const double v = dist(p[i]);
      if (v > value) {
        value = v;
        best = i;
      }
    }
    return std::make_pair(best, value);
  };
  const int i0 = 0;
  const int i1 = farthest([&](const Eigen::Vector3d& q) { return (q - p[i0]).norm(); }).first;
  const Eigen::Vector3d axis = (p[i1] - p[i0]).normalized();
  const auto [i2, off_line] = farthest([&](const Eigen::Vector3d& q) { return (q - p[i0]).cross(axis).norm(); });
  if (off_line <= eps) return Polytope::empty_set(3);
  const Eigen::Vector3d normal = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  const auto [i3, off_plane] = farthest([&](const Eigen::Vector3d& q) { return std::abs(normal.dot(q - p[i0])); });
  if (off_plane <= eps) return Polytope::empty_set(3);

  const Eigen::Vector3d inside = 0.25 * (p[i0] + p[i1] + p[i2] + p[i3]);
  std::vector<HullFace> faces{make_face(p, i0, i1, i2, inside), make_face(p, i0, i1, i3, inside),
                              make_face(p, i0, i2, i3, inside), make_face(p, i1, i2, i3, inside)};

  for (int k = 0; k < n; ++k) {
    if (k == i0 || k == i1 || k == i2 || k == i3) continue;
    std::set<std::pair<int, int>> edges;
    std::vector<HullFace> kept;
    for (const auto& f : faces) {
      if (f.n.dot(p[k]) - f.d > eps) {
        edges.insert({f.a, f.b});
        edges.insert({f.b, f.c});
        edges.insert({f.c, f.a});
      } else {
        kept.push_back(f);
      }
    }
    if (edges.empty()) continue;
    for (const auto& [u, v] : edges) {
      if (!edges.count({v, u})) kept.push_back(make_face(p, u, v, k, inside));
    }
    faces = std::move(kept);
  }

  // Merge coplanar triangles into one row.
  std::vector<std::pair<Eigen::Vector3d, double>> rows;
  for (const auto& f : faces) {
    const bool dup = std::any_of(rows.begin(), rows.end(), [&](const auto& r) {
      return (r.first - f.n).norm() <= 1e-9 && std::abs(r.second - f.d) <= eps;
    });
    if (!dup) rows.emplace_back(f.n, f.d);
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
    b[static_cast<Eigen::Index>(i)] = rows[i].second;
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& q : p) centroid += q;
  centroid /= static_cast<double>(n);
  return Polytope::from_halfspaces(std::move(a), std::move(b), centroid);
}

bool contains(const Polytope& polytope, const Eigen::VectorXd& f, double tol) {
  if (polytope.empty()) return false;
  if (f.size() != polytope.dim()) throw std::invalid_argument("contains: dimension mismatch");
  return ((polytope.a * f - polytope.b).array() <= tol).all();
}

std::optional<double> support(const Polytope& polytope, const Eigen::VectorXd& direction) {
  if (polytope.empty()) return std::nullopt;
  const Eigen::Index n = polytope.dim();
  LinearProgram lp = LinearProgram::with_variables(n);
  lp.c = -direction;
  lp.a_ub = polytope.a;
  lp.b_ub = polytope.b;
  lp.lower.setConstant(-std::numeric_limits<double>::infinity());
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  return -r.objective;
}

std::optional<Interval> z_range(const Polytope& polytope) {
  if (polytope.dim() != 3) throw std::invalid_argument("z_range: polytope must be 3-D");
  const auto hi = support(polytope, Eigen::Vector3d::UnitZ());
  const auto lo = support(polytope, -Eigen::Vector3d::UnitZ());
  if (!hi || !lo) return std::nullopt;
  return Interval{-*lo, *hi};
}

bool Polygon::contains(const Eigen::Vector2d& p, double tol) const {
  if (empty()) return false;
  return ((a * p - b).array() <= tol).all();
}

Polygon intersect_halfplanes(const Eigen::MatrixX2d& a, const Eigen::VectorXd& b) {
  Polygon out;
  out.a.resize(0, 2);
  out.b.resize(0);

  std::vector<HalfPlane> planes;
  planes.reserve(static_cast<std::size_t>(a.rows()) + 4);
  auto add = [&](const Eigen::Vector2d& n, double c, bool box) {
    const Eigen::Vector2d dir(-n.y(), n.x());
    planes.push_back({n, c, dir, std::atan2(dir.y(), dir.x()), box});
  };
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const Eigen::Vector2d n = a.row(r).transpose();
    const double len = n.norm();
    if (len < 1e-12) {
      if (b[r] < -1e-12) return out;
      continue;
    }
    add(n / len, b[r] / len, false);
  }
  add({1, 0}, kBox, true);
  add({-1, 0}, kBox, true);
  add({0, 1}, kBox, true);
  add({0, -1}, kBox, true);

  std::sort(planes.begin(), planes.end(), [](const HalfPlane& l, const HalfPlane& r) {
    if (std::abs(l.angle - r.angle) > 1e-12) return l.angle < r.angle;
    return l.c < r.c;
  });
  std::vector<HalfPlane> unique;
  for (const auto& h : planes) {
    if (!unique.empty() && std::abs(unique.back().angle - h.angle) <= 1e-12) continue;
    unique.push_back(h);
  }

  std::deque<HalfPlane> dq;
  for (const auto& h : unique) {
    while (dq.size() >= 2 && outside(h, intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) dq.pop_back();
    while (dq.size() >= 2 && outside(h, intersect(dq[0], dq[1]))) dq.pop_front();
    if (!dq.empty() && std::abs(cross2(dq.back().dir, h.dir)) < 1e-14) {
      // Anti-parallel neighbours: disjoint strip means empty.
      if (dq.back().dir.dot(h.dir) < 0.0 && h.c + dq.back().c < 0.0) return out;
    }
    dq.push_back(h);
  }
  while (dq.size() >= 3 && outside(dq[0], intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) dq.pop_back();
  while (dq.size() >= 3 && outside(dq[dq.size() - 1], intersect(dq[0], dq[1]))) dq.pop_front();
  if (dq.size() < 3) return out;

  std::vector<Eigen::Vector2d> verts;
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const auto& h1 = dq[i];
    const auto& h2 = dq[(i + 1) % dq.size()];
    if (std::abs(cross2(h1.dir, h2.dir)) < 1e-14) return out;
    verts.push_back(intersect(h1, h2));
  }
  // Verify against every input row; the deque pass is not a proof of
  // non-emptiness.
  const double scale = 1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  for (const auto& v : verts) {
    for (const auto& h : unique) {
      if (h.n.dot(v) > h.c + 1e-9 * scale) return out;
    }
  }
  if (polygon_area(verts) <= 1e-14 * scale * scale) return out;
  for (const auto& h : dq) {
    if (h.box) return out;  // unbounded input
  }

  out.a.resize(static_cast<Eigen::Index>(dq.size()), 2);
  out.b.resize(static_cast<Eigen::Index>(dq.size()));
  for (std::size_t i = 0; i < dq.size(); ++i) {
    out.a.row(static_cast<Eigen::Index>(i)) = dq[i].n.transpose();
    out.b[static_cast<Eigen::Index>(i)] = dq[i].c;
  }
  out.vertices = std::move(verts);
  return out;
}

Polygon plane_slice(const Polytope& polytope3d, double z) {
  if (polytope3d.dim() != 3) throw std::invalid_argument("plane_slice: polytope must be 3-D");
  if (polytope3d.empty()) return intersect_halfplanes(Eigen::MatrixX2d(0, 2), Eigen::VectorXd(0));
  const Eigen::MatrixX2d a_xy = polytope3d.a.leftCols<2>();
  const Eigen::VectorXd b_xy = polytope3d.b - polytope3d.a.col(2) * z;
  return intersect_halfplanes(a_xy, b_xy);
}

Mesh polytope_mesh(const Polytope& polytope3d) {
  if (polytope3d.dim() != 3) throw std::invalid_argument("polytope_mesh: polytope must be 3-D");
  Mesh mesh;
  const Eigen::Index k = polytope3d.a.rows();
  auto vertex_id = [&](const Eigen::Vector3d& p) {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      if ((mesh.vertices[i] - p).norm() < 1e-7) return static_cast<int>(i);
    }
    mesh.vertices.push_back(p);
    return static_cast<int>(mesh.vertices.size() - 1);
  };

  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Vector3d n = polytope3d.a.row(i).transpose();
    const Eigen::Vector3d helper = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = n.cross(helper).normalized();
    const Eigen::Vector3d e2 = n.cross(e1);  // e1 x e2 = n
    const Eigen::Vector3d origin = n * polytope3d.b[i];

    Eigen::MatrixX2d a2(k - 1, 2);
    Eigen::VectorXd b2(k - 1);
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == i) continue;
      const Eigen::Vector3d nj = polytope3d.a.row(j).transpose();
      a2(r, 0) = nj.dot(e1);
      a2(r, 1) = nj.dot(e2);
      b2[r] = polytope3d.b[j] - nj.dot(origin);
      ++r;
    }
    const Polygon face = intersect_halfplanes(a2, b2);
    if (face.vertices.size() < 3) continue;
    std::vector<int> ids;
    for (const auto& v : face.vertices) {
      const int id = vertex_id(origin + v.x() * e1 + v.y() * e2);
      if (ids.empty() || (ids.back() != id && ids.front() != id)) ids.push_back(id);
    }
    if (ids.size() >= 3) mesh.faces.push_back(std::move(ids));
  }
  return mesh;
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  out.precision(10);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) {
    out << 'f';
    for (int id : f) out << ' ' << id + 1;
    out << '\n';
  }
}

void write_obj(std::ostream& out, const Polygon& polygon, double z) {
  out.precision(10);
  for (const auto& v : polygon.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << z << '\n';
  if (polygon.vertices.size() >= 3) {
    out << 'f';
    for (std::size_t i = 0; i < polygon.vertices.size(); ++i) out << ' ' << i + 1;
    out << '\n';
  }
}

}  // namespace oactl
