#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "feti_lab/error.hpp"
#include "feti_lab/mesh.hpp"

namespace feti_lab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// P1 stiffness matrix ∫ ∇φ_a · ∇φ_b of one triangle.
inline Eigen::Matrix3d local_stiffness(const std::array<Point, 3>& v) {
  const double det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
  double longest = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& p = v[a];
    const auto& q = v[(a + 1) % 3];
    longest = std::max(longest, std::hypot(q[0] - p[0], q[1] - p[1]));
  }
  if (!(std::abs(det) > 1e-14 * longest * longest)) throw InvalidArgument("local_stiffness: degenerate triangle");

  std::array<double, 3> b{}, c{};
  for (int a = 0; a < 3; ++a) {
    const auto& p = v[(a + 1) % 3];
    const auto& q = v[(a + 2) % 3];
    b[a] = p[1] - q[1];
    c[a] = q[0] - p[0];
  }
  Eigen::Matrix3d k;
  const double scale = 1.0 / (2.0 * std::abs(det));
  for (int a = 0; a < 3; ++a)
    for (int d = 0; d < 3; ++d) k(a, d) = (b[a] * b[d] + c[a] * c[d]) * scale;
  return k;
}

namespace detail {

// The Dirichlet integral is scale invariant in 2D, so elements are integrated in integer grid
// coordinates. This keeps every entry exact, including the zero couplings along hypotenuses.
inline Eigen::Matrix3d grid_element(const StructuredMesh& mesh, const Triangle& t) {
  std::array<Point, 3> v;
  for (int a = 0; a < 3; ++a)
    v[a] = {static_cast<double>(mesh.grid_x(t[a])), static_cast<double>(mesh.grid_y(t[a]))};
  return local_stiffness(v);
}

}  // namespace detail

/// Blocks of the broken form over the partition. The broken vector layout used by the
/// per-subdomain matrices is [interior | corner | local dual], i.e. [r | Δ].
struct BlockStiffness {
  SparseMatrix rr;  // interior ∪ corner
  SparseMatrix rd;  // r × local dual
  SparseMatrix dd;  // local dual, block diagonal per subdomain
  std::vector<SparseMatrix> subdomain;

  int r_count() const noexcept { return static_cast<int>(rr.rows()); }
  int dual_count() const noexcept { return static_cast<int>(dd.rows()); }
  int broken_count() const noexcept { return r_count() + dual_count(); }
};

/// Finite element function of the broken space, v = v_I + v_c + v_Δ.
struct SplitFunction {
  Vector interior;  // r-numbering, first block
  Vector corner;    // r-numbering, second block
  Vector dual;      // local dual columns

  static SplitFunction zeros(const DofPartition& part) {
    return {Vector::Zero(part.interior_count()), Vector::Zero(part.corner_count()),
            Vector::Zero(part.local_dual_count())};
  }

  Vector r_values() const {
    Vector out(interior.size() + corner.size());
    out << interior, corner;
    return out;
  }

  Vector broken() const {
    Vector out(interior.size() + corner.size() + dual.size());
    out << interior, corner, dual;
    return out;
  }

  void set_r_values(const Vector& r) {
    interior = r.head(interior.size());
    corner = r.tail(corner.size());
  }

  SplitFunction interior_part() const { return {interior, Vector::Zero(corner.size()), Vector::Zero(dual.size())}; }
  SplitFunction corner_part() const { return {Vector::Zero(interior.size()), corner, Vector::Zero(dual.size())}; }
  SplitFunction dual_part() const { return {Vector::Zero(interior.size()), Vector::Zero(corner.size()), dual}; }

  friend SplitFunction operator+(const SplitFunction& a, const SplitFunction& b) {
    return {a.interior + b.interior, a.corner + b.corner, a.dual + b.dual};
  }
};

/// Restriction of a continuous nodal function to the broken space (dual values duplicated).
inline SplitFunction split_from_nodal(const DofPartition& part, const Vector& nodal) {
  if (nodal.size() != static_cast<Eigen::Index>(part.kind.size()))
    throw InvalidArgument("split_from_nodal: nodal vector has wrong size");
  SplitFunction v = SplitFunction::zeros(part);
  const int ni = part.interior_count();
  for (std::size_t id = 0; id < part.kind.size(); ++id) {
    const int r = part.r_index[id];
    if (r < 0) continue;
    if (r < ni) v.interior(r) = nodal(static_cast<Eigen::Index>(id));
    else v.corner(r - ni) = nodal(static_cast<Eigen::Index>(id));
  }
  for (int col = 0; col < part.local_dual_count(); ++col) v.dual(col) = nodal(part.local_dual_node[col]);
  return v;
}

/// Nodal values of v as seen from subdomain s, in StructuredMesh::subdomain_nodes(s) order.
/// Dirichlet nodes read as zero.
inline Vector subdomain_values(const StructuredMesh& mesh, const DofPartition& part, const SplitFunction& v, int s) {
  const auto nodes = mesh.subdomain_nodes(s);
  const int ni = part.interior_count();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const int id = nodes[a];
    const auto i = static_cast<Eigen::Index>(a);
    switch (part.kind[id]) {
      case NodeKind::Boundary: break;
      case NodeKind::Interior: out(i) = v.interior(part.r_index[id]); break;
      case NodeKind::Corner: out(i) = v.corner(part.r_index[id] - ni); break;
      case NodeKind::Dual: out(i) = v.dual(part.local_dual_index(s, id)); break;
    }
  }
  return out;
}

inline BlockStiffness assemble_blocks(const StructuredMesh& mesh, const DofPartition& part) {
  const int nr = part.r_count();
  const int nd = part.local_dual_count();
  const int nb = nr + nd;
  const int subs = mesh.subdomain_count();

  std::vector<std::vector<Triplet>> local(static_cast<std::size_t>(subs));
  std::vector<Triplet> rr, rd, dd;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int s = mesh.subdomain_of_triangle[t];
    const Eigen::Matrix3d ke = detail::grid_element(mesh, tri);
    std::array<int, 3> col{};
    for (int a = 0; a < 3; ++a) {
      const int id = tri[a];
      switch (part.kind[id]) {
        case NodeKind::Boundary: col[a] = -1; break;
        case NodeKind::Dual: col[a] = nr + part.local_dual_index(s, id); break;
        default: col[a] = part.r_index[id]; break;
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double k = ke(a, b);
        if (col[a] < 0 || col[b] < 0 || k == 0.0) continue;
        local[s].emplace_back(col[a], col[b], k);
        if (col[a] < nr && col[b] < nr) rr.emplace_back(col[a], col[b], k);
        else if (col[a] < nr) rd.emplace_back(col[a], col[b] - nr, k);
        else if (col[b] >= nr) dd.emplace_back(col[a] - nr, col[b] - nr, k);
      }
    }
  }

  BlockStiffness blocks;
  blocks.rr.resize(nr, nr);
  blocks.rd.resize(nr, nd);
  blocks.dd.resize(nd, nd);
  blocks.rr.setFromTriplets(rr.begin(), rr.end());
  blocks.rd.setFromTriplets(rd.begin(), rd.end());
  blocks.dd.setFromTriplets(dd.begin(), dd.end());
  blocks.rr.prune(0.0);
  blocks.rd.prune(0.0);
  blocks.dd.prune(0.0);
  blocks.subdomain.resize(static_cast<std::size_t>(subs));
  for (int s = 0; s < subs; ++s) {
    blocks.subdomain[s].resize(nb, nb);
    blocks.subdomain[s].setFromTriplets(local[s].begin(), local[s].end());
    blocks.subdomain[s].prune(0.0);
  }
  return blocks;
}

/// Conforming stiffness matrix over all nodes, without any boundary condition.
inline SparseMatrix assemble_conforming(const StructuredMesh& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (const auto& tri : mesh.triangles) {
    const Eigen::Matrix3d ke = detail::grid_element(mesh, tri);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (ke(a, b) != 0.0) trips.emplace_back(tri[a], tri[b], ke(a, b));
  }
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.prune(0.0);
  return a;
}

/// Principal submatrix on the given index list, in list order.
inline SparseMatrix principal_submatrix(const SparseMatrix& a, const std::vector<int>& keep) {
  std::vector<int> pos(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<int>(k);
  std::vector<Triplet> trips;
  for (int c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) trips.emplace_back(pos[it.row()], pos[it.col()], it.value());
  const auto n = static_cast<Eigen::Index>(keep.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

namespace detail {

inline void check_dims(const BlockStiffness& blocks, const SplitFunction& v) {
  if (v.interior.size() + v.corner.size() != blocks.r_count() || v.dual.size() != blocks.dual_count())
    throw InvalidArgument("energy: function is not dimensioned to the partition");
}

}  // namespace detail

/// ã(u, v).
inline double energy_form(const BlockStiffness& blocks, const SplitFunction& u, const SplitFunction& v) {
  detail::check_dims(blocks, u);
  detail::check_dims(blocks, v);
  const Vector ur = u.r_values(), vr = v.r_values();
  return ur.dot(blocks.rr * vr) + ur.dot(blocks.rd * v.dual) + vr.dot(blocks.rd * u.dual) +
         u.dual.dot(blocks.dd * v.dual);
}

/// ã(v, v), clamped at zero against rounding.
inline double energy(const BlockStiffness& blocks, const SplitFunction& v) {
  return std::max(0.0, energy_form(blocks, v, v));
}

/// ã_{Ω_s}(v, v).
inline double energy_subdomain(const BlockStiffness& blocks, const SplitFunction& v, int s) {
  detail::check_dims(blocks, v);
  if (s < 0 || s >= static_cast<int>(blocks.subdomain.size()))
    throw InvalidArgument("energy_subdomain: subdomain index out of range");
  const Vector x = v.broken();
  return std::max(0.0, x.dot(blocks.subdomain[s] * x));
}

/// Coordinate-format dump with one 0-based "row col value" line per stored entry in row-major order.
inline void write_coordinate(std::ostream& os, const SparseMatrix& a) {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rm(a);
  os << "% " << rm.rows() << ' ' << rm.cols() << ' ' << rm.nonZeros() << '\n';
  char buf[64];
  for (int r = 0; r < rm.outerSize(); ++r) {
    for (decltype(rm)::InnerIterator it(rm, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  }
}

inline void write_coordinate(std::ostream& os, const Matrix& a) {
  write_coordinate(os, SparseMatrix(a.sparseView(0.0, 0.0)));
}

}  // namespace feti_lab
