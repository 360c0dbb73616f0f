#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "feti_lab/error.hpp"

namespace feti_lab {

/// Decomposition of the unit square into N x N square subdomains, each carrying an m x m grid of
/// cells split into two right triangles. H = 1/N and h = 1/(N m) are derived, never stored.
struct MeshConfig {
  int subdomains = 1;  // N, subdomains per side
  int ratio = 1;       // m = H/h, cells per subdomain side

  int cells_per_side() const noexcept { return subdomains * ratio; }
  int points_per_side() const noexcept { return cells_per_side() + 1; }
  double coarse_size() const noexcept { return 1.0 / subdomains; }
  double fine_size() const noexcept { return 1.0 / cells_per_side(); }

  void validate() const {
    if (subdomains < 1) throw InvalidArgument("MeshConfig: need at least one subdomain per side");
    if (ratio < 1) throw InvalidArgument("MeshConfig: need at least one cell per subdomain side");
    const long long pts = static_cast<long long>(subdomains) * ratio + 1;
    if (pts * pts > std::numeric_limits<int>::max() / 4)
      throw InvalidArgument("MeshConfig: mesh too large");
  }

  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

/// Orientation of the cell diagonals. Every cell of a mesh uses the same one.
enum class Diagonal : std::uint8_t {
  SouthWestNorthEast,  // lower-left to upper-right
  NorthWestSouthEast,
};

using Point = std::array<double, 2>;
using Triangle = std::array<int, 3>;

struct StructuredMesh {
  MeshConfig config;
  Diagonal diagonal = Diagonal::SouthWestNorthEast;
  std::vector<Point> nodes;              // row-major: node(i, j) = j * (N m + 1) + i
  std::vector<Triangle> triangles;       // counter-clockwise, right-angle vertex first
  std::vector<int> subdomain_of_triangle;

  int points_per_side() const noexcept { return config.points_per_side(); }
  int node(int i, int j) const noexcept { return j * points_per_side() + i; }
  int grid_x(int node_id) const noexcept { return node_id % points_per_side(); }
  int grid_y(int node_id) const noexcept { return node_id / points_per_side(); }
  int subdomain_count() const noexcept { return config.subdomains * config.subdomains; }
  int subdomain(int sx, int sy) const noexcept { return sy * config.subdomains + sx; }
  int subdomain_x(int s) const noexcept { return s % config.subdomains; }
  int subdomain_y(int s) const noexcept { return s / config.subdomains; }

  /// Grid index of the lower-left node of subdomain s.
  std::array<int, 2> subdomain_origin(int s) const noexcept {
    return {subdomain_x(s) * config.ratio, subdomain_y(s) * config.ratio};
  }

  /// Nodes of the closed subdomain s, row-major.
  std::vector<int> subdomain_nodes(int s) const {
    const auto [x0, y0] = subdomain_origin(s);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(config.ratio + 1) * (config.ratio + 1));
    for (int j = y0; j <= y0 + config.ratio; ++j)
      for (int i = x0; i <= x0 + config.ratio; ++i) out.push_back(node(i, j));
    return out;
  }

  /// Number of edges of subdomain s lying on the outer boundary (0 means floating).
  int boundary_edge_count(int s) const noexcept {
    const int last = config.subdomains - 1;
    const int sx = subdomain_x(s), sy = subdomain_y(s);
    return (sx == 0) + (sx == last) + (sy == 0) + (sy == last);
  }
};

inline StructuredMesh build_mesh(const MeshConfig& cfg,
                                 Diagonal diagonal = Diagonal::SouthWestNorthEast) {
  cfg.validate();
  StructuredMesh mesh;
  mesh.config = cfg;
  mesh.diagonal = diagonal;

  const int n = cfg.cells_per_side();
  const int p = n + 1;
  const double h = cfg.fine_size();
  mesh.nodes.reserve(static_cast<std::size_t>(p) * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) mesh.nodes.push_back({i * h, j * h});

  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  mesh.subdomain_of_triangle.reserve(mesh.triangles.capacity());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int sw = mesh.node(i, j), se = mesh.node(i + 1, j);
      const int nw = mesh.node(i, j + 1), ne = mesh.node(i + 1, j + 1);
      const int s = mesh.subdomain(i / cfg.ratio, j / cfg.ratio);
      if (diagonal == Diagonal::SouthWestNorthEast) {
        mesh.triangles.push_back({se, ne, sw});
        mesh.triangles.push_back({nw, sw, ne});
      } else {
        mesh.triangles.push_back({sw, se, nw});
        mesh.triangles.push_back({ne, nw, se});
      }
      mesh.subdomain_of_triangle.push_back(s);
      mesh.subdomain_of_triangle.push_back(s);
    }
  }
  return mesh;
}

enum class NodeKind : std::uint8_t { Boundary, Corner, Dual, Interior };

/// Interface Γ_jk between edge-adjacent subdomains lower < upper, without its end points.
struct InterfaceEdge {
  int lower = 0;
  int upper = 0;
  std::vector<int> nodes;  // ascending grid index
};

/// Splitting of the nodes into Dirichlet boundary, primal corners, dual interface nodes and
/// subdomain interiors.
///
/// Two numberings live here. The r-numbering covers interior and corner nodes: interiors grouped
/// by subdomain (ascending node id), then all corners. The local dual numbering duplicates each
/// dual node once per owning subdomain: columns grouped by subdomain, ascending node id within.
/// Global dual rows follow edge_list order.
struct DofPartition {
  std::vector<NodeKind> kind;
  std::vector<int> boundary;
  std::vector<int> corners;
  std::vector<int> dual;  // row order of the jump operator
  std::vector<std::vector<int>> interior;
  std::vector<InterfaceEdge> edge_list;

  std::vector<int> r_index;    // per node, -1 unless interior or corner
  std::vector<int> dual_row;   // per node, -1 unless dual
  std::vector<int> interior_offset;

  std::vector<std::vector<int>> subdomain_dual;  // per subdomain, ascending node ids
  std::vector<int> local_dual_offset;            // size subdomains + 1
  std::vector<int> local_dual_node;              // per local column
  std::vector<int> local_dual_subdomain;         // per local column
  std::vector<std::array<int, 2>> dual_owners;   // per row: {lower, upper} subdomain
  std::vector<std::array<int, 2>> dual_columns;  // per row: local columns in {lower, upper}

  int interior_count() const noexcept { return interior_offset.empty() ? 0 : interior_offset.back(); }
  int corner_count() const noexcept { return static_cast<int>(corners.size()); }
  int r_count() const noexcept { return interior_count() + corner_count(); }
  int dual_count() const noexcept { return static_cast<int>(dual.size()); }
  int local_dual_count() const noexcept { return local_dual_offset.empty() ? 0 : local_dual_offset.back(); }
  int subdomain_count() const noexcept { return static_cast<int>(interior.size()); }

  /// Local dual column of `node` in subdomain `s`.
  int local_dual_index(int s, int node) const {
    const int row = dual_row.at(static_cast<std::size_t>(node));
    if (row < 0) throw InvalidArgument("local_dual_index: node " + std::to_string(node) + " is not a dual node");
    const auto& own = dual_owners[row];
    for (int k = 0; k < 2; ++k)
      if (own[k] == s) return dual_columns[row][k];
    throw InvalidArgument("local_dual_index: subdomain " + std::to_string(s) + " does not own node " +
                          std::to_string(node));
  }
};

inline DofPartition classify_dofs(const StructuredMesh& mesh) {
  const int big_n = mesh.config.subdomains;
  const int m = mesh.config.ratio;
  const int n = mesh.config.cells_per_side();
  const int p = n + 1;
  const int subs = mesh.subdomain_count();

  DofPartition part;
  part.kind.assign(static_cast<std::size_t>(p) * p, NodeKind::Interior);
  part.r_index.assign(part.kind.size(), -1);
  part.dual_row.assign(part.kind.size(), -1);
  part.interior.resize(static_cast<std::size_t>(subs));
  part.subdomain_dual.resize(static_cast<std::size_t>(subs));

  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      const int id = mesh.node(i, j);
      NodeKind k;
      if (i == 0 || j == 0 || i == n || j == n) {
        k = NodeKind::Boundary;
        part.boundary.push_back(id);
      } else if (i % m == 0 && j % m == 0) {
        k = NodeKind::Corner;
        part.corners.push_back(id);
      } else if (i % m == 0 || j % m == 0) {
        k = NodeKind::Dual;
      } else {
        k = NodeKind::Interior;
        part.interior[mesh.subdomain(i / m, j / m)].push_back(id);
      }
      part.kind[id] = k;
    }
  }

  // Interface edges in (lower, upper) order; the upper neighbour is east or north.
  for (int s = 0; s < subs; ++s) {
    const int sx = mesh.subdomain_x(s), sy = mesh.subdomain_y(s);
    const auto [x0, y0] = mesh.subdomain_origin(s);
    if (sx + 1 < big_n) {
      InterfaceEdge e{s, mesh.subdomain(sx + 1, sy), {}};
      for (int j = y0 + 1; j < y0 + m; ++j) e.nodes.push_back(mesh.node(x0 + m, j));
      part.edge_list.push_back(std::move(e));
    }
    if (sy + 1 < big_n) {
      InterfaceEdge e{s, mesh.subdomain(sx, sy + 1), {}};
      for (int i = x0 + 1; i < x0 + m; ++i) e.nodes.push_back(mesh.node(i, y0 + m));
      part.edge_list.push_back(std::move(e));
    }
  }

  for (const auto& e : part.edge_list) {
    for (int id : e.nodes) {
      part.dual_row[id] = static_cast<int>(part.dual.size());
      part.dual.push_back(id);
      part.dual_owners.push_back({e.lower, e.upper});
      part.subdomain_dual[e.lower].push_back(id);
      part.subdomain_dual[e.upper].push_back(id);
    }
  }

  part.local_dual_offset.assign(static_cast<std::size_t>(subs) + 1, 0);
  for (int s = 0; s < subs; ++s) {
    auto& nodes = part.subdomain_dual[s];
    std::sort(nodes.begin(), nodes.end());
    part.local_dual_offset[s + 1] =
        part.local_dual_offset[s] + static_cast<int>(nodes.size());
    for (int id : nodes) {
      part.local_dual_node.push_back(id);
      part.local_dual_subdomain.push_back(s);
    }
  }
  part.dual_columns.resize(part.dual.size());
  for (int col = 0; col < part.local_dual_count(); ++col) {
    const int row = part.dual_row[part.local_dual_node[col]];
    const int s = part.local_dual_subdomain[col];
    const int slot = part.dual_owners[row][0] == s ? 0 : 1;
    part.dual_columns[row][slot] = col;
  }

  part.interior_offset.assign(static_cast<std::size_t>(subs) + 1, 0);
  int next = 0;
  for (int s = 0; s < subs; ++s) {
    for (int id : part.interior[s]) part.r_index[id] = next++;
    part.interior_offset[s + 1] = next;
  }
  for (int id : part.corners) part.r_index[id] = next++;
  return part;
}

}  // namespace feti_lab
