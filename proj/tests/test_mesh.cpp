#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "feti_lab/mesh.hpp"

namespace feti_lab {
namespace {

TEST(BuildMesh, SmallestMesh) {
  const auto mesh = build_mesh({1, 1});
  EXPECT_EQ(mesh.nodes.size(), 4u);
  EXPECT_EQ(mesh.triangles.size(), 2u);
  EXPECT_EQ(mesh.subdomain_count(), 1);
}

TEST(BuildMesh, Counts) {
  const auto a = build_mesh({2, 2});
  EXPECT_EQ(a.nodes.size(), 25u);
  EXPECT_EQ(a.triangles.size(), 32u);
  EXPECT_EQ(a.subdomain_count(), 4);

  const auto b = build_mesh({4, 3});
  EXPECT_EQ(b.nodes.size(), 169u);
  EXPECT_EQ(b.triangles.size(), 288u);
}

TEST(BuildMesh, RejectsEmptyConfig) {
  EXPECT_THROW(build_mesh({0, 3}), InvalidArgument);
  EXPECT_THROW(build_mesh({3, 0}), InvalidArgument);
}

TEST(BuildMesh, RowMajorNodes) {
  const auto mesh = build_mesh({2, 3});
  const double h = 1.0 / 6.0;
  for (int j = 0; j <= 6; ++j) {
    for (int i = 0; i <= 6; ++i) {
      const auto& p = mesh.nodes[mesh.node(i, j)];
      EXPECT_DOUBLE_EQ(p[0], i * h);
      EXPECT_DOUBLE_EQ(p[1], j * h);
    }
  }
}

// Right isoceles with legs h and counter-clockwise with the right angle first; never crosses a subdomain edge.
void check_triangles(const StructuredMesh& mesh) {
  const double h = mesh.config.fine_size();
  const double hh = mesh.config.coarse_size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.nodes[tri[0]];
    const auto& b = mesh.nodes[tri[1]];
    const auto& c = mesh.nodes[tri[2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - a[0], vy = c[1] - a[1];
    EXPECT_NEAR(ux * vx + uy * vy, 0.0, 1e-14);
    EXPECT_NEAR(std::hypot(ux, uy), h, 1e-14);
    EXPECT_NEAR(std::hypot(vx, vy), h, 1e-14);
    EXPECT_GT(ux * vy - uy * vx, 0.0);

    const int s = mesh.subdomain_of_triangle[t];
    const double x0 = mesh.subdomain_x(s) * hh, y0 = mesh.subdomain_y(s) * hh;
    for (int v : tri) {
      const auto& p = mesh.nodes[v];
      EXPECT_GE(p[0], x0 - 1e-14);
      EXPECT_LE(p[0], x0 + hh + 1e-14);
      EXPECT_GE(p[1], y0 - 1e-14);
      EXPECT_LE(p[1], y0 + hh + 1e-14);
    }
  }
}

TEST(BuildMesh, TrianglesAreRightIsocelesInsideOneSubdomain) {
  check_triangles(build_mesh({3, 2}));
  check_triangles(build_mesh({2, 3}, Diagonal::NorthWestSouthEast));
}

TEST(ClassifyDofs, HandEnumeratedExamples) {
  const auto p22 = classify_dofs(build_mesh({2, 2}));
  EXPECT_EQ(p22.corners.size(), 1u);
  EXPECT_EQ(p22.dual.size(), 4u);
  EXPECT_EQ(p22.interior_count(), 4);
  for (const auto& in : p22.interior) EXPECT_EQ(in.size(), 1u);

  const auto p21 = classify_dofs(build_mesh({2, 1}));
  EXPECT_EQ(p21.corners.size(), 1u);
  EXPECT_EQ(p21.dual.size(), 0u);
  EXPECT_EQ(p21.interior_count(), 0);

  const auto p33 = classify_dofs(build_mesh({3, 3}));
  EXPECT_EQ(p33.corners.size(), 4u);
  EXPECT_EQ(p33.dual.size(), 24u);
  EXPECT_EQ(p33.interior_count(), 36);
}

// Exhaustive over N·m ≤ 64.
TEST(ClassifyDofs, ClosedFormCardinalities) {
  for (int n = 1; n <= 64; ++n) {
    for (int m = 1; n * m <= 64; ++m) {
      const auto mesh = build_mesh({n, m});
      const auto part = classify_dofs(mesh);
      const std::size_t total = mesh.nodes.size();
      ASSERT_EQ(part.corners.size(), static_cast<std::size_t>((n - 1) * (n - 1))) << n << "," << m;
      ASSERT_EQ(part.dual.size(), static_cast<std::size_t>(2 * n * (n - 1) * (m - 1))) << n << "," << m;
      ASSERT_EQ(part.interior_count(), n * n * (m - 1) * (m - 1)) << n << "," << m;
      ASSERT_EQ(part.boundary.size(), static_cast<std::size_t>(4 * n * m)) << n << "," << m;
      ASSERT_EQ(part.boundary.size() + part.corners.size() + part.dual.size() +
                    static_cast<std::size_t>(part.interior_count()),
                total);
      ASSERT_EQ(part.local_dual_count(), 2 * part.dual_count());
    }
  }
}

TEST(ClassifyDofs, SetsAreDisjointAndCover) {
  const auto mesh = build_mesh({4, 3});
  const auto part = classify_dofs(mesh);
  std::vector<int> seen(mesh.nodes.size(), 0);
  for (int v : part.boundary) ++seen[v];
  for (int v : part.corners) ++seen[v];
  for (int v : part.dual) ++seen[v];
  for (const auto& in : part.interior)
    for (int v : in) ++seen[v];
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

// Owners of each node counted from the triangles themselves.
TEST(ClassifyDofs, OwnershipMultiplicities) {
  const auto mesh = build_mesh({4, 3});
  const auto part = classify_dofs(mesh);
  std::vector<std::set<int>> owners(mesh.nodes.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t]) owners[v].insert(mesh.subdomain_of_triangle[t]);

  for (int v : part.corners) EXPECT_EQ(owners[v].size(), 4u);
  for (int row = 0; row < part.dual_count(); ++row) {
    const int v = part.dual[row];
    ASSERT_EQ(owners[v].size(), 2u);
    const auto [lo, hi] = part.dual_owners[row];
    EXPECT_EQ(*owners[v].begin(), lo);
    EXPECT_EQ(*owners[v].rbegin(), hi);
    const int dx = std::abs(mesh.subdomain_x(lo) - mesh.subdomain_x(hi));
    const int dy = std::abs(mesh.subdomain_y(lo) - mesh.subdomain_y(hi));
    EXPECT_EQ(dx + dy, 1) << "owners must be edge-adjacent";
    EXPECT_EQ(part.local_dual_index(lo, v), part.dual_columns[row][0]);
    EXPECT_EQ(part.local_dual_index(hi, v), part.dual_columns[row][1]);
  }
  for (std::size_t s = 0; s < part.interior.size(); ++s)
    for (int v : part.interior[s]) {
      ASSERT_EQ(owners[v].size(), 1u);
      EXPECT_EQ(*owners[v].begin(), static_cast<int>(s));
    }
}

TEST(ClassifyDofs, EdgeListOrdering) {
  const auto part = classify_dofs(build_mesh({3, 4}));
  ASSERT_EQ(part.edge_list.size(), 12u);
  for (std::size_t e = 0; e + 1 < part.edge_list.size(); ++e) {
    const auto& a = part.edge_list[e];
    const auto& b = part.edge_list[e + 1];
    EXPECT_LT(a.lower, a.upper);
    EXPECT_TRUE(std::pair(a.lower, a.upper) < std::pair(b.lower, b.upper));
  }
  for (const auto& e : part.edge_list) {
    EXPECT_EQ(e.nodes.size(), 3u);
    EXPECT_TRUE(std::is_sorted(e.nodes.begin(), e.nodes.end()));
  }
}

TEST(ClassifyDofs, LocalDualIndexRejectsNonOwner) {
  const auto part = classify_dofs(build_mesh({3, 3}));
  const int v = part.dual.front();
  EXPECT_THROW(part.local_dual_index(8, v), InvalidArgument);
  EXPECT_THROW(part.local_dual_index(0, part.corners.front()), InvalidArgument);
}

TEST(ClassifyDofs, Deterministic) {
  const auto a = build_mesh({3, 4});
  const auto b = build_mesh({3, 4});
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.triangles, b.triangles);
  EXPECT_EQ(a.subdomain_of_triangle, b.subdomain_of_triangle);
  const auto pa = classify_dofs(a);
  const auto pb = classify_dofs(b);
  EXPECT_EQ(pa.dual, pb.dual);
  EXPECT_EQ(pa.r_index, pb.r_index);
  EXPECT_EQ(pa.dual_columns, pb.dual_columns);
  EXPECT_EQ(pa.local_dual_node, pb.local_dual_node);
}

TEST(ClassifyDofs, BoundaryEdgeCounts) {
  const auto mesh = build_mesh({4, 2});
  int counts[5] = {};
  for (int s = 0; s < mesh.subdomain_count(); ++s) ++counts[mesh.boundary_edge_count(s)];
  EXPECT_EQ(counts[0], 4);
  EXPECT_EQ(counts[1], 8);
  EXPECT_EQ(counts[2], 4);
}

}  // namespace
}  // namespace feti_lab
