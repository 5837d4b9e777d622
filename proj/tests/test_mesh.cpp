#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "sacfem/errors.hpp"
#include "sacfem/mesh.hpp"

using namespace sacfem;

TEST(Mesh, ZeroSubdivisionsRejected) { EXPECT_THROW(Mesh::generate_uniform(0), InvalidArgument); }

TEST(Mesh, Counts) {
    auto m1 = Mesh::generate_uniform(1);
    EXPECT_EQ(m1.num_vertices(), 4u);
    EXPECT_EQ(m1.num_triangles(), 2u);

    auto m2 = Mesh::generate_uniform(2);
    EXPECT_EQ(m2.num_vertices(), 9u);
    EXPECT_EQ(m2.num_triangles(), 8u);
    EXPECT_DOUBLE_EQ(m2.h(), std::sqrt(2.0) / 2.0);

    auto m64 = Mesh::generate_uniform(64);
    EXPECT_EQ(m64.num_vertices(), 4225u);
    EXPECT_EQ(m64.num_triangles(), 8192u);
}

TEST(Mesh, AreasSumToOne) {
    for (std::size_t n : {1, 2, 3, 7, 16, 33}) {
        auto mesh = Mesh::generate_uniform(n);
        double total = 0.0;
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = mesh.element_geometry(t);
            EXPECT_GT(g.area, 0.0);
            total += g.area;
        }
        EXPECT_NEAR(total, 1.0, 1e-12) << "n = " << n;
    }
}

TEST(Mesh, VerticesInDomainRowMajor) {
    auto mesh = Mesh::generate_uniform(5);
    for (const auto& v : mesh.vertices()) {
        EXPECT_GE(v.x, -0.5);
        EXPECT_LE(v.x, 0.5);
        EXPECT_GE(v.y, -0.5);
        EXPECT_LE(v.y, 0.5);
        const std::size_t i = v.id % 6, j = v.id / 6;
        EXPECT_NEAR(v.x, -0.5 + 0.2 * static_cast<double>(i), 1e-15);
        EXPECT_NEAR(v.y, -0.5 + 0.2 * static_cast<double>(j), 1e-15);
    }
}

TEST(Mesh, TrianglesCounterclockwiseAndDistinct) {
    auto mesh = Mesh::generate_uniform(6);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        EXPECT_NE(tri.v[0], tri.v[1]);
        EXPECT_NE(tri.v[1], tri.v[2]);
        EXPECT_NE(tri.v[0], tri.v[2]);
        const auto c = mesh.corners(t);
        const double signed2 = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
        EXPECT_GT(signed2, 0.0);
    }
}

TEST(Mesh, DiagonalRunsLowerLeftToUpperRight) {
    auto mesh = Mesh::generate_uniform(1);
    // vertices: 0 (-.5,-.5), 1 (.5,-.5), 2 (-.5,.5), 3 (.5,.5); both triangles share edge 0-3
    for (const auto& tri : mesh.triangles()) {
        int hits = 0;
        for (auto v : tri.v) hits += (v == 0 || v == 3);
        EXPECT_EQ(hits, 2);
    }
}

TEST(Mesh, InteriorEdgesSharedByTwoTriangles) {
    const std::size_t n = 8;
    auto mesh = Mesh::generate_uniform(n);
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& tri : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            auto a = tri.v[k], b = tri.v[(k + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::size_t boundary = 0;
    for (const auto& [e, count] : edges) {
        const auto& va = mesh.vertex(e.first);
        const auto& vb = mesh.vertex(e.second);
        const bool on_boundary = (std::abs(va.x) == 0.5 && va.x == vb.x) || (std::abs(va.y) == 0.5 && va.y == vb.y);
        EXPECT_EQ(count, on_boundary ? 1 : 2);
        boundary += on_boundary;
    }
    EXPECT_EQ(boundary, 4 * n);
}

TEST(ElementGeometry, ReferenceTriangle) {
    const auto g = triangle_geometry({0, 0}, {1, 0}, {0, 1});
    EXPECT_DOUBLE_EQ(g.area, 0.5);
    EXPECT_DOUBLE_EQ(g.grads[0][0], -1.0);
    EXPECT_DOUBLE_EQ(g.grads[0][1], -1.0);
    EXPECT_DOUBLE_EQ(g.grads[1][0], 1.0);
    EXPECT_DOUBLE_EQ(g.grads[1][1], 0.0);
    EXPECT_DOUBLE_EQ(g.grads[2][0], 0.0);
    EXPECT_DOUBLE_EQ(g.grads[2][1], 1.0);
}

TEST(ElementGeometry, GradientsSumToZero) {
    auto mesh = Mesh::generate_uniform(9);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.element_geometry(t);
        for (int d = 0; d < 2; ++d) EXPECT_LE(std::abs(g.grads[0][d] + g.grads[1][d] + g.grads[2][d]), 1e-15 * 9 * 2);
    }
    const auto g = triangle_geometry({0.1, -0.3}, {0.7, 0.2}, {-0.4, 0.9});
    EXPECT_NEAR(g.grads[0][0] + g.grads[1][0] + g.grads[2][0], 0.0, 1e-15);
    EXPECT_NEAR(g.grads[0][1] + g.grads[1][1] + g.grads[2][1], 0.0, 1e-15);
}

TEST(ElementGeometry, UniformElementArea) {
    auto mesh = Mesh::generate_uniform(2);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) EXPECT_DOUBLE_EQ(mesh.element_geometry(t).area, 0.125);
}

TEST(ElementGeometry, DegenerateRejected) {
    EXPECT_THROW(triangle_geometry({0, 0}, {1, 1}, {2, 2}), GeometryError);
    EXPECT_THROW(triangle_geometry({0, 0}, {0, 1}, {1, 0}), GeometryError);  // clockwise
}

TEST(Mesh, AllTrianglesCongruent) {
    auto mesh = Mesh::generate_uniform(4);
    double dmin = 1e9, dmax = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        double d = 0.0;
        for (int k = 0; k < 3; ++k) d = std::max(d, std::hypot(c[k][0] - c[(k + 1) % 3][0], c[k][1] - c[(k + 1) % 3][1]));
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    EXPECT_NEAR(dmax / dmin, 1.0, 1e-14);
    EXPECT_NEAR(dmax, mesh.h(), 1e-15);
}

TEST(Mesh, LocateFindsContainingTriangle) {
    auto mesh = Mesh::generate_uniform(7);
    for (double x = -0.5; x <= 0.5; x += 0.0371) {
        for (double y = -0.5; y <= 0.5; y += 0.0419) {
            const auto t = mesh.locate({x, y});
            const auto g = mesh.element_geometry(t);
            const auto c = mesh.corners(t);
            for (int k = 0; k < 3; ++k) {
                const double l = 1.0 / 3.0 + g.grads[k][0] * (x - (c[0][0] + c[1][0] + c[2][0]) / 3.0) +
                                 g.grads[k][1] * (y - (c[0][1] + c[1][1] + c[2][1]) / 3.0);
                EXPECT_GE(l, -1e-12);
            }
        }
    }
}

TEST(Mesh, OffDump) {
    std::ostringstream os;
    write_mesh_off(os, Mesh::generate_uniform(1));
    std::istringstream in(os.str());
    std::size_t nv = 0, nt = 0;
    in >> nv >> nt;
    EXPECT_EQ(nv, 4u);
    EXPECT_EQ(nt, 2u);
}
