#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace sacfem {

using Point2 = std::array<double, 2>;

struct Vertex {
    std::size_t id = 0;
    double x = 0.0;
    double y = 0.0;

    Point2 point() const { return {x, y}; }
};

// Vertex ids in counterclockwise order.
struct Triangle {
    std::array<std::size_t, 3> v{};
};

struct ElementGeometry {
    double area = 0.0;
    // Constant gradients of the three barycentric (P1 hat) functions.
    std::array<Point2, 3> grads{};
};

/// Structured P1 triangulation of the square [-0.5, 0.5]^2.
///
/// Vertices are numbered row-major (by y, then x): vertex (i, j) has id
/// j * (n + 1) + i. Each grid square is split along its lower-left to
/// upper-right diagonal. The mesh is immutable once generated.
class Mesh {
public:
    static Mesh generate_uniform(std::size_t n);

    std::size_t subdivisions() const { return n_; }
    double h() const { return h_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Vertex& vertex(std::size_t id) const { return vertices_.at(id); }
    const Triangle& triangle(std::size_t id) const { return triangles_.at(id); }

    std::array<Point2, 3> corners(std::size_t t) const;
    ElementGeometry element_geometry(std::size_t t) const;

    // Index of a triangle containing p (boundary ties resolved to the lower index).
    std::size_t locate(const Point2& p) const;

private:
    std::size_t n_ = 0;
    double h_ = 0.0;
    std::vector<Vertex> vertices_;
    std::vector<Triangle> triangles_;
};

/// Area and barycentric gradients of an arbitrary triangle. Throws
/// GeometryError when the signed area is <= 1e-14.
ElementGeometry triangle_geometry(const Point2& a, const Point2& b, const Point2& c);

/// Plain-text dump: "vertices triangles", then one "x y" line per vertex and
/// one "3 i j k" line per triangle.
void write_mesh_off(std::ostream& os, const Mesh& mesh);

}  // namespace sacfem
