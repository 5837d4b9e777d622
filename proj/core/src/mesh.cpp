#include "sacfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {
constexpr double kDomainMin = -0.5;
constexpr double kDegenerateArea = 1e-14;
}  // namespace

Mesh Mesh::generate_uniform(std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("Mesh::generate_uniform: n must be >= 1");
    }
    Mesh mesh;
    mesh.n_ = n;
    mesh.h_ = std::sqrt(2.0) / static_cast<double>(n);

    const std::size_t stride = n + 1;
    mesh.vertices_.reserve(stride * stride);
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i <= n; ++i) {
            // Exact endpoints: i == n maps to 0.5, not 0.5 - ulp.
            const double x = kDomainMin + static_cast<double>(i) / static_cast<double>(n);
            const double y = kDomainMin + static_cast<double>(j) / static_cast<double>(n);
            mesh.vertices_.push_back(Vertex{j * stride + i, x, y});
        }
    }

    mesh.triangles_.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t v00 = j * stride + i;
            const std::size_t v10 = v00 + 1;
            const std::size_t v01 = v00 + stride;
            const std::size_t v11 = v01 + 1;
            mesh.triangles_.push_back(Triangle{{v00, v10, v11}});
            mesh.triangles_.push_back(Triangle{{v00, v11, v01}});
        }
    }
    return mesh;
}

std::array<Point2, 3> Mesh::corners(std::size_t t) const {
    const Triangle& tri = triangles_.at(t);
    return {vertices_[tri.v[0]].point(), vertices_[tri.v[1]].point(), vertices_[tri.v[2]].point()};
}

ElementGeometry Mesh::element_geometry(std::size_t t) const {
    const auto c = corners(t);
    return triangle_geometry(c[0], c[1], c[2]);
}

std::size_t Mesh::locate(const Point2& p) const {
    const double n = static_cast<double>(n_);
    const auto cell = [n](double coord) {
        const double s = (coord - kDomainMin) * n;
        return static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, n - 1.0));
    };
    const std::size_t i = cell(p[0]);
    const std::size_t j = cell(p[1]);
    const double lx = (p[0] - kDomainMin) * n - static_cast<double>(i);
    const double ly = (p[1] - kDomainMin) * n - static_cast<double>(j);
    // Lower triangle lies below the diagonal (ly <= lx).
    return 2 * (j * n_ + i) + (ly <= lx ? 0 : 1);
}

ElementGeometry triangle_geometry(const Point2& a, const Point2& b, const Point2& c) {
    const double twice_area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    const double area = 0.5 * twice_area;
    if (!(area > kDegenerateArea)) {
        throw GeometryError("degenerate or inverted triangle (signed area " + std::to_string(area) + ")");
    }
    ElementGeometry geom;
    geom.area = area;
    const double inv = 1.0 / twice_area;
    geom.grads[0] = {(b[1] - c[1]) * inv, (c[0] - b[0]) * inv};
    geom.grads[1] = {(c[1] - a[1]) * inv, (a[0] - c[0]) * inv};
    geom.grads[2] = {(a[1] - b[1]) * inv, (b[0] - a[0]) * inv};
    return geom;
}

void write_mesh_off(std::ostream& os, const Mesh& mesh) {
    os << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
    os << std::setprecision(17);
    for (const auto& v : mesh.vertices()) {
        os << v.x << ' ' << v.y << '\n';
    }
    for (const auto& t : mesh.triangles()) {
        os << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    }
}

}  // namespace sacfem
