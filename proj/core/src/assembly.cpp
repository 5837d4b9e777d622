#include "sacfem/assembly.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <Eigen/SparseCholesky>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

Point2 barycentric_to_cartesian(const std::array<Point2, 3>& c, const std::array<double, 3>& l) {
    return {l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0], l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1]};
}

double dot(const Point2& a, const Point2& b) { return a[0] * b[0] + a[1] * b[1]; }

using LocalMatrix = std::array<std::array<double, 3>, 3>;

// Element kernel: fills a 3x3 local matrix (row = test function i, column = trial j).
template <typename Kernel>
CsrMatrix assemble_bilinear(const Mesh& mesh, Kernel&& kernel) {
    CsrMatrix out = vertex_adjacency_pattern(mesh);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        LocalMatrix local{};
        kernel(t, local);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                out.add(tri.v[a], tri.v[b], local[a][b]);
            }
        }
    }
    return out;
}

template <typename PointKernel>
CsrMatrix assemble_with_field(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options,
                              PointKernel&& point_kernel) {
    const QuadratureRule& rule = QuadratureRule::at_least(options.coefficient_quadrature_degree);
    return assemble_bilinear(mesh, [&](std::size_t t, LocalMatrix& local) {
        const auto corners = mesh.corners(t);
        const ElementGeometry geom = triangle_geometry(corners[0], corners[1], corners[2]);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const FieldEval fe = field.eval(barycentric_to_cartesian(corners, rule.points[q]));
            const double w = rule.weights[q] * geom.area;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    local[a][b] += w * point_kernel(fe, geom, rule.points[q], a, b);
                }
            }
        }
    });
}

double interpolate_at(const NodalField& u, const Triangle& tri, const std::array<double, 3>& l) {
    return l[0] * u[static_cast<Eigen::Index>(tri.v[0])] + l[1] * u[static_cast<Eigen::Index>(tri.v[1])] +
           l[2] * u[static_cast<Eigen::Index>(tri.v[2])];
}

void check_size(const Mesh& mesh, const NodalField& u) {
    if (static_cast<std::size_t>(u.size()) != mesh.num_vertices()) {
        throw InvalidArgument("nodal field has " + std::to_string(u.size()) + " entries, mesh has " +
                              std::to_string(mesh.num_vertices()) + " vertices");
    }
}

template <typename Integrand>
double integrate_field(const Mesh& mesh, const NodalField& u, Integrand&& g) {
    check_size(mesh, u);
    const QuadratureRule& rule = QuadratureRule::degree4();
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double area = mesh.element_geometry(t).area;
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            local += rule.weights[q] * g(interpolate_at(u, tri, rule.points[q]));
        }
        total += area * local;
    }
    return total;
}

}  // namespace

CsrMatrix vertex_adjacency_pattern(const Mesh& mesh) {
    std::vector<std::set<std::size_t>> neighbours(mesh.num_vertices());
    for (const auto& tri : mesh.triangles()) {
        for (auto a : tri.v) {
            for (auto b : tri.v) neighbours[a].insert(b);
        }
    }
    std::vector<std::vector<std::size_t>> rows(mesh.num_vertices());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].assign(neighbours[i].begin(), neighbours[i].end());
    }
    return CsrMatrix::from_rows(mesh.num_vertices(), rows);
}

CsrMatrix assemble_mass(const Mesh& mesh) {
    return assemble_bilinear(mesh, [&](std::size_t t, LocalMatrix& local) {
        const double area = mesh.element_geometry(t).area;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                local[a][b] = area / 12.0 * (a == b ? 2.0 : 1.0);
            }
        }
    });
}

CsrMatrix assemble_stiffness(const Mesh& mesh) {
    return assemble_bilinear(mesh, [&](std::size_t t, LocalMatrix& local) {
        const ElementGeometry geom = mesh.element_geometry(t);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                local[a][b] = geom.area * dot(geom.grads[a], geom.grads[b]);
            }
        }
    });
}

CsrMatrix assemble_AX(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options) {
    return assemble_with_field(mesh, field, options,
                               [](const FieldEval& fe, const ElementGeometry& g, const auto&, int a, int b) {
                                   return dot(g.grads[b], fe.X) * dot(g.grads[a], fe.X);
                               });
}

CsrMatrix assemble_C1(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options) {
    return assemble_with_field(
        mesh, field, options,
        [](const FieldEval& fe, const ElementGeometry& g, const std::array<double, 3>& l, int a, int b) {
            return dot(fe.divB_minus_b, g.grads[b]) * l[a];
        });
}

CsrMatrix assemble_C2(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options) {
    return assemble_with_field(
        mesh, field, options,
        [](const FieldEval& fe, const ElementGeometry& g, const std::array<double, 3>& l, int a, int b) {
            return dot(g.grads[b], fe.X) * l[a];
        });
}

SystemMatrices assemble_system(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options) {
    return SystemMatrices{assemble_mass(mesh), assemble_stiffness(mesh), assemble_AX(mesh, field, options),
                          assemble_C1(mesh, field, options), assemble_C2(mesh, field, options)};
}

Eigen::VectorXd assemble_nonlinear(const Mesh& mesh, const NodalField& u) {
    Eigen::VectorXd out;
    assemble_nonlinear(mesh, u, out);
    return out;
}

void assemble_nonlinear(const Mesh& mesh, const NodalField& u, Eigen::VectorXd& out) {
    check_size(mesh, u);
    const QuadratureRule& rule = QuadratureRule::degree4();
    out.setZero(u.size());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double area = mesh.element_geometry(t).area;
        std::array<double, 3> local{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double uq = interpolate_at(u, tri, rule.points[q]);
            const double w = rule.weights[q] * area * uq * uq * uq;
            for (int a = 0; a < 3; ++a) local[a] += w * rule.points[q][a];
        }
        for (int a = 0; a < 3; ++a) out[static_cast<Eigen::Index>(tri.v[a])] += local[a];
    }
}

void assemble_nonlinear_jacobian(const Mesh& mesh, const NodalField& u, CsrMatrix& out) {
    check_size(mesh, u);
    const QuadratureRule& rule = QuadratureRule::degree4();
    out.set_zero();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double area = mesh.element_geometry(t).area;
        LocalMatrix local{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const double uq = interpolate_at(u, tri, l);
            const double w = rule.weights[q] * area * 3.0 * uq * uq;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) local[a][b] += w * l[a] * l[b];
            }
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) out.add(tri.v[a], tri.v[b], local[a][b]);
        }
    }
}

double integrate_double_well(const Mesh& mesh, const NodalField& u) {
    return integrate_field(mesh, u, [](double v) {
        const double s = v * v - 1.0;
        return 0.25 * s * s;
    });
}

double integrate_convex_quartic(const Mesh& mesh, const NodalField& u) {
    return integrate_field(mesh, u, [](double v) { return 0.25 * (v * v * v * v + 1.0); });
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarFunction& f, const QuadratureRule& rule) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const auto corners = mesh.corners(t);
        const double area = triangle_geometry(corners[0], corners[1], corners[2]).area;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double fq = f(barycentric_to_cartesian(corners, rule.points[q]));
            for (int a = 0; a < 3; ++a) {
                load[static_cast<Eigen::Index>(tri.v[a])] += rule.weights[q] * area * fq * rule.points[q][a];
            }
        }
    }
    return load;
}

NodalField l2_project(const Mesh& mesh, const ScalarFunction& f) { return l2_project(mesh, assemble_mass(mesh), f); }

NodalField l2_project(const Mesh& mesh, const CsrMatrix& mass, const ScalarFunction& f) {
    const Eigen::VectorXd load = assemble_load(mesh, f, QuadratureRule::degree6());
    const Eigen::SparseMatrix<double> m = mass.to_eigen();
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(m);
    if (chol.info() != Eigen::Success) {
        throw SolverError("l2_project: Cholesky factorization of the mass matrix failed");
    }
    NodalField c = chol.solve(load);
    const double residual = (m * c - load).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10 * load.lpNorm<Eigen::Infinity>() + 1e-300)) {
        throw SolverError("l2_project: residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return c;
}

NodalField interpolate(const Mesh& mesh, const ScalarFunction& f) {
    NodalField out(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (const auto& v : mesh.vertices()) out[static_cast<Eigen::Index>(v.id)] = f(v.point());
    return out;
}

double evaluate(const Mesh& mesh, const NodalField& u, const Point2& p) {
    check_size(mesh, u);
    const std::size_t t = mesh.locate(p);
    const auto corners = mesh.corners(t);
    const ElementGeometry geom = triangle_geometry(corners[0], corners[1], corners[2]);
    const Point2 centroid{(corners[0][0] + corners[1][0] + corners[2][0]) / 3.0,
                          (corners[0][1] + corners[1][1] + corners[2][1]) / 3.0};
    std::array<double, 3> l{};
    for (int a = 0; a < 3; ++a) {
        l[a] = 1.0 / 3.0 + dot(geom.grads[a], {p[0] - centroid[0], p[1] - centroid[1]});
    }
    return interpolate_at(u, mesh.triangle(t), l);
}

}  // namespace sacfem
