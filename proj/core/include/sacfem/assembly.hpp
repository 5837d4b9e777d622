#pragma once

#include <functional>

#include <Eigen/Core>

#include "sacfem/mesh.hpp"
#include "sacfem/quadrature.hpp"
#include "sacfem/sparse.hpp"
#include "sacfem/vector_field.hpp"

namespace sacfem {

// Coefficients of u_h = sum_i u_i psi_i, one per mesh vertex.
using NodalField = Eigen::VectorXd;

using ScalarFunction = std::function<double(const Point2&)>;

struct AssemblyOptions {
    // Rule used for the X-dependent matrices (A_X, C1, C2); 4, 6 or 8.
    int coefficient_quadrature_degree = 4;
};

/// The five matrices of the linear-algebraic step:
///   M_ij   = (psi_j, psi_i)
///   A_ij   = (grad psi_j, grad psi_i)
///   AX_ij  = (grad psi_j . X, grad psi_i . X)
///   C1_ij  = ((div B - b) . grad psi_j, psi_i)
///   C2_ij  = (grad psi_j . X, psi_i)
/// All share the vertex-adjacency sparsity pattern.
struct SystemMatrices {
    CsrMatrix M;
    CsrMatrix A;
    CsrMatrix AX;
    CsrMatrix C1;
    CsrMatrix C2;
};

// Zero matrix with one entry per pair of vertices sharing a triangle.
CsrMatrix vertex_adjacency_pattern(const Mesh& mesh);

CsrMatrix assemble_mass(const Mesh& mesh);
CsrMatrix assemble_stiffness(const Mesh& mesh);
CsrMatrix assemble_AX(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options = {});
CsrMatrix assemble_C1(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options = {});
CsrMatrix assemble_C2(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options = {});
SystemMatrices assemble_system(const Mesh& mesh, const NoiseField& field, const AssemblyOptions& options = {});

// N(u)_i = integral of u_h^3 psi_i (degree-4 rule, exact for P1).
Eigen::VectorXd assemble_nonlinear(const Mesh& mesh, const NodalField& u);
void assemble_nonlinear(const Mesh& mesh, const NodalField& u, Eigen::VectorXd& out);

// J_ij = integral of 3 u_h^2 psi_j psi_i, the Jacobian of assemble_nonlinear.
// Written into `out`, which must carry the vertex-adjacency pattern.
void assemble_nonlinear_jacobian(const Mesh& mesh, const NodalField& u, CsrMatrix& out);

// Integral of (1/4)(u_h^2 - 1)^2 and (1/4)(u_h^4 + 1); exact for P1.
double integrate_double_well(const Mesh& mesh, const NodalField& u);
double integrate_convex_quartic(const Mesh& mesh, const NodalField& u);

// Loads b_i = integral of f psi_i with the given rule.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarFunction& f, const QuadratureRule& rule);

// L2 projection onto P1: solves M c = b with a degree-6 load.
NodalField l2_project(const Mesh& mesh, const ScalarFunction& f);
NodalField l2_project(const Mesh& mesh, const CsrMatrix& mass, const ScalarFunction& f);

// Nodal values f(x_i).
NodalField interpolate(const Mesh& mesh, const ScalarFunction& f);

// Value of the P1 field at p.
double evaluate(const Mesh& mesh, const NodalField& u, const Point2& p);

}  // namespace sacfem
