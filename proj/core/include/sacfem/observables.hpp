#pragma once

#include <span>
#include <vector>

#include "sacfem/assembly.hpp"
#include "sacfem/mesh.hpp"
#include "sacfem/sparse.hpp"

namespace sacfem {

double l2_norm(const NodalField& u, const CsrMatrix& mass);
double h1_semi(const NodalField& u, const CsrMatrix& stiffness);

/// J(u) = 1/2 |grad u_h|^2 + eps^-2 F(u_h) integrated over D, F(v) = (v^2 - 1)^2 / 4.
double energy(const NodalField& u, const Mesh& mesh, const CsrMatrix& stiffness, double epsilon);
double energy(const NodalField& u, const Mesh& mesh, double epsilon);

struct LevelSetPolyline {
    std::vector<Point2> points;
    bool closed = false;
};

/// Marching triangles. Vertex values equal to `level` are nudged up by
/// 1e-14 * max|u| first, so every crossing lies strictly inside an edge.
/// Crossing points are keyed by their edge, which makes stitching exact.
std::vector<LevelSetPolyline> level_set(const NodalField& u, const Mesh& mesh, double level = 0.0);

// Mean distance of the points to their centroid. Throws for open or empty polylines.
double interface_radius(const LevelSetPolyline& poly);

struct HolderEstimate {
    std::vector<double> lags;  // t - s
    std::vector<double> l2_increments;         // E ||u(t) - u(s)||^2_L2
    std::vector<double> h1_increments;         // E ||grad(u(t) - u(s))||^2_L2
    std::vector<double> nonlinear_increments;  // E ||f(u(t)) - f(u(s))||^2_L2, f = u^3 - u nodally
    double l2_slope = 0.0;
    double h1_slope = 0.0;
    double nonlinear_slope = 0.0;
};

/// Streaming Monte Carlo estimator of squared increment norms versus lag.
/// Trajectories are sampled at a uniform spacing `dt`; lags are in samples.
/// Every admissible start time of every trajectory contributes.
class HolderAccumulator {
public:
    HolderAccumulator(std::vector<std::size_t> lags, double dt);

    void add_trajectory(std::span<const NodalField> states, const CsrMatrix& mass, const CsrMatrix& stiffness);
    HolderEstimate estimate() const;

private:
    std::vector<std::size_t> lags_;
    double dt_;
    std::vector<double> l2_sum_;
    std::vector<double> h1_sum_;
    std::vector<double> nl_sum_;
    std::vector<std::size_t> count_;
};

// Convenience wrapper over HolderAccumulator; needs at least two lags.
HolderEstimate holder_estimator(std::span<const std::vector<NodalField>> trajectories, std::span<const std::size_t> lags,
                                double dt, const CsrMatrix& mass, const CsrMatrix& stiffness);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sacfem
