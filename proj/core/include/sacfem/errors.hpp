#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sacfem {

// Bad input: n = 0, non-commensurate time steps, malformed config keys.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Degenerate or inverted element.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization or linear solve failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Point-wise evaluation failure (e.g. an initial condition with no matching branch).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nonlinear iteration hit max_iter. Carries the last iterate for inspection.
class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd last_iterate, double residual, int iterations)
        : SolverError(what), last_iterate_(std::move(last_iterate)), residual_(residual), iterations_(iterations) {}

    const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    Eigen::VectorXd last_iterate_;
    double residual_;
    int iterations_;
};

// Iterate blew past the divergence threshold.
class DivergenceError : public SolverError {
public:
    DivergenceError(const std::string& what, double norm, int iterations)
        : SolverError(what), norm_(norm), iterations_(iterations) {}

    double norm() const { return norm_; }
    int iterations() const { return iterations_; }

private:
    double norm_;
    int iterations_;
};

}  // namespace sacfem
