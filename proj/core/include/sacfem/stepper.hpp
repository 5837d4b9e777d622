#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sacfem/assembly.hpp"
#include "sacfem/mesh.hpp"
#include "sacfem/noise.hpp"
#include "sacfem/vector_field.hpp"

namespace sacfem {

enum class Nonlinearity { FullyImplicit, ConvexSplitting };
enum class Convection { Explicit, Implicit };

struct FixedPointSolver {
    double tol = 1e-10;
    int max_iter = 100;
    // Under-relaxation weight in (0, 1]; 0 selects 2 / (2 + 3 tau / eps^2)
    // when 3 tau / eps^2 >= 1 and 1 otherwise.
    double relaxation = 0.0;
};

struct NewtonSolver {
    double tol = 1e-10;
    int max_iter = 50;
};

using SolverConfig = std::variant<FixedPointSolver, NewtonSolver>;

struct SchemeConfig {
    double epsilon = 0.1;
    double delta = 1.0;
    double tau = 1e-3;
    Nonlinearity nonlinearity = Nonlinearity::ConvexSplitting;
    Convection convection = Convection::Explicit;
    SolverConfig solver = FixedPointSolver{};

    // Throws InvalidArgument; FullyImplicit requires tau <= eps^2.
    void validate() const;
    double reaction_weight() const { return tau / (epsilon * epsilon); }
};

inline constexpr double kDivergenceThreshold = 1e6;

/// Matrices, implicit operator and its factorization for one (mesh, config).
/// Immutable after construction; solve() may be called concurrently.
class StepWorkspace {
public:
    StepWorkspace(Mesh mesh, const NoiseField& field, SchemeConfig config, const AssemblyOptions& options = {});
    StepWorkspace(Mesh mesh, SystemMatrices system, SchemeConfig config);
    ~StepWorkspace();
    StepWorkspace(StepWorkspace&&) noexcept;
    StepWorkspace& operator=(StepWorkspace&&) noexcept;

    const Mesh& mesh() const { return mesh_; }
    const SystemMatrices& system() const { return system_; }
    const SchemeConfig& config() const { return config_; }
    // K = M + tau (A + delta^2/2 AX), plus tau delta^2/2 C1 for implicit convection.
    const CsrMatrix& implicit_operator() const { return implicit_op_; }
    bool symmetric_operator() const { return config_.convection == Convection::Explicit; }
    double relaxation() const { return relaxation_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    // Right-hand side of the step for the given state and increment.
    Eigen::VectorXd rhs(const NodalField& u_n, double dW) const;
    // N(u) for convex splitting, N(u) - M u for the fully implicit scheme.
    Eigen::VectorXd nonlinear_term(const NodalField& u) const;

private:
    void build();

    struct Factorization;

    Mesh mesh_;
    SystemMatrices system_;
    SchemeConfig config_;
    CsrMatrix implicit_op_;
    std::unique_ptr<Factorization> factor_;
    double relaxation_ = 1.0;
    std::vector<std::string> warnings_;
};

struct StepResult {
    NodalField u;
    int iterations = 0;
};

/// One step of the scheme. `guess` (optional) seeds the nonlinear iteration;
/// the default seed is u_n.
StepResult step(const NodalField& u_n, double dW, const StepWorkspace& ws, const NodalField* guess = nullptr);

// ||K u + (tau/eps^2) Nterm(u) - RHS||_inf / ||RHS||_inf (unscaled when RHS = 0).
double residual(const NodalField& u_next, const NodalField& u_n, double dW, const StepWorkspace& ws);

/// The strictly convex functional whose minimizer is the step: I(v) for the
/// fully implicit scheme, H(v) for convex splitting. Explicit convection only.
double eval_scheme_energy(const NodalField& v, const NodalField& u_n, double dW, const StepWorkspace& ws);

struct Trajectory {
    std::vector<double> times;
    std::vector<NodalField> states;
    std::size_t total_iterations = 0;
};

struct MarchOptions {
    // Keep every `stride`-th state (the initial and final states are always kept).
    std::size_t stride = 1;
    // Seed each nonlinear solve with 2 u_n - u_{n-1}.
    bool extrapolate_guess = false;
};

using StepVisitor = std::function<void(std::size_t n, double t, const NodalField& u)>;

// Calls visit(n, t_n, u_n) for n = 0..dW.size(). Returns the total nonlinear iterations.
std::size_t march(const NodalField& u0, std::span<const double> dW, const StepWorkspace& ws, const StepVisitor& visit,
                  bool extrapolate_guess = false);

Trajectory run_trajectory(const NodalField& u0, std::span<const double> dW, const StepWorkspace& ws,
                          const MarchOptions& options = {});
// Uses the first T / tau macro increments of `path`.
Trajectory run_trajectory(const NodalField& u0, const BrownianPath& path, const StepWorkspace& ws, double T,
                          const MarchOptions& options = {});

}  // namespace sacfem
