#include "sacfem/stepper.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// G(u) = K u + (tau/eps^2) Nterm(u) - RHS
Eigen::VectorXd step_residual_vector(const NodalField& u, const Eigen::VectorXd& rhs, const StepWorkspace& ws) {
    return ws.implicit_operator() * u + ws.config().reaction_weight() * ws.nonlinear_term(u) - rhs;
}

double scaled_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& rhs) {
    const double scale = inf_norm(rhs);
    return inf_norm(g) / (scale > 0.0 ? scale : 1.0);
}

StepResult fixed_point(const Eigen::VectorXd& rhs, const StepWorkspace& ws,
                       const FixedPointSolver& solver, const NodalField& seed) {
    const double r = ws.config().reaction_weight();
    const double omega = ws.relaxation();
    NodalField current = seed;
    for (int k = 1; k <= solver.max_iter; ++k) {
        NodalField next = ws.solve(rhs - r * ws.nonlinear_term(current));
        if (omega != 1.0) next = (1.0 - omega) * current + omega * next;
        const double norm = inf_norm(next);
        if (!all_finite(next) || norm > kDivergenceThreshold) {
            throw DivergenceError("fixed-point iterate norm exceeded " + std::to_string(kDivergenceThreshold) +
                                      " (check tau <= eps^2 and the time-step constraint)",
                                  norm, k);
        }
        const double change = inf_norm(next - current);
        current = std::move(next);
        if (change <= solver.tol && scaled_norm(step_residual_vector(current, rhs, ws), rhs) <= 10.0 * solver.tol) {
            return StepResult{std::move(current), k};
        }
    }
    const double res = scaled_norm(step_residual_vector(current, rhs, ws), rhs);
    throw NonConvergenceError("fixed-point iteration did not converge in " + std::to_string(solver.max_iter) +
                                  " iterations (scaled residual " + std::to_string(res) + ")",
                              current, res, solver.max_iter);
}

StepResult newton(const Eigen::VectorXd& rhs, const StepWorkspace& ws, const NewtonSolver& solver,
                  const NodalField& seed) {
    const double r = ws.config().reaction_weight();
    const bool implicit_scheme = ws.config().nonlinearity == Nonlinearity::FullyImplicit;
    CsrMatrix jac_n = vertex_adjacency_pattern(ws.mesh());
    NodalField current = seed;
    Eigen::VectorXd g = step_residual_vector(current, rhs, ws);
    for (int k = 1; k <= solver.max_iter; ++k) {
        assemble_nonlinear_jacobian(ws.mesh(), current, jac_n);
        CsrMatrix jac = ws.implicit_operator();
        jac.axpy(r, jac_n);
        if (implicit_scheme) jac.axpy(-r, ws.system().M);
        const Eigen::SparseMatrix<double> j = jac.to_eigen();

        Eigen::VectorXd direction;
        if (ws.symmetric_operator()) {
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(j);
            if (ldlt.info() != Eigen::Success) throw SolverError("Newton: LDLT factorization failed");
            direction = ldlt.solve(-g);
        } else {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.analyzePattern(j);
            lu.factorize(j);
            if (lu.info() != Eigen::Success) throw SolverError("Newton: LU factorization failed");
            direction = lu.solve(-g);
        }
        if (!all_finite(direction)) throw SolverError("Newton: non-finite update");

        // Backtrack on the residual norm.
        const double g_norm = inf_norm(g);
        double alpha = 1.0;
        NodalField trial = current + direction;
        Eigen::VectorXd g_trial = step_residual_vector(trial, rhs, ws);
        while (inf_norm(g_trial) > g_norm && alpha > 1.0 / 1024.0) {
            alpha *= 0.5;
            trial = current + alpha * direction;
            g_trial = step_residual_vector(trial, rhs, ws);
        }
        const double change = alpha * inf_norm(direction);
        current = std::move(trial);
        g = std::move(g_trial);
        const double norm = inf_norm(current);
        if (!all_finite(current) || norm > kDivergenceThreshold) {
            throw DivergenceError("Newton iterate norm exceeded " + std::to_string(kDivergenceThreshold), norm, k);
        }
        if (change <= solver.tol && scaled_norm(g, rhs) <= 10.0 * solver.tol) {
            return StepResult{std::move(current), k};
        }
    }
    const double res = scaled_norm(g, rhs);
    throw NonConvergenceError("Newton iteration did not converge in " + std::to_string(solver.max_iter) +
                                  " iterations (scaled residual " + std::to_string(res) + ")",
                              current, res, solver.max_iter);
}

}  // namespace

void SchemeConfig::validate() const {
    if (!(epsilon > 0.0)) throw InvalidArgument("scheme.epsilon must be > 0");
    if (!(delta >= 0.0)) throw InvalidArgument("scheme.delta must be >= 0");
    if (!(tau > 0.0)) throw InvalidArgument("scheme.tau must be > 0");
    std::visit(
        [](const auto& s) {
            if (!(s.tol > 0.0)) throw InvalidArgument("solver.tol must be > 0");
            if (s.max_iter < 1) throw InvalidArgument("solver.max_iter must be >= 1");
        },
        solver);
    if (const auto* fp = std::get_if<FixedPointSolver>(&solver)) {
        if (!(fp->relaxation >= 0.0 && fp->relaxation <= 1.0)) {
            throw InvalidArgument("solver.relaxation must lie in [0, 1] (0 = automatic)");
        }
    }
    if (nonlinearity == Nonlinearity::FullyImplicit && tau > epsilon * epsilon) {
        throw InvalidArgument("fully implicit scheme requires tau <= eps^2 (step functional must be strictly convex)");
    }
}

struct StepWorkspace::Factorization {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> cholesky;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool use_cholesky = true;
};

StepWorkspace::StepWorkspace(Mesh mesh, const NoiseField& field, SchemeConfig config, const AssemblyOptions& options)
    : mesh_(std::move(mesh)), config_(config) {
    config_.validate();
    system_ = assemble_system(mesh_, field, options);
    build();
}

StepWorkspace::StepWorkspace(Mesh mesh, SystemMatrices system, SchemeConfig config)
    : mesh_(std::move(mesh)), system_(std::move(system)), config_(config) {
    config_.validate();
    if (system_.M.rows() != mesh_.num_vertices()) {
        throw InvalidArgument("StepWorkspace: system matrices do not match the mesh");
    }
    build();
}

StepWorkspace::~StepWorkspace() = default;
StepWorkspace::StepWorkspace(StepWorkspace&&) noexcept = default;
StepWorkspace& StepWorkspace::operator=(StepWorkspace&&) noexcept = default;

void StepWorkspace::build() {
    const double tau = config_.tau;
    const double half_d2 = 0.5 * config_.delta * config_.delta;
    implicit_op_ = system_.M;
    implicit_op_.axpy(tau, system_.A).axpy(tau * half_d2, system_.AX);
    if (config_.convection == Convection::Implicit) {
        implicit_op_.axpy(tau * half_d2, system_.C1);
    }

    factor_ = std::make_unique<Factorization>();
    const Eigen::SparseMatrix<double> k = implicit_op_.to_eigen();
    if (config_.convection == Convection::Explicit) {
        factor_->cholesky.compute(k);
        if (factor_->cholesky.info() != Eigen::Success) {
            throw SolverError("Cholesky factorization of M + tau(A + delta^2/2 AX) failed: operator is not SPD");
        }
    } else {
        factor_->use_cholesky = false;
        factor_->lu.analyzePattern(k);
        factor_->lu.factorize(k);
        if (factor_->lu.info() != Eigen::Success) {
            throw SolverError("LU factorization of the implicit-convection operator failed");
        }
    }

    const double lipschitz = 3.0 * config_.reaction_weight();
    relaxation_ = 1.0;
    if (const auto* fp = std::get_if<FixedPointSolver>(&config_.solver)) {
        if (fp->relaxation > 0.0) {
            relaxation_ = fp->relaxation;
        } else if (lipschitz >= 1.0) {
            relaxation_ = 2.0 / (2.0 + lipschitz);
        }
    }

    const double eps2 = config_.epsilon * config_.epsilon;
    const double d4 = std::pow(config_.delta, 4);
    if (config_.tau > 1.0 / (1.0 / eps2 + d4)) {
        std::ostringstream msg;
        msg << "tau = " << config_.tau << " exceeds (eps^-2 + delta^4)^-1 = " << 1.0 / (1.0 / eps2 + d4)
            << "; convergence guarantees may not apply";
        warnings_.push_back(msg.str());
    }
}

Eigen::VectorXd StepWorkspace::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = factor_->use_cholesky ? Eigen::VectorXd(factor_->cholesky.solve(rhs))
                                              : Eigen::VectorXd(factor_->lu.solve(rhs));
    return x;
}

Eigen::VectorXd StepWorkspace::rhs(const NodalField& u_n, double dW) const {
    const double mass_weight =
        config_.nonlinearity == Nonlinearity::ConvexSplitting ? 1.0 + config_.reaction_weight() : 1.0;
    Eigen::VectorXd out = mass_weight * (system_.M * u_n);
    if (config_.delta != 0.0) {
        if (config_.convection == Convection::Explicit) {
            out -= (0.5 * config_.tau * config_.delta * config_.delta) * (system_.C1 * u_n);
        }
        if (dW != 0.0) out += (config_.delta * dW) * (system_.C2 * u_n);
    }
    return out;
}

Eigen::VectorXd StepWorkspace::nonlinear_term(const NodalField& u) const {
    Eigen::VectorXd n = assemble_nonlinear(mesh_, u);
    if (config_.nonlinearity == Nonlinearity::FullyImplicit) n -= system_.M * u;
    return n;
}

StepResult step(const NodalField& u_n, double dW, const StepWorkspace& ws, const NodalField* guess) {
    if (static_cast<std::size_t>(u_n.size()) != ws.mesh().num_vertices()) {
        throw InvalidArgument("step: state size does not match the mesh");
    }
    if (!all_finite(u_n)) throw InvalidArgument("step: state contains non-finite values");
    const Eigen::VectorXd rhs = ws.rhs(u_n, dW);
    const NodalField& seed = guess != nullptr ? *guess : u_n;
    return std::visit(
        [&](const auto& solver) -> StepResult {
            using S = std::decay_t<decltype(solver)>;
            if constexpr (std::is_same_v<S, FixedPointSolver>) {
                return fixed_point(rhs, ws, solver, seed);
            } else {
                return newton(rhs, ws, solver, seed);
            }
        },
        ws.config().solver);
}

double residual(const NodalField& u_next, const NodalField& u_n, double dW, const StepWorkspace& ws) {
    const Eigen::VectorXd rhs = ws.rhs(u_n, dW);
    return scaled_norm(step_residual_vector(u_next, rhs, ws), rhs);
}

double eval_scheme_energy(const NodalField& v, const NodalField& u_n, double dW, const StepWorkspace& ws) {
    const SchemeConfig& cfg = ws.config();
    if (cfg.convection != Convection::Explicit) {
        throw InvalidArgument("eval_scheme_energy: the implicit-convection step has no variational form");
    }
    // 1/2 v'Kv - v'RHS reproduces the quadratic and linear parts of both functionals.
    const double quadratic = 0.5 * v.dot(ws.implicit_operator() * v);
    const double linear = v.dot(ws.rhs(u_n, dW));
    const double potential = cfg.nonlinearity == Nonlinearity::FullyImplicit
                                 ? integrate_double_well(ws.mesh(), v)
                                 : integrate_convex_quartic(ws.mesh(), v);
    return quadratic + cfg.reaction_weight() * potential - linear;
}

std::size_t march(const NodalField& u0, std::span<const double> dW, const StepWorkspace& ws, const StepVisitor& visit,
                  bool extrapolate_guess) {
    const double tau = ws.config().tau;
    NodalField current = u0;
    NodalField previous;
    std::size_t total = 0;
    visit(0, 0.0, current);
    for (std::size_t n = 0; n < dW.size(); ++n) {
        StepResult r;
        if (extrapolate_guess && n > 0) {
            const NodalField guess = 2.0 * current - previous;
            r = step(current, dW[n], ws, &guess);
        } else {
            r = step(current, dW[n], ws);
        }
        total += static_cast<std::size_t>(r.iterations);
        previous = std::move(current);
        current = std::move(r.u);
        visit(n + 1, tau * static_cast<double>(n + 1), current);
    }
    return total;
}

Trajectory run_trajectory(const NodalField& u0, std::span<const double> dW, const StepWorkspace& ws,
                          const MarchOptions& options) {
    if (options.stride == 0) throw InvalidArgument("run_trajectory: stride must be >= 1");
    Trajectory traj;
    const std::size_t last = dW.size();
    traj.total_iterations = march(
        u0, dW, ws,
        [&](std::size_t n, double t, const NodalField& u) {
            if (n % options.stride == 0 || n == last) {
                traj.times.push_back(t);
                traj.states.push_back(u);
            }
        },
        options.extrapolate_guess);
    return traj;
}

Trajectory run_trajectory(const NodalField& u0, const BrownianPath& path, const StepWorkspace& ws, double T,
                          const MarchOptions& options) {
    const double tau = ws.config().tau;
    const std::size_t steps = commensurate_steps(T, tau, "run_trajectory");
    const MacroIncrements macro = macro_increments(path, tau);
    if (macro.dW.size() < steps) {
        throw InvalidArgument("run_trajectory: Brownian path is shorter than T");
    }
    return run_trajectory(u0, std::span<const double>(macro.dW.data(), steps), ws, options);
}

}  // namespace sacfem
