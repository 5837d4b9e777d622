// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any selected criterion fails.
//
//   sacfem_acceptance            all criteria
//   sacfem_acceptance 3 4 6      a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sacfem/assembly.hpp"
#include "sacfem/initial_conditions.hpp"
#include "sacfem/montecarlo.hpp"
#include "sacfem/noise.hpp"
#include "sacfem/observables.hpp"
#include "sacfem/stepper.hpp"
#include "sacfem_cli/cli.hpp"
#include "support/oracles.hpp"

using namespace sacfem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

SchemeConfig scheme(double eps, double delta, double tau, Nonlinearity nl, SolverConfig solver) {
    SchemeConfig c;
    c.epsilon = eps;
    c.delta = delta;
    c.tau = tau;
    c.nonlinearity = nl;
    c.solver = solver;
    return c;
}

Eigen::VectorXd smooth_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double a[4][4];
    for (auto& row : a)
        for (double& x : row) x = u(rng);
    return interpolate(mesh, [&](const Point2& p) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) s += a[k][l] * std::cos(k * M_PI * (p[0] + 0.5)) * std::cos(l * M_PI * (p[1] + 0.5));
        return s / 4.0;
    });
}

Eigen::VectorXd rough_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (auto& x : v) x = u(rng);
    return v;
}

// Strong-error ladder for the elliptic interface at desk scale.
Outcome strong_error_ladder() {
    EnsembleConfig cfg;
    cfg.samples = 100;
    cfg.master_seed = 20170101;
    cfg.scheme = scheme(0.1, 1.0, 0.001, Nonlinearity::ConvexSplitting, FixedPointSolver{});
    cfg.T = 0.08;
    cfg.dt_micro = 1e-4;
    cfg.ladder = {0.008, 0.004, 0.002, 0.001};
    cfg.tau_ref = 0.00025;
    cfg.mesh_n = 64;
    cfg.mean_field = false;
    cfg.threads = worker_count();
    const auto errors = strong_error(cfg);
    const auto orders = convergence_orders(errors);
    const double target[] = {0.09895, 0.06557, 0.04472, 0.03136};
    bool pass = true;
    std::string detail = "errors";
    for (std::size_t k = 0; k < errors.size(); ++k) {
        const double rel = errors[k].error / target[k] - 1.0;
        pass = pass && std::abs(rel) <= 0.35;
        detail += fmt(" %.5f(%+.0f%%)", errors[k].error, 100.0 * rel);
    }
    detail += " orders";
    for (double o : orders) {
        pass = pass && o >= 0.35 && o <= 0.75;
        detail += fmt(" %.3f", o);
    }
    detail += " [errors within 35%, orders in [0.35, 0.75], M=100]";
    return {pass, detail};
}

// Shrinking circle against R^2 = R0^2 - 2t.
Outcome mean_curvature_shrinkage() {
    const double eps = 0.01;
    const double R0 = 0.25;
    const double tau = 1e-5;
    const Mesh mesh = Mesh::generate_uniform(256);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::circle;
    ic.radius = R0;
    const auto u0 = project_initial_condition(mesh, ic, eps);
    const StepWorkspace ws(mesh, NoiseField{},
                           scheme(eps, 0.0, tau, Nonlinearity::FullyImplicit, FixedPointSolver{1e-10, 200, 0.0}));
    const std::size_t steps = std::lround(0.5 * R0 * R0 / tau);
    const std::vector<double> dW(steps, 0.0);
    struct Done {};
    double worst = 0.0;
    double last_t = 0.0;
    double last_R = R0;
    std::size_t checks = 0;
    bool lost = false;
    try {
        march(u0, dW, ws, [&](std::size_t n, double t, const NodalField& u) {
            if (n % 20 != 0) return;
            const auto lines = level_set(u, mesh, 0.0);
            if (lines.size() != 1 || !lines[0].closed) {
                lost = true;
                throw Done{};
            }
            const double R = interface_radius(lines[0]);
            if (R < 5.0 * eps) throw Done{};
            worst = std::max(worst, std::abs(R * R - (R0 * R0 - 2.0 * t)) / (R0 * R0));
            last_t = t;
            last_R = R;
            ++checks;
        }, true);
    } catch (const Done&) {
    }
    return {!lost && checks > 100 && worst <= 0.05,
            fmt("max |R^2 - (R0^2 - 2t)| / R0^2 = %.4f over %zu checks up to t=%.4f (R=%.4f)%s [<= 0.05]", worst, checks,
                last_t, last_R, lost ? ", interface lost" : "")};
}

// Sparse assembly against the dense brute-force assembler.
Outcome matrix_oracle() {
    double worst = 0.0;
    for (std::size_t n : {1, 2, 4}) {
        const Mesh mesh = Mesh::generate_uniform(n);
        AssemblyOptions opts;
        opts.coefficient_quadrature_degree = 8;
        const auto s = assemble_system(mesh, NoiseField{}, opts);
        const auto o = oracle::dense_assemble(mesh, QuadratureRule::degree8());
        const std::pair<const CsrMatrix*, const Eigen::MatrixXd*> pairs[] = {
            {&s.M, &o.M}, {&s.A, &o.A}, {&s.AX, &o.AX}, {&s.C1, &o.C1}, {&s.C2, &o.C2}};
        for (const auto& [a, b] : pairs) worst = std::max(worst, (a->to_dense() - *b).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-8, fmt("max entry difference %.2e on n = 1, 2, 4 [<= 1e-8]", worst)};
}

// Fixed point vs Newton, residual bound and local minimality.
Outcome solver_cross_validation() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss;
    const Mesh mesh = Mesh::generate_uniform(16);
    const double tol = 1e-10;
    double worst_gap = 0.0;
    double worst_res = 0.0;
    int minimality_failures = 0;
    for (int k = 0; k < 20; ++k) {
        const double eps = 0.05 + 0.15 * unif(rng);
        const double delta = 5.0 * unif(rng);
        const double tau = eps * eps * (0.05 + 0.95 * unif(rng));
        const auto nl = (k % 2) ? Nonlinearity::FullyImplicit : Nonlinearity::ConvexSplitting;
        const StepWorkspace fp(mesh, NoiseField{}, scheme(eps, delta, tau, nl, FixedPointSolver{tol, 5000, 0.0}));
        const StepWorkspace nt(mesh, NoiseField{}, scheme(eps, delta, tau, nl, NewtonSolver{tol, 50}));
        const NodalField un = (k % 4 < 2) ? project_initial_condition(mesh, InitialCondition{}, eps)
                                          : NodalField(smooth_field(mesh, rng));
        const double dW = std::sqrt(tau) * gauss(rng);
        const auto a = step(un, dW, fp);
        const auto b = step(un, dW, nt);
        worst_gap = std::max(worst_gap, (a.u - b.u).cwiseAbs().maxCoeff());
        worst_res = std::max({worst_res, residual(a.u, un, dW, fp) / tol, residual(b.u, un, dW, nt) / tol});
        for (const auto* sol : {&a.u, &b.u}) {
            const double best = eval_scheme_energy(*sol, un, dW, nt);
            for (int p = 0; p < 64; ++p) {
                Eigen::VectorXd w(un.size());
                for (auto& x : w) x = gauss(rng);
                w /= w.cwiseAbs().maxCoeff();
                const double s = (p % 2) ? 1e-3 : 1e-4;
                if (eval_scheme_energy(*sol + s * w, un, dW, nt) < best) ++minimality_failures;
            }
        }
    }
    const bool pass = worst_gap <= 1e-8 && worst_res <= 10.0 && minimality_failures == 0;
    return {pass, fmt("20 configs: max |u_fp - u_newton| %.2e [<= 1e-8], max residual %.2f tol [<= 10], "
                      "%d of 2560 perturbations lowered the step functional [0]",
                      worst_gap, worst_res, minimality_failures)};
}

// Energy never increases under convex splitting without noise.
Outcome energy_stability() {
    std::mt19937_64 rng(505);
    const Mesh mesh = Mesh::generate_uniform(16);
    const double eps = 0.1;
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    for (double factor : {1.0, 10.0, 100.0}) {
        const StepWorkspace ws(mesh, NoiseField{},
                               scheme(eps, 0.0, factor * eps * eps, Nonlinearity::ConvexSplitting, NewtonSolver{1e-12, 100}));
        for (int k = 0; k < 200; ++k) {
            NodalField u = (k % 2) ? rough_field(mesh, rng) : smooth_field(mesh, rng);
            double J = energy(u, mesh, ws.system().A, eps);
            for (int n = 0; n < 5; ++n) {
                u = step(u, 0.0, ws).u;
                const double Jn = energy(u, mesh, ws.system().A, eps);
                worst = std::max(worst, Jn - J);
                J = Jn;
                ++steps;
            }
        }
    }
    return {worst <= 1e-10, fmt("max J(u^{n+1}) - J(u^n) = %.2e over %zu steps (200 fields x 3 step sizes) [<= 1e-10]",
                                worst, steps)};
}

std::map<std::string, std::string> csv_files(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream is(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

Outcome exact_invariants() {
    std::vector<std::string> notes;
    bool pass = true;

    // Constant states under arbitrary noise.
    double worst_const = 0.0;
    {
        std::mt19937_64 rng(606);
        std::uniform_real_distribution<double> unif(0.0, 10.0);
        const Mesh mesh = Mesh::generate_uniform(16);
        for (int k = 0; k < 8; ++k) {
            const double delta = unif(rng);
            const auto path = generate_path(0.02, 1e-4, 606, static_cast<std::uint64_t>(k));
            const auto dW = macro_increments(path, 0.001).dW;
            for (auto nl : {Nonlinearity::ConvexSplitting, Nonlinearity::FullyImplicit}) {
                for (auto conv : {Convection::Explicit, Convection::Implicit}) {
                    auto cfg = scheme(0.1, delta, 0.001, nl, FixedPointSolver{});
                    cfg.convection = conv;
                    const StepWorkspace ws(mesh, NoiseField{}, cfg);
                    for (double c : {1.0, -1.0}) {
                        const NodalField u0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), c);
                        march(u0, dW, ws, [&](std::size_t, double, const NodalField& u) {
                            worst_const = std::max(worst_const, (u.array() - c).abs().maxCoeff());
                        });
                    }
                }
            }
        }
    }
    pass = pass && worst_const <= 1e-12;
    notes.push_back(fmt("constant states drift %.1e [<= 1e-12]", worst_const));

    double worst_kernel = 0.0;
    for (std::size_t n : {1, 2, 4, 16, 64}) {
        const Mesh mesh = Mesh::generate_uniform(n);
        const auto s = assemble_system(mesh, NoiseField{});
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_vertices()));
        for (const auto* m : {&s.A, &s.AX, &s.C1, &s.C2}) worst_kernel = std::max(worst_kernel, (*m * one).cwiseAbs().maxCoeff());
    }
    pass = pass && worst_kernel <= 1e-12;
    notes.push_back(fmt("|K 1| %.1e [<= 1e-12]", worst_kernel));

    std::size_t mismatches = 0;
    std::size_t compared = 0;
    for (std::uint64_t id = 0; id < 16; ++id) {
        const auto path = generate_path(0.8, 1e-4, 20170101, id);
        for (double tau : {0.001, 0.002, 0.004}) {
            const auto fine = macro_increments(path, tau).dW;
            const auto coarse = macro_increments(path, 2 * tau).dW;
            for (std::size_t n = 0; n < coarse.size(); ++n, ++compared) {
                if (coarse[n] != fine[2 * n] + fine[2 * n + 1]) ++mismatches;
            }
        }
    }
    pass = pass && mismatches == 0 && compared > 0;
    notes.push_back(fmt("coarsening %zu/%zu bitwise", compared - mismatches, compared));

    const auto base = std::filesystem::temp_directory_path() / "sacfem_acceptance";
    std::filesystem::remove_all(base);
    const std::vector<std::string> common{"--set", "mesh.n=16", "--set", "ensemble.T=0.016", "--set", "scheme.tau=0.001",
                                          "--set", "output.field_stride=4", "--set", "ensemble.ladder=0.008,0.004,0.002",
                                          "--set", "ensemble.tau_ref=0.0005", "--seed", "99", "-M", "6", "-q"};
    bool identical = true;
    std::size_t files = 0;
    for (const char* cmd : {"run", "converge"}) {
        std::map<std::string, std::string> first;
        for (const char* threads : {"1", "2", "5"}) {
            std::vector<std::string> args{"sacfem", cmd, "-j", threads, "-o", (base / (std::string(cmd) + threads)).string()};
            args.insert(args.end(), common.begin(), common.end());
            std::ostringstream out, err;
            if (cli::run(args, out, err) != 0) {
                identical = false;
                notes.push_back("cli failed: " + err.str());
                continue;
            }
            const auto csv = csv_files(base / (std::string(cmd) + threads));
            if (first.empty()) {
                first = csv;
                files += csv.size();
            } else {
                identical = identical && csv == first;
            }
        }
    }
    std::filesystem::remove_all(base);
    pass = pass && identical && files > 0;
    notes.push_back(fmt("%zu CSV files %s across 1/2/5 workers", files, identical ? "identical" : "DIFFER"));

    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {pass, detail};
}

Outcome statistical_contracts() {
    std::vector<std::string> notes;
    bool pass = true;

    const double dt = 1e-4;
    const auto p = generate_path(10.0, dt, 20170101, 0);
    const double n = static_cast<double>(p.increments.size());
    double mean = 0.0;
    for (double x : p.increments) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : p.increments) var += (x - mean) * (x - mean);
    var /= n - 1.0;
    const double mean_z = std::abs(mean) / std::sqrt(dt / n);
    const double var_rel = std::abs(var / dt - 1.0);
    pass = pass && mean_z <= 4.0 && var_rel <= 0.05;
    notes.push_back(fmt("increment mean %.2f sd [<= 4], variance off by %.2f%% [<= 5%%]", mean_z, 100.0 * var_rel));

    const auto q = generate_path(10.0, dt, 20170101, 1);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < p.increments.size(); ++i) {
        sab += p.increments[i] * q.increments[i];
        saa += p.increments[i] * p.increments[i];
        sbb += q.increments[i] * q.increments[i];
    }
    const double corr = std::abs(sab / std::sqrt(saa * sbb)) * std::sqrt(n);
    pass = pass && corr <= 4.0;
    notes.push_back(fmt("stream correlation %.2f/sqrt(N) [<= 4]", corr));

    const Mesh mesh = Mesh::generate_uniform(16);
    const auto C2 = assemble_C2(mesh, NoiseField{});
    const auto u = project_initial_condition(mesh, InitialCondition{}, 0.1);
    const Eigen::VectorXd c2u = C2 * u;
    const double delta = 1.0, tau = 0.001;
    std::vector<RunningStats> stats(static_cast<std::size_t>(c2u.size()));
    for (std::uint64_t id = 0; id < 10000; ++id) {
        const double dW = macro_increments(generate_path(tau, 1e-4, 777, id), tau).dW[0];
        for (Eigen::Index i = 0; i < c2u.size(); ++i) stats[static_cast<std::size_t>(i)].add(delta * dW * c2u[i]);
    }
    double worst_z = 0.0;
    for (const auto& s : stats) {
        if (s.standard_error() > 0.0) worst_z = std::max(worst_z, std::abs(s.mean()) / s.standard_error());
    }
    pass = pass && worst_z <= 4.0;
    notes.push_back(fmt("noise term max |mean| %.2f SE over M=10^4 [<= 4]", worst_z));

    std::string detail;
    for (const auto& s : notes) detail += (detail.empty() ? "" : "; ") + s;
    return {pass, detail};
}

// Squared L2 increments grow linearly with the lag.
Outcome holder() {
    const double eps = 0.1;
    const double tau = 1e-4;
    const double T = 0.02;
    const Mesh mesh = Mesh::generate_uniform(32);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::custom;
    ic.custom = [eps](const Point2& p) { return std::tanh(p[0] / (std::sqrt(2.0) * eps)); };
    const auto u0 = project_initial_condition(mesh, ic, eps);
    const StepWorkspace ws(mesh, NoiseField{}, scheme(eps, 1.0, tau, Nonlinearity::ConvexSplitting, FixedPointSolver{}));
    HolderAccumulator acc({2, 4, 8, 16}, tau);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto tr = run_trajectory(u0, generate_path(T, 1e-4, 808, i), ws, T);
        acc.add_trajectory(tr.states, ws.system().M, ws.system().A);
    }
    const auto e = acc.estimate();
    std::string detail = "E||u(t)-u(s)||^2:";
    for (std::size_t k = 0; k < e.lags.size(); ++k) detail += fmt(" %.2e", e.l2_increments[k]);
    detail += fmt("; log-log slope %.3f [0.8, 1.2]", e.l2_slope);
    return {e.l2_slope >= 0.8 && e.l2_slope <= 1.2, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"strong error ladder", strong_error_ladder},
        {"mean curvature shrinkage", mean_curvature_shrinkage},
        {"matrix oracle", matrix_oracle},
        {"solver cross-validation", solver_cross_validation},
        {"energy stability", energy_stability},
        {"exact invariants", exact_invariants},
        {"statistical contracts", statistical_contracts},
        {"Holder diagnostic", holder},
    };
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria.size());
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(k));
    }
    if (selected.empty()) {
        for (std::size_t k = 1; k <= criteria.size(); ++k) selected.push_back(k);
    }

    int failed = 0;
    for (std::size_t k : selected) {
        const auto& [name, fn] = criteria[k - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu %s: %s  %s (%.1fs)\n", k, name, r.pass ? "PASS" : "FAIL", r.detail.c_str(), secs);
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
