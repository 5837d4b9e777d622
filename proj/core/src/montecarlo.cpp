#include "sacfem/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "sacfem/errors.hpp"
#include "sacfem/noise.hpp"
#include "sacfem/observables.hpp"

namespace sacfem {

void RunningStats::add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double d = other.mean_ - mean_;
    mean_ += d * nb / n;
    m2_ += other.m2_ + d * d * na * nb / n;
    count_ += other.count_;
}

double RunningStats::variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

double RunningStats::standard_error() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

void FieldStats::add(std::span<const NodalField> snapshots) {
    if (count_ == 0) {
        mean_.assign(snapshots.begin(), snapshots.end());
        m2_.assign(snapshots.size(), NodalField());
        for (std::size_t k = 0; k < snapshots.size(); ++k) m2_[k] = NodalField::Zero(snapshots[k].size());
        count_ = 1;
        return;
    }
    if (snapshots.size() != mean_.size()) throw InvalidArgument("FieldStats::add: snapshot count mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const NodalField d = snapshots[k] - mean_[k];
        mean_[k] += inv * d;
        m2_[k].array() += d.array() * (snapshots[k] - mean_[k]).array();
    }
}

void FieldStats::merge(const FieldStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    if (other.mean_.size() != mean_.size()) throw InvalidArgument("FieldStats::merge: snapshot count mismatch");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t k = 0; k < mean_.size(); ++k) {
        const NodalField d = other.mean_[k] - mean_[k];
        mean_[k] += (nb / n) * d;
        m2_[k] += other.m2_[k] + (na * nb / n) * d.cwiseProduct(d);
    }
    count_ += other.count_;
}

std::vector<NodalField> FieldStats::variance() const {
    std::vector<NodalField> out;
    for (const auto& m2 : m2_) {
        out.push_back(count_ > 1 ? NodalField(m2 / static_cast<double>(count_ - 1)) : NodalField::Zero(m2.size()));
    }
    return out;
}

double EnsembleConfig::effective_tau_ref() const {
    if (tau_ref > 0.0) return tau_ref;
    if (ladder.empty()) return 0.0;
    return *std::min_element(ladder.begin(), ladder.end()) / 4.0;
}

void EnsembleConfig::validate() const {
    if (samples < 1) throw InvalidArgument("ensemble.M must be >= 1");
    if (!(T > 0.0)) throw InvalidArgument("ensemble.T must be > 0");
    if (!(dt_micro > 0.0)) throw InvalidArgument("noise.dt_micro must be > 0");
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
    if (field_stride < 1) throw InvalidArgument("output.field_stride must be >= 1");
    if (mesh_n < 1) throw InvalidArgument("mesh.n must be >= 1");
    scheme.validate();
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!(ladder[k] > 0.0)) throw InvalidArgument("ensemble.ladder entries must be > 0");
        if (k > 0) {
            if (!(ladder[k] < ladder[k - 1])) throw InvalidArgument("ensemble.ladder must be strictly descending");
            commensurate_steps(ladder[k - 1], ladder[k], "ensemble.ladder");
        }
    }
    std::vector<double> steps;
    if (mean_field) steps.push_back(scheme.tau);
    if (!ladder.empty()) {
        commensurate_steps(ladder.back(), effective_tau_ref(), "ensemble.tau_ref");
        steps.insert(steps.end(), ladder.begin(), ladder.end());
        steps.push_back(effective_tau_ref());
    }
    for (double s : steps) commensurate_steps(T, s, "ensemble.T");
    commensurate_steps(T, dt_micro, "ensemble.T");
    if (!steps.empty()) path_refinement_factor(dt_micro, steps);
}

void EnsembleStats::merge(const EnsembleStats& other) {
    if (other.samples == 0) return;
    if (samples == 0) {
        *this = other;
        return;
    }
    if (other.times != times || other.levels.size() != levels.size()) {
        throw InvalidArgument("EnsembleStats::merge: incompatible ensembles");
    }
    samples += other.samples;
    mean_field.merge(other.mean_field);
    for (std::size_t k = 0; k < energy.size(); ++k) {
        energy[k].merge(other.energy[k]);
        l2_norm[k].merge(other.l2_norm[k]);
    }
    sample_energy.insert(sample_energy.end(), other.sample_energy.begin(), other.sample_energy.end());
    sample_l2_norm.insert(sample_l2_norm.end(), other.sample_l2_norm.begin(), other.sample_l2_norm.end());
    for (std::size_t l = 0; l < levels.size(); ++l) levels[l].error.merge(other.levels[l].error);
    total_iterations += other.total_iterations;
}

std::size_t path_refinement_factor(double dt_micro, std::span<const double> steps) {
    for (std::size_t r = 1; r <= 64; ++r) {
        const double fine = dt_micro / static_cast<double>(r);
        const bool ok = std::all_of(steps.begin(), steps.end(), [&](double s) {
            const double ratio = s / fine;
            const double rounded = std::round(ratio);
            return rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * rounded;
        });
        if (ok) return r;
    }
    throw InvalidArgument("time steps are not commensurate with noise.dt_micro (even after 64-fold refinement)");
}

namespace {

struct SampleResult {
    std::vector<NodalField> snapshots;
    std::vector<double> energy;
    std::vector<double> l2;
    std::vector<double> level_errors;
    std::size_t iterations = 0;
};

class EnsembleRunner {
public:
    explicit EnsembleRunner(const EnsembleConfig& cfg)
        : cfg_(cfg), mesh_(Mesh::generate_uniform(cfg.mesh_n)), field_(cfg.bump) {
        system_ = assemble_system(mesh_, field_, cfg_.assembly);
        u0_ = project_initial_condition(mesh_, cfg_.initial, cfg_.scheme.epsilon);

        std::vector<double> steps;
        if (cfg_.mean_field) steps.push_back(cfg_.scheme.tau);
        steps.insert(steps.end(), cfg_.ladder.begin(), cfg_.ladder.end());
        if (!cfg_.ladder.empty()) steps.push_back(cfg_.effective_tau_ref());
        for (double s : steps) commensurate_steps(cfg_.T, s, "ensemble.T");
        refinement_ = steps.empty() ? 1 : path_refinement_factor(cfg_.dt_micro, steps);
        for (double s : steps) workspace(s);
    }

    std::size_t refinement() const { return refinement_; }
    const Mesh& mesh() const { return mesh_; }

    std::vector<double> output_times() const {
        std::vector<double> times;
        if (!cfg_.mean_field) return times;
        const std::size_t steps = commensurate_steps(cfg_.T, cfg_.scheme.tau, "ensemble.T");
        for (std::size_t n = 0; n <= steps; ++n) {
            if (n % cfg_.field_stride == 0 || n == steps) times.push_back(cfg_.scheme.tau * static_cast<double>(n));
        }
        return times;
    }

    SampleResult run_sample(std::uint64_t id) const {
        SampleResult res;
        BrownianPath path = generate_path(cfg_.T, cfg_.dt_micro, cfg_.master_seed, id);
        if (refinement_ > 1) path = refine_path(path, refinement_);

        if (cfg_.mean_field) {
            const StepWorkspace& ws = workspace_at(cfg_.scheme.tau);
            const MacroIncrements macro = macro_increments(path, cfg_.scheme.tau);
            const std::size_t last = macro.dW.size();
            res.iterations += march(u0_, macro.dW, ws, [&](std::size_t n, double, const NodalField& u) {
                if (n % cfg_.field_stride == 0 || n == last) {
                    res.snapshots.push_back(u);
                    res.energy.push_back(energy(u, mesh_, system_.A, cfg_.scheme.epsilon));
                    res.l2.push_back(l2_norm(u, system_.M));
                }
            });
        }

        if (!cfg_.ladder.empty()) {
            const double tau_ref = cfg_.effective_tau_ref();
            const double tau_min = cfg_.ladder.back();
            const std::size_t ref_stride = commensurate_steps(tau_min, tau_ref, "tau_ref");
            std::vector<NodalField> reference;
            const MacroIncrements ref_dw = macro_increments(path, tau_ref);
            res.iterations += march(u0_, ref_dw.dW, workspace_at(tau_ref), [&](std::size_t n, double, const NodalField& u) {
                if (n % ref_stride == 0) reference.push_back(u);
            });
            for (double tau : cfg_.ladder) {
                const std::size_t ratio = commensurate_steps(tau, tau_min, "ladder");
                const MacroIncrements dw = macro_increments(path, tau);
                double worst = 0.0;
                res.iterations += march(u0_, dw.dW, workspace_at(tau), [&](std::size_t n, double, const NodalField& u) {
                    const NodalField diff = reference.at(n * ratio) - u;
                    worst = std::max(worst, l2_norm(diff, system_.M));
                });
                res.level_errors.push_back(worst);
            }
        }
        return res;
    }

private:
    const StepWorkspace& workspace(double tau) {
        auto it = workspaces_.find(tau);
        if (it == workspaces_.end()) {
            SchemeConfig scheme = cfg_.scheme;
            scheme.tau = tau;
            if (scheme.nonlinearity == Nonlinearity::FullyImplicit && tau > scheme.epsilon * scheme.epsilon) {
                throw InvalidArgument("fully implicit ladder level tau = " + std::to_string(tau) + " exceeds eps^2");
            }
            it = workspaces_.emplace(tau, StepWorkspace(mesh_, system_, scheme)).first;
        }
        return it->second;
    }

    const StepWorkspace& workspace_at(double tau) const { return workspaces_.at(tau); }

    const EnsembleConfig& cfg_;
    Mesh mesh_;
    NoiseField field_;
    SystemMatrices system_;
    NodalField u0_;
    std::size_t refinement_ = 1;
    std::map<double, StepWorkspace> workspaces_;
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& cfg, std::uint64_t first_sample, const ProgressCallback& progress) {
    cfg.validate();
    const EnsembleRunner runner(cfg);

    EnsembleStats stats;
    stats.times = runner.output_times();
    stats.energy.resize(stats.times.size());
    stats.l2_norm.resize(stats.times.size());
    for (double tau : cfg.ladder) stats.levels.push_back(LevelError{tau, {}});
    stats.path_refinement = runner.refinement();

    std::mutex mutex;
    std::map<std::uint64_t, SampleResult> pending;
    std::uint64_t next_to_merge = first_sample;
    std::vector<std::pair<std::uint64_t, std::string>> failures;
    std::atomic<std::uint64_t> next_to_run{first_sample};
    std::atomic<bool> abort{false};
    const std::uint64_t end = first_sample + cfg.samples;

    auto merge_ready = [&] {
        // Caller holds the mutex.
        for (auto it = pending.find(next_to_merge); it != pending.end(); it = pending.find(next_to_merge)) {
            SampleResult& r = it->second;
            if (cfg.mean_field) stats.mean_field.add(r.snapshots);
            for (std::size_t k = 0; k < r.energy.size(); ++k) {
                stats.energy[k].add(r.energy[k]);
                stats.l2_norm[k].add(r.l2[k]);
            }
            stats.sample_energy.push_back(std::move(r.energy));
            stats.sample_l2_norm.push_back(std::move(r.l2));
            for (std::size_t l = 0; l < r.level_errors.size(); ++l) stats.levels[l].error.add(r.level_errors[l]);
            stats.total_iterations += r.iterations;
            ++stats.samples;
            pending.erase(it);
            ++next_to_merge;
            if (progress) progress(stats.samples, cfg.samples);
        }
    };

    auto worker = [&] {
        while (!abort.load()) {
            const std::uint64_t id = next_to_run.fetch_add(1);
            if (id >= end) return;
            try {
                SampleResult r = runner.run_sample(id);
                const std::lock_guard lock(mutex);
                pending.emplace(id, std::move(r));
                merge_ready();
            } catch (const std::exception& e) {
                const std::lock_guard lock(mutex);
                failures.emplace_back(id, e.what());
                abort.store(true);
            }
        }
    };

    if (cfg.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end());
        std::ostringstream msg;
        msg << failures.size() << " sample(s) failed; first: sample " << failures.front().first << ": "
            << failures.front().second;
        throw EnsembleFailure(msg.str(), std::move(failures));
    }
    return stats;
}

std::vector<ErrorPoint> strong_error(const EnsembleStats& stats) {
    std::vector<ErrorPoint> out;
    for (const auto& level : stats.levels) {
        out.push_back(ErrorPoint{level.tau, level.error.mean(), level.error.standard_error()});
    }
    return out;
}

std::vector<ErrorPoint> strong_error(const EnsembleConfig& cfg, const ProgressCallback& progress) {
    if (cfg.ladder.empty()) throw InvalidArgument("strong_error: ensemble.ladder is empty");
    EnsembleConfig c = cfg;
    c.mean_field = false;
    return strong_error(run_ensemble(c, 0, progress));
}

std::vector<double> convergence_orders(std::span<const ErrorPoint> errors) {
    if (errors.size() < 2) throw InvalidArgument("convergence_orders: need at least two ladder levels");
    std::vector<double> orders;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (!(errors[k].error > 0.0) || !(errors[k + 1].error > 0.0)) {
            throw InvalidArgument("convergence_orders: order undefined for non-positive error at tau = " +
                                  std::to_string(errors[k].error > 0.0 ? errors[k + 1].tau : errors[k].tau));
        }
        orders.push_back(std::log(errors[k].error / errors[k + 1].error) / std::log(errors[k].tau / errors[k + 1].tau));
    }
    return orders;
}

}  // namespace sacfem
