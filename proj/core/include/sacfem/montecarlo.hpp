#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sacfem/assembly.hpp"
#include "sacfem/initial_conditions.hpp"
#include "sacfem/stepper.hpp"
#include "sacfem/vector_field.hpp"

namespace sacfem {

/// Welford mean/variance with Chan's pairwise merge.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);

    std::size_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const;  // unbiased; 0 for fewer than two samples
    double standard_error() const;

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Node-wise running mean/variance of a sequence of fields at fixed times.
class FieldStats {
public:
    void add(std::span<const NodalField> snapshots);
    void merge(const FieldStats& other);

    std::size_t count() const { return count_; }
    const std::vector<NodalField>& mean() const { return mean_; }
    std::vector<NodalField> variance() const;

private:
    std::size_t count_ = 0;
    std::vector<NodalField> mean_;
    std::vector<NodalField> m2_;
};

struct EnsembleConfig {
    std::size_t samples = 100;
    std::uint64_t master_seed = 20170101;
    SchemeConfig scheme;
    double T = 0.1;
    double dt_micro = 1e-4;
    // Strong-error ladder, descending; each entry divides the previous one.
    std::vector<double> ladder;
    // Reference step; 0 selects min(ladder) / 4.
    double tau_ref = 0.0;
    std::size_t mesh_n = 64;
    InitialCondition initial;
    BumpDenominator bump = BumpDenominator::squared_radius;
    AssemblyOptions assembly;
    std::size_t threads = 1;
    // Mean-field trajectory at scheme.tau, kept every `field_stride` steps.
    bool mean_field = true;
    std::size_t field_stride = 1;

    double effective_tau_ref() const;
    void validate() const;
};

struct LevelError {
    double tau = 0.0;
    RunningStats error;
};

struct EnsembleStats {
    std::size_t samples = 0;
    std::vector<double> times;
    FieldStats mean_field;
    std::vector<RunningStats> energy;   // per output time
    std::vector<RunningStats> l2_norm;  // per output time
    std::vector<std::vector<double>> sample_energy;  // [sample][time]
    std::vector<std::vector<double>> sample_l2_norm;
    std::vector<LevelError> levels;
    std::size_t total_iterations = 0;
    std::size_t path_refinement = 1;

    // Appends the samples of `other` (which must follow this one's sample ids).
    void merge(const EnsembleStats& other);
};

/// Thrown when any sample fails; carries every failure seen.
class EnsembleFailure : public std::runtime_error {
public:
    EnsembleFailure(const std::string& what, std::vector<std::pair<std::uint64_t, std::string>> failures)
        : std::runtime_error(what), failures_(std::move(failures)) {}

    const std::vector<std::pair<std::uint64_t, std::string>>& failures() const { return failures_; }

private:
    std::vector<std::pair<std::uint64_t, std::string>> failures_;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs samples [first_sample, first_sample + cfg.samples). Every level of the
/// ladder and the reference consume the same Brownian path of a sample.
/// Results are merged in sample-id order, so they do not depend on the
/// number of threads.
EnsembleStats run_ensemble(const EnsembleConfig& cfg, std::uint64_t first_sample = 0,
                           const ProgressCallback& progress = {});

struct ErrorPoint {
    double tau = 0.0;
    double error = 0.0;
    double standard_error = 0.0;
};

// E[max_n ||u_ref(t_n) - u_tau(t_n)||_L2] per ladder level.
std::vector<ErrorPoint> strong_error(const EnsembleConfig& cfg, const ProgressCallback& progress = {});
std::vector<ErrorPoint> strong_error(const EnsembleStats& stats);

// order_k = log(e_k / e_{k+1}) / log(tau_k / tau_{k+1}); one entry fewer than the input.
std::vector<double> convergence_orders(std::span<const ErrorPoint> errors);

// Micro-step refinement needed so every step in `steps` is a multiple of dt_micro / factor.
std::size_t path_refinement_factor(double dt_micro, std::span<const double> steps);

}  // namespace sacfem
