#include "sacfem_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "sacfem/assembly.hpp"
#include "sacfem/config.hpp"
#include "sacfem/errors.hpp"
#include "sacfem/io.hpp"
#include "sacfem/mesh.hpp"
#include "sacfem/montecarlo.hpp"
#include "sacfem/noise.hpp"
#include "sacfem/observables.hpp"

namespace sacfem::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> threads;
    std::vector<std::string> overrides;
    bool quiet = false;
};

// Thrown for configuration mistakes; mapped to the usage exit code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig resolve_config(const CommonOptions& opt) {
    RunConfig cfg;
    try {
        if (!opt.config_path.empty()) cfg = RunConfig::load(opt.config_path);
        for (const auto& kv : opt.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        if (opt.seed) cfg.set("noise.master_seed", std::to_string(*opt.seed));
        if (opt.samples) cfg.set("ensemble.M", std::to_string(*opt.samples));
        if (opt.threads) cfg.set("threads", std::to_string(*opt.threads));
        if (opt.out_dir) cfg.set("output.directory", *opt.out_dir);
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

class Writer {
public:
    explicit Writer(const RunConfig& cfg)
        : dir_(cfg.output.directory), header_{config_hash(cfg), cfg.ensemble.master_seed} {
        fs::create_directories(dir_);
    }

    const OutputHeader& header() const { return header_; }

    void file(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir_ / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
        body(os);
        if (!os) throw std::runtime_error("write failed: " + path.string());
        written_.push_back(path.string());
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    OutputHeader header_;
    std::vector<std::string> written_;
};

bool wants(const RunConfig& cfg, const std::string& format) {
    return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), format) != cfg.output.formats.end();
}

std::string snapshot_name(const std::string& stem, std::size_t index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05zu.%s", stem.c_str(), index, ext);
    return buf;
}

ProgressCallback progress_printer(std::ostream& err, bool quiet, const char* label) {
    if (quiet) return {};
    return [&err, label](std::size_t done, std::size_t total) {
        if (done == total || done % std::max<std::size_t>(1, total / 10) == 0) {
            err << label << ": " << done << '/' << total << " samples\n";
        }
    };
}

EnsembleStats run_mean_field(const RunConfig& cfg, std::ostream& err, bool quiet) {
    EnsembleConfig e = cfg.ensemble;
    e.ladder.clear();
    e.tau_ref = 0.0;
    e.mean_field = true;
    return run_ensemble(e, 0, progress_printer(err, quiet, "run"));
}

void write_series(Writer& w, const std::string& name, const EnsembleStats& stats,
                  const std::vector<RunningStats>& series) {
    std::vector<double> values;
    values.reserve(series.size());
    for (const auto& s : series) values.push_back(s.mean());
    w.file(name, [&](std::ostream& os) { write_time_series_csv(os, w.header(), stats.times, values); });
}

void dump_paths(Writer& w, const RunConfig& cfg) {
    const auto& e = cfg.ensemble;
    for (std::uint64_t id = 0; id < e.samples; ++id) {
        const BrownianPath path = generate_path(e.T, e.dt_micro, e.master_seed, id);
        w.file(snapshot_name("path", id, "bin"), [&](std::ostream& os) { write_path(os, path); });
    }
}

void cmd_run(const RunConfig& cfg, bool paths, Writer& w, std::ostream& err, bool quiet) {
    const EnsembleStats stats = run_mean_field(cfg, err, quiet);
    const Mesh mesh = Mesh::generate_uniform(cfg.ensemble.mesh_n);
    write_series(w, "energy.csv", stats, stats.energy);
    write_series(w, "l2_norm.csv", stats, stats.l2_norm);
    const auto& mean = stats.mean_field.mean();
    const auto var = stats.mean_field.variance();
    {
        // Snapshot index to time lookup.
        std::vector<double> idx(stats.times.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<double>(k);
        w.file("snapshots.csv", [&](std::ostream& os) { write_time_series_csv(os, w.header(), idx, stats.times); });
    }
    for (std::size_t k = 0; k < mean.size(); ++k) {
        if (wants(cfg, "csv")) {
            w.file(snapshot_name("mean_field", k, "csv"),
                   [&](std::ostream& os) { write_field_csv(os, w.header(), mesh, mean[k]); });
        }
        if (wants(cfg, "vtk")) {
            w.file(snapshot_name("mean_field", k, "vtk"), [&](std::ostream& os) {
                write_vtk(os, w.header(), mesh, {{"mean", mean[k]}, {"variance", var[k]}});
            });
        }
    }
    if (paths) dump_paths(w, cfg);
}

void cmd_energy(const RunConfig& cfg, Writer& w, std::ostream& err, bool quiet) {
    const EnsembleStats stats = run_mean_field(cfg, err, quiet);
    write_series(w, "energy.csv", stats, stats.energy);
}

void cmd_levelset(const RunConfig& cfg, Writer& w, std::ostream& err, bool quiet) {
    if (cfg.output.times.empty()) throw UsageError("levelset: output.times is empty");
    const double stride_dt = cfg.ensemble.scheme.tau * static_cast<double>(cfg.output.field_stride);
    for (double t : cfg.output.times) {
        const double r = t / stride_dt;
        const bool on_grid = std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
        if (!(t >= 0.0 && t <= cfg.ensemble.T * (1 + 1e-12)) || !(on_grid || std::abs(t - cfg.ensemble.T) <= 1e-12)) {
            throw UsageError("levelset: time " + std::to_string(t) +
                             " is not a stored snapshot (multiples of scheme.tau * output.field_stride, or ensemble.T)");
        }
    }
    const EnsembleStats stats = run_mean_field(cfg, err, quiet);
    const Mesh mesh = Mesh::generate_uniform(cfg.ensemble.mesh_n);
    const auto& mean = stats.mean_field.mean();
    const double tol = 1e-9 * cfg.ensemble.scheme.tau;
    for (std::size_t j = 0; j < cfg.output.times.size(); ++j) {
        const double t = cfg.output.times[j];
        const auto it = std::find_if(stats.times.begin(), stats.times.end(),
                                     [&](double s) { return std::abs(s - t) <= tol; });
        if (it == stats.times.end()) {
            throw UsageError("levelset: time " + std::to_string(t) +
                             " is not a stored snapshot (multiples of scheme.tau * output.field_stride)");
        }
        const auto lines = level_set(mean[static_cast<std::size_t>(it - stats.times.begin())], mesh, 0.0);
        w.file(snapshot_name("levelset", j, "csv"), [&](std::ostream& os) {
            std::ostringstream body;
            write_levelset_csv(body, w.header(), lines);
            const std::string text = body.str();
            const auto nl = text.find('\n') + 1;
            os << text.substr(0, nl) << "# t=" << std::setprecision(17) << t << '\n' << text.substr(nl);
        });
    }
}

void cmd_converge(const RunConfig& cfg, Writer& w, std::ostream& out, std::ostream& err, bool quiet) {
    if (cfg.ensemble.ladder.size() < 2) throw UsageError("converge: ensemble.ladder needs at least two steps");
    EnsembleConfig e = cfg.ensemble;
    e.mean_field = false;
    const auto errors = strong_error(e, progress_printer(err, quiet, "converge"));
    w.file("convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, w.header(), errors, e.samples); });
    const auto orders = convergence_orders(errors);
    for (std::size_t k = 0; k < errors.size(); ++k) {
        out << "tau=" << errors[k].tau << " error=" << errors[k].error << " stderr=" << errors[k].standard_error;
        if (k > 0) out << " order=" << orders[k - 1];
        out << '\n';
    }
}

void cmd_matrices(const RunConfig& cfg, Writer& w) {
    const Mesh mesh = Mesh::generate_uniform(cfg.ensemble.mesh_n);
    const NoiseField field(cfg.ensemble.bump);
    const SystemMatrices sys = assemble_system(mesh, field, cfg.ensemble.assembly);
    const std::pair<const char*, const CsrMatrix*> mats[] = {
        {"M.mtx", &sys.M}, {"A.mtx", &sys.A}, {"AX.mtx", &sys.AX}, {"C1.mtx", &sys.C1}, {"C2.mtx", &sys.C2}};
    for (const auto& [name, m] : mats) {
        w.file(name, [&](std::ostream& os) { write_matrix_market(os, w.header(), *m); });
    }
    w.file("mesh.off", [&](std::ostream& os) {
        os << "# " << w.header().line() << '\n';
        write_mesh_off(os, mesh);
    });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic Allen-Cahn finite element solver", args.empty() ? "sacfem" : args[0]};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    CommonOptions opt;
    bool list_keys = false;
    bool paths = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "Master seed (noise.master_seed)");
        sub->add_option("-o,--out", opt.out_dir, "Output directory (output.directory)");
        sub->add_option("-M,--samples", opt.samples, "Monte Carlo samples (ensemble.M)");
        sub->add_option("-j,--threads", opt.threads, "Worker threads");
        sub->add_option("-s,--set", opt.overrides, "Override a config key: key=value (repeatable)");
        sub->add_flag("-q,--quiet", opt.quiet, "No progress output");
    };

    auto* run_cmd = app.add_subcommand("run", "Ensemble run; writes mean fields, energy and L2 norm series");
    add_common(run_cmd);
    run_cmd->add_flag("--dump-paths", paths, "Also write each sample's Brownian path");
    auto* converge_cmd = app.add_subcommand("converge", "Strong-error ladder; writes convergence.csv");
    add_common(converge_cmd);
    auto* levelset_cmd = app.add_subcommand("levelset", "Zero level set of the mean field at output.times");
    add_common(levelset_cmd);
    auto* energy_cmd = app.add_subcommand("energy", "Mean energy time series");
    add_common(energy_cmd);
    auto* matrices_cmd = app.add_subcommand("matrices", "Matrix Market dumps of M, A, AX, C1, C2 and the mesh");
    add_common(matrices_cmd);
    auto* config_cmd = app.add_subcommand("config", "Print the resolved configuration");
    add_common(config_cmd);
    config_cmd->add_flag("--keys", list_keys, "List valid keys instead");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (config_cmd->parsed() && list_keys) {
            for (const auto& k : RunConfig::keys()) out << k << '\n';
            return kOk;
        }
        const RunConfig cfg = resolve_config(opt);
        if (config_cmd->parsed()) {
            out << cfg.serialize();
            return kOk;
        }
        Writer w(cfg);
        if (run_cmd->parsed()) cmd_run(cfg, paths, w, err, opt.quiet);
        if (converge_cmd->parsed()) cmd_converge(cfg, w, out, err, opt.quiet);
        if (levelset_cmd->parsed()) cmd_levelset(cfg, w, err, opt.quiet);
        if (energy_cmd->parsed()) cmd_energy(cfg, w, err, opt.quiet);
        if (matrices_cmd->parsed()) cmd_matrices(cfg, w);
        w.file("config.txt", [&](std::ostream& os) {
            os << "# " << w.header().line() << '\n' << cfg.serialize();
        });
        if (!opt.quiet) {
            for (const auto& f : w.written()) err << "wrote " << f << '\n';
        }
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const EnsembleFailure& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& [id, what] : e.failures()) err << "  sample " << id << ": " << what << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace sacfem::cli
