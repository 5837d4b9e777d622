#include "sacfem/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw InvalidArgument(key + ": expected a number, got '" + value + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw InvalidArgument(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += values[i];
    }
    return out;
}

std::string solver_kind(const SolverConfig& s) {
    return std::holds_alternative<NewtonSolver>(s) ? "newton" : "fixed_point";
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{
        "mesh.n",
        "scheme.epsilon",
        "scheme.delta",
        "scheme.tau",
        "scheme.nonlinearity",
        "scheme.convection",
        "scheme.bump_denominator",
        "solver.kind",
        "solver.tol",
        "solver.max_iter",
        "solver.relaxation",
        "noise.dt_micro",
        "noise.master_seed",
        "ensemble.M",
        "ensemble.T",
        "ensemble.ladder",
        "ensemble.tau_ref",
        "initial_condition",
        "initial_condition.value",
        "initial_condition.radius",
        "assembly.coefficient_degree",
        "threads",
        "output.directory",
        "output.field_stride",
        "output.formats",
        "output.times",
    };
    return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    EnsembleConfig& e = ensemble;
    SchemeConfig& s = e.scheme;
    if (key == "mesh.n") {
        e.mesh_n = parse_u64(key, value);
    } else if (key == "scheme.epsilon") {
        s.epsilon = parse_double(key, value);
    } else if (key == "scheme.delta") {
        s.delta = parse_double(key, value);
    } else if (key == "scheme.tau") {
        s.tau = parse_double(key, value);
    } else if (key == "scheme.nonlinearity") {
        if (value == "convex_splitting") {
            s.nonlinearity = Nonlinearity::ConvexSplitting;
        } else if (value == "fully_implicit") {
            s.nonlinearity = Nonlinearity::FullyImplicit;
        } else {
            throw InvalidArgument(key + ": expected convex_splitting or fully_implicit");
        }
    } else if (key == "scheme.convection") {
        if (value == "explicit") {
            s.convection = Convection::Explicit;
        } else if (value == "implicit") {
            s.convection = Convection::Implicit;
        } else {
            throw InvalidArgument(key + ": expected explicit or implicit");
        }
    } else if (key == "scheme.bump_denominator") {
        if (value == "squared_radius") {
            e.bump = BumpDenominator::squared_radius;
        } else if (value == "literal") {
            e.bump = BumpDenominator::literal;
        } else {
            throw InvalidArgument(key + ": expected squared_radius or literal");
        }
    } else if (key == "solver.kind") {
        auto [tol, max_iter] = std::visit([](const auto& v) { return std::pair{v.tol, v.max_iter}; }, s.solver);
        if (value == "fixed_point") {
            if (!std::holds_alternative<FixedPointSolver>(s.solver)) s.solver = FixedPointSolver{tol, max_iter, 0.0};
        } else if (value == "newton") {
            if (!std::holds_alternative<NewtonSolver>(s.solver)) s.solver = NewtonSolver{tol, max_iter};
        } else {
            throw InvalidArgument(key + ": expected fixed_point or newton");
        }
    } else if (key == "solver.tol") {
        const double tol = parse_double(key, value);
        std::visit([tol](auto& v) { v.tol = tol; }, s.solver);
    } else if (key == "solver.max_iter") {
        const auto it = static_cast<int>(parse_u64(key, value));
        std::visit([it](auto& v) { v.max_iter = it; }, s.solver);
    } else if (key == "solver.relaxation") {
        const double w = parse_double(key, value);
        auto* fp = std::get_if<FixedPointSolver>(&s.solver);
        if (fp == nullptr) throw InvalidArgument(key + ": only applies to solver.kind = fixed_point");
        fp->relaxation = w;
    } else if (key == "noise.dt_micro") {
        e.dt_micro = parse_double(key, value);
    } else if (key == "noise.master_seed") {
        e.master_seed = parse_u64(key, value);
    } else if (key == "ensemble.M") {
        e.samples = parse_u64(key, value);
    } else if (key == "ensemble.T") {
        e.T = parse_double(key, value);
    } else if (key == "ensemble.ladder") {
        e.ladder = parse_list(key, value);
    } else if (key == "ensemble.tau_ref") {
        e.tau_ref = parse_double(key, value);
    } else if (key == "initial_condition") {
        e.initial.kind = InitialCondition::parse_kind(value);
    } else if (key == "initial_condition.value") {
        e.initial.value = parse_double(key, value);
    } else if (key == "initial_condition.radius") {
        e.initial.radius = parse_double(key, value);
    } else if (key == "assembly.coefficient_degree") {
        const auto d = parse_u64(key, value);
        if (d != 4 && d != 6 && d != 8) throw InvalidArgument(key + ": expected 4, 6 or 8");
        e.assembly.coefficient_quadrature_degree = static_cast<int>(d);
    } else if (key == "threads") {
        e.threads = parse_u64(key, value);
    } else if (key == "output.directory") {
        output.directory = value;
    } else if (key == "output.field_stride") {
        output.field_stride = parse_u64(key, value);
        e.field_stride = output.field_stride;
    } else if (key == "output.formats") {
        output.formats = split_list(value);
        for (const auto& f : output.formats) {
            if (f != "csv" && f != "vtk") throw InvalidArgument(key + ": unknown format '" + f + "' (csv, vtk)");
        }
    } else if (key == "output.times") {
        output.times = parse_list(key, value);
    } else {
        std::string valid;
        for (const auto& k : keys()) valid += "\n  " + k;
        throw InvalidArgument("unknown key '" + key + "'; valid keys:" + valid);
    }
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(source + ": " + e.what());
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void RunConfig::validate() const {
    ensemble.validate();
    if (output.field_stride < 1) throw InvalidArgument("output.field_stride must be >= 1");
}

std::string RunConfig::serialize() const {
    const EnsembleConfig& e = ensemble;
    const SchemeConfig& s = e.scheme;
    std::ostringstream os;
    const auto [tol, max_iter] = std::visit([](const auto& v) { return std::pair{v.tol, v.max_iter}; }, s.solver);
    os << "mesh.n = " << e.mesh_n << '\n';
    os << "scheme.epsilon = " << format_double(s.epsilon) << '\n';
    os << "scheme.delta = " << format_double(s.delta) << '\n';
    os << "scheme.tau = " << format_double(s.tau) << '\n';
    os << "scheme.nonlinearity = "
       << (s.nonlinearity == Nonlinearity::ConvexSplitting ? "convex_splitting" : "fully_implicit") << '\n';
    os << "scheme.convection = " << (s.convection == Convection::Explicit ? "explicit" : "implicit") << '\n';
    os << "scheme.bump_denominator = " << (e.bump == BumpDenominator::squared_radius ? "squared_radius" : "literal")
       << '\n';
    os << "solver.kind = " << solver_kind(s.solver) << '\n';
    os << "solver.tol = " << format_double(tol) << '\n';
    os << "solver.max_iter = " << max_iter << '\n';
    if (const auto* fp = std::get_if<FixedPointSolver>(&s.solver)) {
        os << "solver.relaxation = " << format_double(fp->relaxation) << '\n';
    }
    os << "noise.dt_micro = " << format_double(e.dt_micro) << '\n';
    os << "noise.master_seed = " << e.master_seed << '\n';
    os << "ensemble.M = " << e.samples << '\n';
    os << "ensemble.T = " << format_double(e.T) << '\n';
    os << "ensemble.ladder = " << join(e.ladder) << '\n';
    os << "ensemble.tau_ref = " << format_double(e.tau_ref) << '\n';
    os << "initial_condition = " << e.initial.name() << '\n';
    os << "initial_condition.value = " << format_double(e.initial.value) << '\n';
    os << "initial_condition.radius = " << format_double(e.initial.radius) << '\n';
    os << "assembly.coefficient_degree = " << e.assembly.coefficient_quadrature_degree << '\n';
    os << "threads = " << e.threads << '\n';
    os << "output.directory = " << output.directory << '\n';
    os << "output.field_stride = " << output.field_stride << '\n';
    os << "output.formats = " << join(output.formats) << '\n';
    os << "output.times = " << join(output.times) << '\n';
    return os.str();
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    RunConfig copy = cfg;
    copy.ensemble.threads = 1;
    copy.output.directory.clear();
    for (unsigned char c : copy.serialize()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sacfem
