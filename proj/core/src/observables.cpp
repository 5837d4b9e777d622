#include "sacfem/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey make_edge(std::size_t a, std::size_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

double l2_norm(const NodalField& u, const CsrMatrix& mass) { return std::sqrt(std::max(0.0, u.dot(mass * u))); }

double h1_semi(const NodalField& u, const CsrMatrix& stiffness) {
    return std::sqrt(std::max(0.0, u.dot(stiffness * u)));
}

double energy(const NodalField& u, const Mesh& mesh, const CsrMatrix& stiffness, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("energy: epsilon must be > 0");
    return 0.5 * u.dot(stiffness * u) + integrate_double_well(mesh, u) / (epsilon * epsilon);
}

double energy(const NodalField& u, const Mesh& mesh, double epsilon) {
    return energy(u, mesh, assemble_stiffness(mesh), epsilon);
}

std::vector<LevelSetPolyline> level_set(const NodalField& u, const Mesh& mesh, double level) {
    if (static_cast<std::size_t>(u.size()) != mesh.num_vertices()) {
        throw InvalidArgument("level_set: field size does not match the mesh");
    }
    const double max_abs = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
    const double nudge = 1e-14 * (max_abs > 0.0 ? max_abs : 1.0);
    Eigen::VectorXd shifted = u.array() - level;
    for (Eigen::Index i = 0; i < shifted.size(); ++i) {
        if (shifted[i] == 0.0) shifted[i] = nudge;
    }

    // Crossing point per edge, computed from the lower vertex id so both
    // neighbouring triangles produce bit-identical coordinates.
    std::map<EdgeKey, Point2> crossing;
    auto crossing_point = [&](std::size_t a, std::size_t b) {
        const EdgeKey key = make_edge(a, b);
        auto it = crossing.find(key);
        if (it != crossing.end()) return key;
        const auto& va = mesh.vertex(key.first);
        const auto& vb = mesh.vertex(key.second);
        const double fa = shifted[static_cast<Eigen::Index>(key.first)];
        const double fb = shifted[static_cast<Eigen::Index>(key.second)];
        const double s = fa / (fa - fb);
        crossing.emplace(key, Point2{va.x + s * (vb.x - va.x), va.y + s * (vb.y - va.y)});
        return key;
    };

    std::map<EdgeKey, std::vector<EdgeKey>> links;
    for (const auto& tri : mesh.triangles()) {
        std::vector<EdgeKey> cut;
        for (int e = 0; e < 3; ++e) {
            const std::size_t a = tri.v[e];
            const std::size_t b = tri.v[(e + 1) % 3];
            const bool pa = shifted[static_cast<Eigen::Index>(a)] > 0.0;
            const bool pb = shifted[static_cast<Eigen::Index>(b)] > 0.0;
            if (pa != pb) cut.push_back(crossing_point(a, b));
        }
        if (cut.size() == 2) {
            links[cut[0]].push_back(cut[1]);
            links[cut[1]].push_back(cut[0]);
        }
    }

    std::vector<LevelSetPolyline> out;
    std::map<EdgeKey, bool> visited;
    auto walk = [&](EdgeKey start) {
        LevelSetPolyline poly;
        EdgeKey cur = start;
        visited[cur] = true;
        poly.points.push_back(crossing.at(cur));
        while (true) {
            const EdgeKey* next = nullptr;
            for (const auto& candidate : links.at(cur)) {
                if (!visited[candidate]) {
                    next = &candidate;
                    break;
                }
            }
            if (next == nullptr) break;
            cur = *next;
            visited[cur] = true;
            poly.points.push_back(crossing.at(cur));
        }
        const auto& tail = links.at(cur);
        poly.closed = poly.points.size() > 2 && links.at(start).size() == 2 &&
                      std::find(tail.begin(), tail.end(), start) != tail.end();
        return poly;
    };
    // Open polylines start at boundary edges (one link).
    for (const auto& [key, nbrs] : links) {
        if (nbrs.size() == 1 && !visited[key]) out.push_back(walk(key));
    }
    for (const auto& [key, nbrs] : links) {
        if (!visited[key]) out.push_back(walk(key));
    }
    return out;
}

double interface_radius(const LevelSetPolyline& poly) {
    if (poly.points.empty()) throw InvalidArgument("interface_radius: empty polyline");
    if (!poly.closed) throw InvalidArgument("interface_radius: polyline is not closed");
    Point2 c{0.0, 0.0};
    for (const auto& p : poly.points) {
        c[0] += p[0];
        c[1] += p[1];
    }
    const double n = static_cast<double>(poly.points.size());
    c[0] /= n;
    c[1] /= n;
    double sum = 0.0;
    for (const auto& p : poly.points) sum += std::hypot(p[0] - c[0], p[1] - c[1]);
    return sum / n;
}

HolderAccumulator::HolderAccumulator(std::vector<std::size_t> lags, double dt)
    : lags_(std::move(lags)),
      dt_(dt),
      l2_sum_(lags_.size(), 0.0),
      h1_sum_(lags_.size(), 0.0),
      nl_sum_(lags_.size(), 0.0),
      count_(lags_.size(), 0) {
    if (!(dt_ > 0.0)) throw InvalidArgument("HolderAccumulator: dt must be > 0");
}

void HolderAccumulator::add_trajectory(std::span<const NodalField> states, const CsrMatrix& mass,
                                       const CsrMatrix& stiffness) {
    std::vector<Eigen::VectorXd> reaction;
    reaction.reserve(states.size());
    for (const auto& u : states) reaction.push_back(u.array().cube() - u.array());
    for (std::size_t k = 0; k < lags_.size(); ++k) {
        const std::size_t lag = lags_[k];
        for (std::size_t s = 0; s + lag < states.size(); ++s) {
            const Eigen::VectorXd d = states[s + lag] - states[s];
            const Eigen::VectorXd df = reaction[s + lag] - reaction[s];
            l2_sum_[k] += d.dot(mass * d);
            h1_sum_[k] += d.dot(stiffness * d);
            nl_sum_[k] += df.dot(mass * df);
            ++count_[k];
        }
    }
}

HolderEstimate HolderAccumulator::estimate() const {
    HolderEstimate est;
    for (std::size_t k = 0; k < lags_.size(); ++k) {
        const double c = count_[k] > 0 ? static_cast<double>(count_[k]) : 1.0;
        est.lags.push_back(dt_ * static_cast<double>(lags_[k]));
        est.l2_increments.push_back(l2_sum_[k] / c);
        est.h1_increments.push_back(h1_sum_[k] / c);
        est.nonlinear_increments.push_back(nl_sum_[k] / c);
    }
    if (lags_.size() >= 2) {
        est.l2_slope = loglog_slope(est.lags, est.l2_increments);
        est.h1_slope = loglog_slope(est.lags, est.h1_increments);
        est.nonlinear_slope = loglog_slope(est.lags, est.nonlinear_increments);
    }
    return est;
}

HolderEstimate holder_estimator(std::span<const std::vector<NodalField>> trajectories, std::span<const std::size_t> lags,
                                double dt, const CsrMatrix& mass, const CsrMatrix& stiffness) {
    if (lags.size() < 2) throw InvalidArgument("holder_estimator: need at least two lags");
    HolderAccumulator acc(std::vector<std::size_t>(lags.begin(), lags.end()), dt);
    for (const auto& traj : trajectories) acc.add_trajectory(traj, mass, stiffness);
    return acc.estimate();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 matching points");
    double mx = 0.0, my = 0.0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nan("");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        mx += lx.back();
        my += ly.back();
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace sacfem
