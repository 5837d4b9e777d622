#include "sacfem/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sacfem/errors.hpp"

#ifndef SACFEM_VERSION
#define SACFEM_VERSION "0.0.0"
#endif

namespace sacfem {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* code_version() { return SACFEM_VERSION; }

std::string OutputHeader::line() const {
    std::ostringstream os;
    os << "sacfem " << version << " config=" << config_hash << " seed=" << seed << " gaussian=" << gaussian;
    return os.str();
}

void write_time_series_csv(std::ostream& os, const OutputHeader& header, std::span<const double> t,
                           std::span<const double> value) {
    if (t.size() != value.size()) throw InvalidArgument("time series: length mismatch");
    os << "# " << header.line() << '\n' << "t,value\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << num(t[i]) << ',' << num(value[i]) << '\n';
}

void write_levelset_csv(std::ostream& os, const OutputHeader& header, std::span<const LevelSetPolyline> lines) {
    os << "# " << header.line() << '\n' << "polyline_id,point_index,x,y\n";
    for (std::size_t l = 0; l < lines.size(); ++l) {
        const auto& pts = lines[l].points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            os << l << ',' << i << ',' << num(pts[i][0]) << ',' << num(pts[i][1]) << '\n';
        }
    }
}

void write_convergence_csv(std::ostream& os, const OutputHeader& header, std::span<const ErrorPoint> errors,
                           std::size_t samples) {
    os << "# " << header.line() << '\n' << "tau,error,order,stderr,M,seed\n";
    std::vector<double> orders;
    bool positive = true;
    for (const auto& e : errors) positive = positive && e.error > 0.0;
    if (positive && errors.size() > 1) orders = convergence_orders(errors);
    for (std::size_t i = 0; i < errors.size(); ++i) {
        os << num(errors[i].tau) << ',' << num(errors[i].error) << ',';
        // The order belongs to the finer step of each pair; the first row has none.
        if (i > 0 && i - 1 < orders.size()) os << num(orders[i - 1]);
        os << ',' << num(errors[i].standard_error) << ',' << samples << ',' << header.seed << '\n';
    }
}

void write_field_csv(std::ostream& os, const OutputHeader& header, const Mesh& mesh, const NodalField& u) {
    if (static_cast<std::size_t>(u.size()) != mesh.num_vertices()) throw InvalidArgument("field size mismatch");
    os << "# " << header.line() << '\n' << "vertex,x,y,u\n";
    for (const auto& v : mesh.vertices()) {
        os << v.id << ',' << num(v.x) << ',' << num(v.y) << ',' << num(u[static_cast<Eigen::Index>(v.id)]) << '\n';
    }
}

void write_vtk(std::ostream& os, const OutputHeader& header, const Mesh& mesh,
               const std::vector<std::pair<std::string, NodalField>>& point_data) {
    os << "# vtk DataFile Version 3.0\n" << header.line() << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices()) os << num(v.x) << ' ' << num(v.y) << " 0\n";
    os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) os << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    os << "CELL_TYPES " << mesh.num_triangles() << '\n';
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i) os << "5\n";
    if (point_data.empty()) return;
    os << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const auto& [name, field] : point_data) {
        if (static_cast<std::size_t>(field.size()) != mesh.num_vertices()) {
            throw InvalidArgument("vtk: field '" + name + "' has the wrong size");
        }
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Eigen::Index i = 0; i < field.size(); ++i) os << num(field[i]) << '\n';
    }
}

void write_matrix_market(std::ostream& os, const OutputHeader& header, const CsrMatrix& m) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << "% " << header.line() << '\n';
    os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k) {
            os << r + 1 << ' ' << m.col_indices()[k] + 1 << ' ' << num(m.values()[k]) << '\n';
        }
    }
}

CsrMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
        throw InvalidArgument("matrix market: unsupported banner");
    }
    while (std::getline(is, line) && !line.empty() && line[0] == '%') {
    }
    std::size_t rows = 0, cols = 0, nnz = 0;
    std::istringstream dims(line);
    if (!(dims >> rows >> cols >> nnz)) throw InvalidArgument("matrix market: bad size line");
    std::vector<std::vector<std::pair<std::size_t, double>>> entries(rows);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t r = 0, c = 0;
        double v = 0.0;
        if (!(is >> r >> c >> v) || r == 0 || c == 0 || r > rows || c > cols) {
            throw InvalidArgument("matrix market: bad entry " + std::to_string(k + 1));
        }
        entries[r - 1].emplace_back(c - 1, v);
    }
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> columns;
    std::vector<double> values;
    for (auto& row : entries) {
        std::sort(row.begin(), row.end());
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k].first == row[k - 1].first) {
                values.back() += row[k].second;
                continue;
            }
            columns.push_back(row[k].first);
            values.push_back(row[k].second);
        }
        offsets.push_back(columns.size());
    }
    return CsrMatrix(rows, cols, std::move(offsets), std::move(columns), std::move(values));
}

}  // namespace sacfem
