#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sacfem/assembly.hpp"
#include "sacfem/mesh.hpp"
#include "sacfem/montecarlo.hpp"
#include "sacfem/observables.hpp"
#include "sacfem/sparse.hpp"

namespace sacfem {

const char* code_version();

/// Provenance written at the top of every output file.
struct OutputHeader {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string gaussian = kGaussianTransform;
    std::string version = code_version();

    std::string line() const;  // "sacfem <version> config=<hash> seed=<seed> gaussian=<...>"
};

// CSV files start with "# <header>" comment lines.
void write_time_series_csv(std::ostream& os, const OutputHeader& header, std::span<const double> t,
                           std::span<const double> value);
void write_levelset_csv(std::ostream& os, const OutputHeader& header, std::span<const LevelSetPolyline> lines);
void write_convergence_csv(std::ostream& os, const OutputHeader& header, std::span<const ErrorPoint> errors,
                           std::size_t samples);
void write_field_csv(std::ostream& os, const OutputHeader& header, const Mesh& mesh, const NodalField& u);

// Legacy VTK 3.0 ASCII unstructured grid with point data.
void write_vtk(std::ostream& os, const OutputHeader& header, const Mesh& mesh,
               const std::vector<std::pair<std::string, NodalField>>& point_data);

// Matrix Market coordinate real general, 1-based indices.
void write_matrix_market(std::ostream& os, const OutputHeader& header, const CsrMatrix& m);
CsrMatrix read_matrix_market(std::istream& is);

}  // namespace sacfem
