#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sacfem/montecarlo.hpp"

namespace sacfem {

struct OutputConfig {
    std::string directory = "out";
    std::size_t field_stride = 10;
    std::vector<std::string> formats{"csv", "vtk"};
    // Snapshot times for the levelset command.
    std::vector<double> times;
};

/// Everything a CLI run needs. Text form is flat `key = value` lines with
/// dotted section names; `#` starts a comment.
struct RunConfig {
    EnsembleConfig ensemble;
    OutputConfig output;

    static RunConfig parse(const std::string& text, const std::string& source = "<config>");
    static RunConfig load(const std::string& path);
    std::string serialize() const;

    // Applies one `key = value` assignment (same validation as parse).
    void set(const std::string& key, const std::string& value);
    void validate() const;

    static const std::vector<std::string>& keys();

    bool operator==(const RunConfig& other) const { return serialize() == other.serialize(); }
};

// FNV-1a 64-bit of the serialized config, hex encoded.
std::string config_hash(const RunConfig& cfg);

}  // namespace sacfem
