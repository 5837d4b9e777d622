#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sacfem {

/// Philox4x32-10 counter-based generator: a keyed bijection of a 128-bit
/// counter. Draws are a pure function of (key, counter), so any sample's
/// stream can be produced independently of scheduling.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter counter, Key key);
};

// Gaussian transform used for all paths; recorded in output metadata.
inline constexpr const char* kGaussianTransform = "philox4x32-10/box-muller";

/// Wiener increments on a uniform micro grid covering [0, T].
struct BrownianPath {
    double dt_micro = 1e-4;
    std::vector<double> increments;
    std::uint64_t master_seed = 0;
    std::uint64_t sample_id = 0;

    double final_time() const { return dt_micro * static_cast<double>(increments.size()); }
};

struct MacroIncrements {
    double tau = 0.0;
    std::vector<double> dW;
};

/// Stream of standard normals keyed by (master_seed, sample_id, stream).
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t sample_id, std::uint32_t stream = 0);

    // i-th standard normal of this stream.
    double at(std::uint64_t index) const;

private:
    Philox4x32::Key key_;
    std::uint64_t sample_id_;
    std::uint32_t stream_;
};

// Number of micro steps in `span`; throws InvalidArgument unless span / dt is
// an integer up to a relative fuzz of 1e-9.
std::size_t commensurate_steps(double span, double dt, const char* what);

BrownianPath generate_path(double T, double dt_micro, std::uint64_t master_seed, std::uint64_t sample_id);

/// Splits every increment into `factor` conditionally Gaussian pieces
/// (Brownian bridge). Increments of the coarse path are preserved up to
/// rounding; the bridge draws come from a separate stream of the same sample.
BrownianPath refine_path(const BrownianPath& path, std::size_t factor);

/// Aggregates micro increments into steps of size tau. A block of k = 2^j m
/// micro steps (m odd) is summed as left-to-right runs of m followed by j
/// pairwise levels, so aggregating at 2 tau equals pairwise sums at tau bit
/// for bit.
MacroIncrements macro_increments(const BrownianPath& path, double tau);

// Little-endian binary: "SACW", u32 version, f64 dt_micro, u64 count,
// u64 master_seed, u64 sample_id, then count f64 increments.
void write_path(std::ostream& os, const BrownianPath& path);
BrownianPath read_path(std::istream& is);

}  // namespace sacfem
