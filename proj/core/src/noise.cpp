#include "sacfem/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <type_traits>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint32_t kPathFormatVersion = 1;
constexpr char kPathMagic[4] = {'S', 'A', 'C', 'W'};

// Uniform in the open interval (0, 1) from 53 random bits.
double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(bytes), std::end(bytes));
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw InvalidArgument("read_path: truncated input");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(bytes), std::end(bytes));
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t sample_id, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
      sample_id_(sample_id),
      stream_(stream) {}

double NormalStream::at(std::uint64_t index) const {
    const std::uint64_t block = index / 2;
    if (block > 0xFFFFFFFFull) {
        throw InvalidArgument("NormalStream: index exceeds the 2^33 draws available per stream");
    }
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), stream_, static_cast<std::uint32_t>(sample_id_),
                                  static_cast<std::uint32_t>(sample_id_ >> 32)};
    const auto r = Philox4x32::apply(ctr, key_);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

std::size_t commensurate_steps(double span, double dt, const char* what) {
    if (!(span > 0.0) || !(dt > 0.0) || !std::isfinite(span / dt)) {
        throw InvalidArgument(std::string(what) + ": step and span must be positive");
    }
    const double ratio = span / dt;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * steps) {
        throw InvalidArgument(std::string(what) + ": " + std::to_string(span) + " is not an integer multiple of " +
                              std::to_string(dt));
    }
    return static_cast<std::size_t>(steps);
}

BrownianPath generate_path(double T, double dt_micro, std::uint64_t master_seed, std::uint64_t sample_id) {
    const std::size_t count = commensurate_steps(T, dt_micro, "generate_path");
    BrownianPath path;
    path.dt_micro = dt_micro;
    path.master_seed = master_seed;
    path.sample_id = sample_id;
    path.increments.resize(count);
    const NormalStream normals(master_seed, sample_id);
    const double scale = std::sqrt(dt_micro);
    for (std::size_t i = 0; i < count; ++i) {
        path.increments[i] = scale * normals.at(i);
    }
    return path;
}

BrownianPath refine_path(const BrownianPath& path, std::size_t factor) {
    if (factor == 0) {
        throw InvalidArgument("refine_path: factor must be >= 1");
    }
    if (factor == 1) return path;
    BrownianPath fine;
    fine.dt_micro = path.dt_micro / static_cast<double>(factor);
    fine.master_seed = path.master_seed;
    fine.sample_id = path.sample_id;
    fine.increments.reserve(path.increments.size() * factor);
    const NormalStream normals(path.master_seed, path.sample_id, static_cast<std::uint32_t>(factor));
    std::uint64_t draw = 0;
    for (double increment : path.increments) {
        double remaining = increment;
        for (std::size_t s = 0; s + 1 < factor; ++s) {
            // Bridge over the remaining (factor - s) pieces: first piece has mean
            // remaining / left and variance dt_fine * (1 - 1 / left).
            const double left = static_cast<double>(factor - s);
            const double piece =
                remaining / left + std::sqrt(fine.dt_micro * (1.0 - 1.0 / left)) * normals.at(draw++);
            fine.increments.push_back(piece);
            remaining -= piece;
        }
        fine.increments.push_back(remaining);
    }
    return fine;
}

MacroIncrements macro_increments(const BrownianPath& path, double tau) {
    const std::size_t k = commensurate_steps(tau, path.dt_micro, "macro_increments");
    if (path.increments.size() % k != 0) {
        throw InvalidArgument("macro_increments: tau does not divide the path length");
    }
    std::size_t odd = k;
    int levels = 0;
    while (odd % 2 == 0) {
        odd /= 2;
        ++levels;
    }
    std::vector<double> sums;
    sums.reserve(path.increments.size() / odd);
    for (std::size_t start = 0; start < path.increments.size(); start += odd) {
        double s = 0.0;
        for (std::size_t i = start; i < start + odd; ++i) s += path.increments[i];
        sums.push_back(s);
    }
    for (int level = 0; level < levels; ++level) {
        std::vector<double> next(sums.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = sums[2 * i] + sums[2 * i + 1];
        sums = std::move(next);
    }
    return MacroIncrements{tau, std::move(sums)};
}

void write_path(std::ostream& os, const BrownianPath& path) {
    os.write(kPathMagic, 4);
    put_le<std::uint32_t>(os, kPathFormatVersion);
    put_le<double>(os, path.dt_micro);
    put_le<std::uint64_t>(os, path.increments.size());
    put_le<std::uint64_t>(os, path.master_seed);
    put_le<std::uint64_t>(os, path.sample_id);
    for (double v : path.increments) put_le<double>(os, v);
}

BrownianPath read_path(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kPathMagic, 4) != 0) {
        throw InvalidArgument("read_path: bad magic (expected SACW)");
    }
    const auto version = get_le<std::uint32_t>(is);
    if (version != kPathFormatVersion) {
        throw InvalidArgument("read_path: unsupported version " + std::to_string(version));
    }
    BrownianPath path;
    path.dt_micro = get_le<double>(is);
    const auto count = get_le<std::uint64_t>(is);
    path.master_seed = get_le<std::uint64_t>(is);
    path.sample_id = get_le<std::uint64_t>(is);
    path.increments.resize(count);
    for (auto& v : path.increments) v = get_le<double>(is);
    return path;
}

}  // namespace sacfem
