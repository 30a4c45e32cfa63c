#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace risdfrc {

/// Deterministic random stream with split-by-label substreams.
///
/// The generator is a std::mt19937_64 (algorithm fully fixed by the C++
/// standard) and all variate transforms are implemented here rather than
/// delegated to std::*_distribution, whose output is implementation-defined.
/// Identical seed + fork labels therefore reproduce identical draws.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    /// Independent substream derived from this stream's lineage and a label.
    /// Forking does not consume state from the parent.
    RngStream fork(std::string_view label) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Circularly-symmetric complex Gaussian, unit variance: CN(0, 1).
    std::complex<double> cnormal();

private:
    RngStream(std::uint64_t lineage, int);

    std::uint64_t lineage_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace risdfrc
