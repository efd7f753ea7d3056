#pragma once

#include <cstdint>
#include <random>

namespace polarlab {

/// Identifies one independent random stream: a user seed plus a stream index.
/// Streams with distinct indices are decorrelated through SplitMix64 mixing.
struct SeedStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    [[nodiscard]] SeedStream substream(std::uint64_t index) const;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Random source used by every sampler in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversions to doubles and every variate below are
/// implemented here rather than with <random> distributions, whose outputs
/// differ across standard library implementations.
class Rng {
public:
    explicit Rng(SeedStream stream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); never returns an endpoint.
    double uniform_open();
    /// Standard exponential.
    double exponential();
    /// Standard normal (Marsaglia polar method).
    double normal();
    /// Gamma(shape, 1) for any shape > 0 (Marsaglia-Tsang, boosted for shape < 1).
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace polarlab
