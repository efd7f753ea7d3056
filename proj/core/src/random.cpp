#include "polarlab/random.hpp"

#include <cmath>

#include "polarlab/errors.hpp"

namespace polarlab {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SeedStream SeedStream::substream(std::uint64_t index) const
{
    std::uint64_t state = stream ^ 0x5851f42d4c957f2dULL;
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ index;
    return SeedStream{seed, splitmix64(state)};
}

namespace {

std::uint64_t engine_seed(SeedStream s)
{
    std::uint64_t state = s.seed;
    std::uint64_t a = splitmix64(state);
    state = a ^ (s.stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(state);
}

}  // namespace

Rng::Rng(SeedStream stream) : engine_(engine_seed(stream)) {}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential()
{
    return -std::log(uniform_open());
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    do {
        a = 2.0 * uniform() - 1.0;
        b = 2.0 * uniform() - 1.0;
        s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = b * factor;
    has_spare_ = true;
    return a * factor;
}

double Rng::gamma(double shape)
{
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw ParameterError("gamma shape must be finite and > 0");
    }
    if (shape < 1.0) {
        // G(a) = G(a + 1) * U^(1/a); done in log space so tiny shapes do not underflow to 0.
        const double boosted = gamma(shape + 1.0);
        const double log_u = std::log(uniform_open());
        return std::exp(std::log(boosted) + log_u / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = 0.0;
        double v = 0.0;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

}  // namespace polarlab
