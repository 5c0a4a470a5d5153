#ifndef PDEIDENT_RNG_HPP
#define PDEIDENT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pdeident {

/// Counter-based deterministic generator: every draw is a pure hash of
/// (seed, stream, counter), so datasets are reproducible across platforms
/// and independent of evaluation order.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform draw in (0, 1), never exactly 0 or 1.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t h = splitmix64(seed ^ 0x8BADF00DDEADBEEFULL);
        h = splitmix64(h ^ stream);
        h = splitmix64(h ^ counter);
        return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Standard normal draw via Box-Muller on two uniform counters.
    double normal(std::uint64_t stream, std::uint64_t counter) const {
        const double u1 = uniform(stream, 2 * counter);
        const double u2 = uniform(stream, 2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

} // namespace pdeident

#endif // PDEIDENT_RNG_HPP
