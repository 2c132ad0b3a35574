#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace gevex {

// Deterministic RNG wrapper. Distributions are implemented by hand so the
// byte stream does not depend on the standard library's <random> internals;
// identical seeds give identical draws on any platform we build on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    // Box-Muller with a cached spare.
    double normal(double mu = 0.0, double sd = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mu + sd * spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return mu + sd * r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a, used for config hashes and checkpoint fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 1469598103934665603ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_str(const std::string& s,
                               std::uint64_t h = 1469598103934665603ULL) {
    return fnv1a(s.data(), s.size(), h);
}

} // namespace gevex
