#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace nrad {

// Round-half-up, used everywhere a count is derived from a rate.
inline long long round_half_up(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Subgradient convention: sign(0) = 0 so the optimum stays stationary.
inline double sign0(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// FNV-1a over a byte string; used for config fingerprints in artifacts.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace nrad
