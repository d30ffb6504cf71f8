#pragma once

// Deterministic sampling utilities: a portable 64-bit generator (so reports
// replay byte-identically across standard libraries) and Halton points for
// low-discrepancy coverage of the periodicity cell.

#include <cstdint>
#include <cmath>

#include "homoglab/linalg.hpp"

namespace homoglab {

// splitmix64; passes through distinct streams for distinct seeds.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a,b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // standard normal, Box-Muller (one value per call, cached pair dropped)
    double next_normal() {
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    Vec unit_vector(int d) {
        while (true) {
            Vec v(d);
            double n2 = 0;
            for (int i = 0; i < d; ++i) {
                v[i] = next_normal();
                n2 += v[i] * v[i];
            }
            if (n2 > 1e-12) return v * (1.0 / std::sqrt(n2));
        }
    }

  private:
    uint64_t state_;
};

inline double radical_inverse(uint64_t i, uint32_t base) {
    double inv = 1.0 / double(base), f = inv, x = 0.0;
    while (i > 0) {
        x += double(i % base) * f;
        i /= base;
        f *= inv;
    }
    return x;
}

// Halton point in [0,1)^d, bases 2,3,5,7. Index 0 maps to the origin.
inline Vec halton(uint64_t index, int d) {
    static constexpr uint32_t bases[kMaxDim] = {2, 3, 5, 7};
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = radical_inverse(index, bases[k]);
    return p;
}

// Dyadic low-discrepancy point: coordinates are exact multiples of 2^-20,
// so p + z stays exactly representable for small integer shifts z. Used by
// the bit-exact periodicity checks.
inline Vec halton_dyadic(uint64_t index, int d) {
    Vec p = halton(index * 2654435761ULL % (1ULL << 20), d);
    for (int k = 0; k < d; ++k)
        p[k] = std::floor(p[k] * 1048576.0) / 1048576.0;
    return p;
}

}  // namespace homoglab
