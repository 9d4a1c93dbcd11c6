#pragma once

#include <cstdint>
#include <random>

#include "ncbasis/matrix.hpp"

namespace ncbasis {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from (seed, counter). Sampling and
/// restart streams are split by counter so that results do not depend on
/// execution order and a shorter run is a prefix of a longer one.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(seed ^ splitmix64(counter + 0x632BE59BD9B4E019ull));
}

/// mt19937_64 with a pinned double extraction (no distribution objects, so
/// the stream is identical across standard library implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {  // Box-Muller
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * 3.14159265358979323846 * uniform();
        cached_ = r * std::sin(th);
        have_ = true;
        return r * std::cos(th);
    }

    Complex cgaussian() {
        const double re = gaussian();
        return Complex(re, gaussian());
    }

    CVec unit_vector(Eigen::Index n) {
        CVec u(n);
        double nrm = 0.0;
        do {
            for (Eigen::Index i = 0; i < n; ++i) u[i] = cgaussian();
            nrm = u.norm();
        } while (nrm < 1e-150);
        return u / nrm;
    }

    Mat gaussian_matrix(Eigen::Index n) {
        Mat g(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) g(i, j) = cgaussian();
        return g;
    }

private:
    std::mt19937_64 eng_;
    bool have_ = false;
    double cached_ = 0.0;
};

}  // namespace ncbasis
