#pragma once

#include <cmath>

#include "drkf/errors.hpp"
#include "drkf/linalg.hpp"

namespace drkf {

// Uniform discretization of the unit circle, z_n = exp(j 2 pi n / N).
// N must be even (the cepstrum factorization uses the Nyquist term).
struct FrequencyGrid {
    int N = 0;

    static FrequencyGrid uniform(int N) {
        if (N < 2 || N % 2 != 0) throw ConfigError("FrequencyGrid: N must be even and >= 2");
        return FrequencyGrid{N};
    }

    double omega(int n) const { return 2.0 * M_PI * n / N; }

    cplx node(int n) const { return std::polar(1.0, omega(n)); }

    VecXcd nodes() const {
        VecXcd z(N);
        for (int n = 0; n < N; ++n) z(n) = node(n);
        return z;
    }
};

}  // namespace drkf
