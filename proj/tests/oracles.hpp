#pragma once

// Test-only reference implementations, kept deliberately independent of
// the library code paths they check: explicit 2x2 matrix arithmetic on
// raw arrays, a characteristic-polynomial eigensolver, a naive O(n^2)
// DFT, and a Rodrigues-formula rotation.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct M2 {
    C a[2][2];
};

// (n . sigma)/2 assembled from the Pauli matrices written out literally.
inline M2 spin_matrix(double nx, double ny, double nz) {
    const M2 sx{{{C(0, 0), C(1, 0)}, {C(1, 0), C(0, 0)}}};
    const M2 sy{{{C(0, 0), C(0, -1)}, {C(0, 1), C(0, 0)}}};
    const M2 sz{{{C(1, 0), C(0, 0)}, {C(0, 0), C(-1, 0)}}};
    M2 m;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            m.a[r][c] = 0.5 * (nx * sx.a[r][c] + ny * sy.a[r][c] + nz * sz.a[r][c]);
        }
    }
    return m;
}

// Eigenvalues of a Hermitian 2x2 matrix from the characteristic polynomial.
inline void eig2_hermitian(const M2& m, double& lo, double& hi) {
    const double tr = (m.a[0][0] + m.a[1][1]).real();
    const double det = (m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[1][0]).real();
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    lo = 0.5 * tr - disc;
    hi = 0.5 * tr + disc;
}

// Re and full <f| S_n |i> / <f|i> by explicit loops.
inline C weak_value_ref(const C i[2], const C f[2], double nx, double ny, double nz) {
    const M2 m = spin_matrix(nx, ny, nz);
    C num(0, 0), den(0, 0);
    for (int r = 0; r < 2; ++r) {
        den += std::conj(f[r]) * i[r];
        for (int c = 0; c < 2; ++c) {
            num += std::conj(f[r]) * m.a[r][c] * i[c];
        }
    }
    return num / den;
}

// Naive DFT (unnormalized, e^{-2 pi i k j / n} convention) for spectral
// cross-checks of FFT-based code.
inline std::vector<C> naive_dft(const std::vector<C>& x) {
    const size_t n = x.size();
    std::vector<C> out(n, C(0, 0));
    for (size_t k = 0; k < n; ++k) {
        for (size_t j = 0; j < n; ++j) {
            const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) /
                              static_cast<double>(n);
            out[k] += x[j] * C(std::cos(ph), std::sin(ph));
        }
    }
    return out;
}

// Mean momentum from the naive DFT power spectrum, fftfreq convention.
inline double spectral_mean_p(const std::vector<C>& amp, double length) {
    const std::vector<C> spec = naive_dft(amp);
    const int n = static_cast<int>(amp.size());
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        const int m = (2 * j <= n) ? j : j - n;
        const double k = 2.0 * std::numbers::pi * m / length;
        const double w = std::norm(spec[j]);
        num += w * k;
        den += w;
    }
    return num / den;
}

// Rodrigues rotation of v about unit axis u by angle ang.
inline std::array<double, 3> rotate(const std::array<double, 3>& v,
                                    const std::array<double, 3>& u, double ang) {
    const double c = std::cos(ang), s = std::sin(ang);
    const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    const std::array<double, 3> cross = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                         u[0] * v[1] - u[1] * v[0]};
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) {
        out[i] = v[i] * c + cross[i] * s + u[i] * dot * (1.0 - c);
    }
    return out;
}

// Density std of the analytically spread free Gaussian: a packet built as
// exp(-(x-x0)^2 / (2 sigma^2)) has density std sigma/sqrt(2) at t = 0 and
// sigma/sqrt(2) * sqrt(1 + t^2/sigma^4) after free flight.
inline double free_gaussian_width(double sigma, double t) {
    return sigma / std::sqrt(2.0) * std::sqrt(1.0 + t * t / (sigma * sigma * sigma * sigma));
}

}  // namespace oracle
