#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <apes/field.hpp>

namespace apes::testing {

inline PhysicalField3D sample_physical(const Grid& g,
                                       const std::function<double(double, double, double)>& f) {
    PhysicalField3D p(g);
    for (int jz = 0; jz < g.pz; ++jz)
        for (int jy = 0; jy < g.ny; ++jy)
            for (int jx = 0; jx < g.nx; ++jx)
                p.at(jx, jy, jz) = f(g.x_node(jx), g.y_node(jy), g.z_node(jz));
    return p;
}

inline double max_diff(const PhysicalField3D& a, const PhysicalField3D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

inline double max_coeff_diff(const SpectralField3D& a, const SpectralField3D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Band-limited random field with spectral slope s (modal amplitudes scaled by
// (1 + |k|^2)^(-s/2)), Hermitian-consistent, parity-correct.
inline SpectralField3D random_field(const Grid& g, Parity parity, std::uint64_t seed,
                                    double slope = 3.0, double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField3D f(g, parity);
    for (int m = 0; m <= g.nz; ++m) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            for (int kx = 0; kx <= g.kx_cut; ++kx) {
                if (ky > g.ky_cut || ky < -g.ky_cut) continue;
                if (parity == Parity::Odd && m == 0) continue;
                double k2 = double(kx) * kx + double(ky) * ky + double(m) * m;
                double scale = amplitude * std::pow(1.0 + k2, -slope / 2.0);
                f.at(kx, iy, m) = scale * cplx(gauss(rng), gauss(rng));
            }
        }
    }
    enforce_structure(f);
    return f;
}

// Zeroes coefficients beyond (kmax, mmax); products of the result stay
// inside the retained band, so dealiasing acts as the identity on them.
inline void band_limit(SpectralField3D& f, int kmax, int mmax) {
    const Grid& g = f.grid();
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx)
                if (kx > kmax || ky > kmax || ky < -kmax || m > mmax)
                    f.at(kx, iy, m) = cplx(0.0);
        }
}

} // namespace apes::testing
