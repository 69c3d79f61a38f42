#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace apes {

using cplx = std::complex<double>;

// Parity in z encodes the symmetry class of the periodic domain: even fields
// expand in cos(m pi z / h), odd fields in sin(m pi z / h). Odd fields carry
// no m = 0 mode and vanish at z = 0, +-h by construction.
enum class Parity { Even, Odd };

inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }
inline Parity product_parity(Parity a, Parity b) {
    return a == b ? Parity::Even : Parity::Odd;
}
inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// Discretization of Omega = (0,1)^2 x (-h,h): nx x ny collocation points in
// the horizontal, Fourier modes |kx| <= nx/3, |ky| <= ny/3 retained (2/3
// rule); vertical Galerkin basis with modes m = 0..nz and a periodic z grid
// of pz >= 3 nz + 1 points so quadratic products are alias-free after
// truncation. Quadratic products are evaluated on the padded (px, py, pz)
// grid internally.
struct Grid {
    int nx = 0, ny = 0, nz = 0;
    double h = 1.0;
    int kx_cut = 0, ky_cut = 0; // retained |k| <= cut
    int px = 0, py = 0, pz = 0;

    Grid() = default;
    Grid(int nx_, int ny_, int nz_, double h_);

    int nkx() const { return nx / 2 + 1; }  // half-spectrum storage in x
    int nmz() const { return nz + 1; }      // vertical coefficients m = 0..nz
    std::size_t modal_size() const {
        return static_cast<std::size_t>(nmz()) * ny * nkx();
    }
    std::size_t phys_size() const {
        return static_cast<std::size_t>(pz) * ny * nx;
    }
    std::size_t midx(int m, int iy, int kx) const {
        return (static_cast<std::size_t>(m) * ny + iy) * nkx() + kx;
    }
    std::size_t pidx(int jz, int jy, int jx) const {
        return (static_cast<std::size_t>(jz) * ny + jy) * nx + jx;
    }

    int ky_of(int iy) const { return iy <= ny / 2 ? iy : iy - ny; }
    int iy_of(int ky) const { return ky >= 0 ? ky : ky + ny; }
    bool retained(int kx, int iy) const {
        int ky = ky_of(iy);
        return kx <= kx_cut && (ky <= ky_cut && ky >= -ky_cut);
    }

    double x_node(int j) const { return static_cast<double>(j) / nx; }
    double y_node(int j) const { return static_cast<double>(j) / ny; }
    double z_node(int j) const { return -h + 2.0 * h * j / pz; }

    // Quadrature weight of one collocation cell (uniform rule; exact for
    // retained-band trigonometric polynomials).
    double cell_volume() const { return (1.0 / nx) * (1.0 / ny) * (2.0 * h / pz); }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && h == o.h;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

// Smallest even 5-smooth integer >= n; FFT-friendly padded sizes.
int fast_even_size(int n);

} // namespace apes
