#pragma once

#include <functional>

#include "apes/fft.hpp"
#include "apes/grid.hpp"

namespace apes {

// Complex modal coefficients of a real scalar field on M x (-h, h), indexed
// (kx, ky, m): horizontal Fourier modes in half-spectrum storage (kx >= 0,
// Hermitian partners implied) and vertical cosine (even) or sine (odd)
// coefficients m = 0..nz. Coefficients outside the 2/3 band stay zero.
class SpectralField3D {
public:
    SpectralField3D() = default;
    SpectralField3D(const Grid& g, Parity p) : grid_(g), parity_(p), c_(g.modal_size()) {
        c_.fill(cplx(0.0));
    }

    const Grid& grid() const { return grid_; }
    Parity parity() const { return parity_; }
    bool empty() const { return c_.size() == 0; }

    cplx& at(int kx, int iy, int m) { return c_[grid_.midx(m, iy, kx)]; }
    const cplx& at(int kx, int iy, int m) const { return c_[grid_.midx(m, iy, kx)]; }
    cplx* data() { return c_.data(); }
    const cplx* data() const { return c_.data(); }
    std::size_t size() const { return c_.size(); }

    SpectralField3D& operator+=(const SpectralField3D& o);
    SpectralField3D& operator-=(const SpectralField3D& o);
    SpectralField3D& operator*=(double s);

    friend SpectralField3D operator+(SpectralField3D a, const SpectralField3D& b) {
        a += b;
        return a;
    }
    friend SpectralField3D operator-(SpectralField3D a, const SpectralField3D& b) {
        a -= b;
        return a;
    }
    friend SpectralField3D operator*(double s, SpectralField3D a) {
        a *= s;
        return a;
    }

private:
    Grid grid_;
    Parity parity_ = Parity::Even;
    AlignedVec<cplx> c_;
};

// Real collocation values on the (nx, ny, pz) grid, layout (jz, jy, jx).
struct PhysicalField3D {
    Grid grid;
    AlignedVec<double> v;

    PhysicalField3D() = default;
    explicit PhysicalField3D(const Grid& g) : grid(g), v(g.phys_size()) { v.fill(0.0); }
    double& at(int jx, int jy, int jz) { return v[grid.pidx(jz, jy, jx)]; }
    double at(int jx, int jy, int jz) const { return v[grid.pidx(jz, jy, jx)]; }
};

// z-independent horizontal field (surface pressure and friends), modal.
class SpectralField2D {
public:
    SpectralField2D() = default;
    explicit SpectralField2D(const Grid& g)
        : grid_(g), c_(static_cast<std::size_t>(g.ny) * g.nkx()) {
        c_.fill(cplx(0.0));
    }
    const Grid& grid() const { return grid_; }
    cplx& at(int kx, int iy) { return c_[static_cast<std::size_t>(iy) * grid_.nkx() + kx]; }
    const cplx& at(int kx, int iy) const {
        return c_[static_cast<std::size_t>(iy) * grid_.nkx() + kx];
    }
    cplx* data() { return c_.data(); }
    const cplx* data() const { return c_.data(); }
    std::size_t size() const { return c_.size(); }

    SpectralField2D& operator+=(const SpectralField2D& o);
    SpectralField2D& operator-=(const SpectralField2D& o);
    SpectralField2D& operator*=(double s);

private:
    Grid grid_;
    AlignedVec<cplx> c_;
};

struct VectorField {
    SpectralField3D x, y;
};

enum class Axis { X, Y, Z };

// ---- transforms ------------------------------------------------------------

PhysicalField3D transform_inverse(const SpectralField3D& f);

// Physical -> modal with declared parity. Rejects inputs whose opposite-
// parity content exceeds tol * ||field|| (relative L2).
SpectralField3D transform_forward(const PhysicalField3D& p, Parity parity,
                                  double tol = 1e-8);

// Physical -> modal, projecting onto the declared parity class instead of
// rejecting. removed_energy receives the squared L2 mass that was dropped.
SpectralField3D project_parity(const PhysicalField3D& p, Parity parity,
                               double* removed_energy = nullptr);

// ---- calculus --------------------------------------------------------------

SpectralField3D differentiate(const SpectralField3D& f, Axis axis, int order = 1);

// G(z) = int_{-h}^{z} f dxi, computed exactly on the cos/sin basis. Flips
// parity. Even inputs must have zero column mean (m = 0 coefficients), the
// discrete solvability condition; otherwise SolvabilityError.
SpectralField3D integrate_z_from_bottom(const SpectralField3D& f);

// -Lap_H p = rhs with zero-mean gauge. Mode-exact inversion; rhs must have
// zero horizontal mean relative to its norm (torus solvability).
SpectralField2D solve_poisson_2d(const SpectralField2D& rhs, double tol = 1e-10);

SpectralField3D dealias(const SpectralField3D& f);
void dealias_inplace(SpectralField3D& f);

// Collocation values on the padded (px, py, pz) product grid; pointwise
// products of retained-band fields computed here are alias-free.
struct ProductGridBuf {
    Grid grid;
    AlignedVec<double> v; // (jz, jy, jx) with jy < py, jx < px
};

ProductGridBuf to_product_grid(const SpectralField3D& f);
SpectralField3D from_product_grid(const ProductGridBuf& p, Parity parity);

// Alias-free pointwise product: pads to the (px, py, pz) grid, multiplies,
// truncates back to the retained band. Parity follows the product rule.
SpectralField3D multiply(const SpectralField3D& a, const SpectralField3D& b);

// ---- structural projections ------------------------------------------------

// Hermitian symmetry on the kx = 0 plane, band truncation, and removal of
// any stored m = 0 content of odd fields. Idempotent.
void enforce_structure(SpectralField3D& f);

// ---- 2D / 3D glue ----------------------------------------------------------

SpectralField2D vertical_mean(const SpectralField3D& f); // (1/2h) int f dz (even only)
SpectralField3D extend_z_uniform(const SpectralField2D& f); // even, m = 0
SpectralField2D gradient_component_2d(const SpectralField2D& f, Axis axis);
SpectralField3D zero_horizontal_mean_per_level(const SpectralField3D& f); // f - mean_M f

// ---- norms (modal Parseval and grid quadrature) ------------------------------

double l2_norm(const SpectralField3D& f);      // Parseval
double l2_norm_sq(const SpectralField3D& f);   // Parseval
double l2_norm_sq(const SpectralField2D& f);
double l2_norm_quadrature_sq(const PhysicalField3D& p);
double lq_norm(const PhysicalField3D& p, double q);
double max_abs(const PhysicalField3D& p);
double max_abs_coeff(const SpectralField3D& f);
double sup_bound_from_modal(const SpectralField3D& f); // sum of |c| (>= sup norm)
bool all_finite(const SpectralField3D& f);

// |v| magnitude helpers for vector fields evaluated on the grid
double lq_norm_magnitude(const PhysicalField3D& a, const PhysicalField3D& b, double q);
double max_magnitude(const PhysicalField3D& a, const PhysicalField3D& b);

// H1-type seminorm pieces by Parseval: ||d_x f||^2 + ||d_y f||^2
double grad_h_norm_sq(const SpectralField3D& f);
double dz_norm_sq(const SpectralField3D& f);

// Real L2(Omega) inner product of two fields of equal parity (Parseval).
double inner_product(const SpectralField3D& a, const SpectralField3D& b);

} // namespace apes
