#include "apes/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "apes/errors.hpp"
#include "apes/parallel.hpp"

namespace apes {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void check_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw ShapeError("fields live on different grids");
}

std::shared_ptr<TransformContext> io_ctx(const Grid& g) {
    return TransformContext::get(g, g.nx, g.ny);
}
std::shared_ptr<TransformContext> prod_ctx(const Grid& g) {
    return TransformContext::get(g, g.px, g.py);
}

double modal_weight_m(const Grid& g, int m) { return m == 0 ? 2.0 * g.h : g.h; }

} // namespace

SpectralField3D& SpectralField3D::operator+=(const SpectralField3D& o) {
    check_same_grid(grid_, o.grid_);
    if (parity_ != o.parity_) throw ParityError("adding fields of opposite parity");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField3D& SpectralField3D::operator-=(const SpectralField3D& o) {
    check_same_grid(grid_, o.grid_);
    if (parity_ != o.parity_) throw ParityError("subtracting fields of opposite parity");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField3D& SpectralField3D::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

SpectralField2D& SpectralField2D::operator+=(const SpectralField2D& o) {
    check_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}
SpectralField2D& SpectralField2D::operator-=(const SpectralField2D& o) {
    check_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}
SpectralField2D& SpectralField2D::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

// ---- transforms -------------------------------------------------------------

PhysicalField3D transform_inverse(const SpectralField3D& f) {
    PhysicalField3D out(f.grid());
    io_ctx(f.grid())->inverse(f.data(), f.parity(), out.v.data());
    return out;
}

SpectralField3D transform_forward(const PhysicalField3D& p, Parity parity, double tol) {
    SpectralField3D out(p.grid, parity);
    double total = 0.0;
    double removed = io_ctx(p.grid)->forward(p.v.data(), parity, out.data(), &total);
    if (removed > tol * tol * total && total > 0.0)
        throw ParityError(std::string("input violates declared ") + parity_name(parity) +
                          " z-symmetry");
    return out;
}

SpectralField3D project_parity(const PhysicalField3D& p, Parity parity,
                               double* removed_energy) {
    SpectralField3D out(p.grid, parity);
    double removed = io_ctx(p.grid)->forward(p.v.data(), parity, out.data(), nullptr);
    if (removed_energy) *removed_energy = removed;
    return out;
}

// ---- calculus ---------------------------------------------------------------

SpectralField3D differentiate(const SpectralField3D& f, Axis axis, int order) {
    if (order < 1) throw ValidationError("differentiate: order must be >= 1");
    const Grid& g = f.grid();

    if (axis == Axis::Z) {
        SpectralField3D cur = f;
        for (int it = 0; it < order; ++it) {
            SpectralField3D next(g, flip(cur.parity()));
            const double fac = M_PI / g.h;
            for (int m = 0; m <= g.nz; ++m) {
                for (int iy = 0; iy < g.ny; ++iy) {
                    for (int kx = 0; kx < g.nkx(); ++kx) {
                        if (m == 0) continue;
                        if (cur.parity() == Parity::Even)
                            next.at(kx, iy, m) = -fac * m * cur.at(kx, iy, m);
                        else
                            next.at(kx, iy, m) = fac * m * cur.at(kx, iy, m);
                    }
                }
            }
            cur = std::move(next);
        }
        return cur;
    }

    SpectralField3D out(g, f.parity());
    for (int m = 0; m <= g.nz; ++m) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                const double k = axis == Axis::X ? kx : ky;
                cplx factor = std::pow(cplx(0.0, two_pi * k), order);
                out.at(kx, iy, m) = factor * f.at(kx, iy, m);
            }
        }
    }
    return out;
}

SpectralField3D integrate_z_from_bottom(const SpectralField3D& f) {
    const Grid& g = f.grid();
    SpectralField3D out(g, flip(f.parity()));

    if (f.parity() == Parity::Even) {
        // Solvability: the primitive of the column mean is not representable.
        double mean_sq = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                mean_sq += (kx == 0 ? 1.0 : 2.0) * std::norm(f.at(kx, iy, 0));
        const double tot = l2_norm_sq(f);
        if (tot > 0.0 && std::sqrt(mean_sq * 2.0 * g.h) > 1e-10 * std::sqrt(tot))
            throw SolvabilityError(
                "integrate_z_from_bottom: even input has nonzero column mean");
        for (int m = 1; m <= g.nz; ++m) {
            const double fac = g.h / (M_PI * m);
            for (int iy = 0; iy < g.ny; ++iy)
                for (int kx = 0; kx < g.nkx(); ++kx)
                    out.at(kx, iy, m) = fac * f.at(kx, iy, m);
        }
        return out;
    }

    // Odd input: exact primitive is even with a constant offset per column.
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int kx = 0; kx < g.nkx(); ++kx) {
            cplx c0(0.0);
            for (int m = 1; m <= g.nz; ++m) {
                const double fac = g.h / (M_PI * m);
                const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
                out.at(kx, iy, m) = -fac * f.at(kx, iy, m);
                c0 += fac * sgn * f.at(kx, iy, m);
            }
            out.at(kx, iy, 0) = c0;
        }
    }
    return out;
}

SpectralField2D solve_poisson_2d(const SpectralField2D& rhs, double tol) {
    const Grid& g = rhs.grid();
    double tot = l2_norm_sq(rhs);
    if (std::abs(rhs.at(0, 0)) > tol * std::sqrt(std::max(tot, 1e-300)) && tot > 0.0)
        throw SolvabilityError("solve_poisson_2d: rhs has nonzero horizontal mean");
    SpectralField2D out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        const int ky = g.ky_of(iy);
        for (int kx = 0; kx < g.nkx(); ++kx) {
            if (kx == 0 && ky == 0) continue; // zero-mean gauge
            const double k2 = two_pi * two_pi * (double(kx) * kx + double(ky) * ky);
            out.at(kx, iy) = rhs.at(kx, iy) / k2;
        }
    }
    return out;
}

SpectralField3D dealias(const SpectralField3D& f) {
    SpectralField3D out = f;
    dealias_inplace(out);
    return out;
}

void dealias_inplace(SpectralField3D& f) {
    const Grid& g = f.grid();
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                if (!g.retained(kx, iy)) f.at(kx, iy, m) = cplx(0.0);
}

ProductGridBuf to_product_grid(const SpectralField3D& f) {
    const Grid& g = f.grid();
    ProductGridBuf out;
    out.grid = g;
    out.v.resize(static_cast<std::size_t>(g.pz) * g.py * g.px);
    prod_ctx(g)->inverse(f.data(), f.parity(), out.v.data());
    return out;
}

SpectralField3D from_product_grid(const ProductGridBuf& p, Parity parity) {
    SpectralField3D out(p.grid, parity);
    prod_ctx(p.grid)->forward(p.v.data(), parity, out.data(), nullptr);
    return out;
}

SpectralField3D multiply(const SpectralField3D& a, const SpectralField3D& b) {
    check_same_grid(a.grid(), b.grid());
    ProductGridBuf pa = to_product_grid(a);
    ProductGridBuf pb = to_product_grid(b);
    for (std::size_t i = 0; i < pa.v.size(); ++i) pa.v[i] *= pb.v[i];
    return from_product_grid(pa, product_parity(a.parity(), b.parity()));
}

// ---- structural projections --------------------------------------------------

void enforce_structure(SpectralField3D& f) {
    const Grid& g = f.grid();
    dealias_inplace(f);
    if (f.parity() == Parity::Odd)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx) f.at(kx, iy, 0) = cplx(0.0);
    for (int m = 0; m <= g.nz; ++m) {
        f.at(0, 0, m) = cplx(f.at(0, 0, m).real(), 0.0);
        for (int iy = 1; iy <= g.ny / 2; ++iy) {
            const int jy = g.ny - iy;
            if (jy == iy) continue;
            cplx avg = 0.5 * (f.at(0, iy, m) + std::conj(f.at(0, jy, m)));
            f.at(0, iy, m) = avg;
            f.at(0, jy, m) = std::conj(avg);
        }
    }
}

// ---- 2D / 3D glue -------------------------------------------------------------

SpectralField2D vertical_mean(const SpectralField3D& f) {
    const Grid& g = f.grid();
    SpectralField2D out(g);
    if (f.parity() == Parity::Odd) return out; // odd fields integrate to zero
    for (int iy = 0; iy < g.ny; ++iy)
        for (int kx = 0; kx < g.nkx(); ++kx) out.at(kx, iy) = f.at(kx, iy, 0);
    return out;
}

SpectralField3D extend_z_uniform(const SpectralField2D& f) {
    const Grid& g = f.grid();
    SpectralField3D out(g, Parity::Even);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int kx = 0; kx < g.nkx(); ++kx) out.at(kx, iy, 0) = f.at(kx, iy);
    return out;
}

SpectralField2D gradient_component_2d(const SpectralField2D& f, Axis axis) {
    const Grid& g = f.grid();
    SpectralField2D out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        const int ky = g.ky_of(iy);
        for (int kx = 0; kx < g.nkx(); ++kx) {
            const double k = axis == Axis::X ? kx : ky;
            out.at(kx, iy) = cplx(0.0, two_pi * k) * f.at(kx, iy);
        }
    }
    return out;
}

SpectralField3D zero_horizontal_mean_per_level(const SpectralField3D& f) {
    SpectralField3D out = f;
    for (int m = 0; m <= f.grid().nz; ++m) out.at(0, 0, m) = cplx(0.0);
    return out;
}

// ---- norms --------------------------------------------------------------------

double l2_norm_sq(const SpectralField3D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m) {
        const double wm = modal_weight_m(g, m);
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                s += (kx == 0 ? 1.0 : 2.0) * wm * std::norm(f.at(kx, iy, m));
    }
    return s;
}

double l2_norm(const SpectralField3D& f) { return std::sqrt(l2_norm_sq(f)); }

double l2_norm_sq(const SpectralField2D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int kx = 0; kx < g.nkx(); ++kx)
            s += (kx == 0 ? 1.0 : 2.0) * std::norm(f.at(kx, iy));
    return s;
}

double l2_norm_quadrature_sq(const PhysicalField3D& p) {
    const double w = p.grid.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) s += p.v[i] * p.v[i];
    return s * w;
}

double lq_norm(const PhysicalField3D& p, double q) {
    const double w = p.grid.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) s += std::pow(std::abs(p.v[i]), q);
    return std::pow(s * w, 1.0 / q);
}

double max_abs(const PhysicalField3D& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) s = std::max(s, std::abs(p.v[i]));
    return s;
}

double max_abs_coeff(const SpectralField3D& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f.data()[i]));
    return s;
}

double sup_bound_from_modal(const SpectralField3D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                s += (kx == 0 ? 1.0 : 2.0) * std::abs(f.at(kx, iy, m));
    return s;
}

bool all_finite(const SpectralField3D& f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx& c = f.data()[i];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

double lq_norm_magnitude(const PhysicalField3D& a, const PhysicalField3D& b, double q) {
    check_same_grid(a.grid, b.grid);
    const double w = a.grid.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        s += std::pow(std::hypot(a.v[i], b.v[i]), q);
    return std::pow(s * w, 1.0 / q);
}

double max_magnitude(const PhysicalField3D& a, const PhysicalField3D& b) {
    check_same_grid(a.grid, b.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        s = std::max(s, std::hypot(a.v[i], b.v[i]));
    return s;
}

double grad_h_norm_sq(const SpectralField3D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m) {
        const double wm = modal_weight_m(g, m);
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ky = g.ky_of(iy);
            for (int kx = 0; kx < g.nkx(); ++kx) {
                const double k2 = two_pi * two_pi * (double(kx) * kx + double(ky) * ky);
                s += (kx == 0 ? 1.0 : 2.0) * wm * k2 * std::norm(f.at(kx, iy, m));
            }
        }
    }
    return s;
}

double dz_norm_sq(const SpectralField3D& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int m = 1; m <= g.nz; ++m) {
        const double wm = g.h; // derivative has no m = 0 part
        const double fac = (M_PI / g.h) * m;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                s += (kx == 0 ? 1.0 : 2.0) * wm * fac * fac * std::norm(f.at(kx, iy, m));
    }
    return s;
}

double inner_product(const SpectralField3D& a, const SpectralField3D& b) {
    check_same_grid(a.grid(), b.grid());
    if (a.parity() != b.parity())
        throw ParityError("inner product of fields of opposite parity");
    const Grid& g = a.grid();
    double s = 0.0;
    for (int m = 0; m <= g.nz; ++m) {
        const double wm = modal_weight_m(g, m);
        for (int iy = 0; iy < g.ny; ++iy)
            for (int kx = 0; kx < g.nkx(); ++kx)
                s += (kx == 0 ? 1.0 : 2.0) * wm *
                     (a.at(kx, iy, m) * std::conj(b.at(kx, iy, m))).real();
    }
    return s;
}

} // namespace apes
