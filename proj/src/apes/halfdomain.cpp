#include "apes/halfdomain.hpp"

#include <cmath>

#include "apes/errors.hpp"

namespace apes {

PhysicalField3D extend_half(const HalfField& f, WallBc bc, double bc_tol) {
    const Grid& g = f.grid;
    const int half = g.pz / 2;
    PhysicalField3D out(g);
    const double sign = bc == WallBc::StressFree ? 1.0 : -1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i)
        scale = std::max(scale, std::abs(f.v[i]));

    if (bc == WallBc::Dirichlet && scale > 0.0) {
        for (int jy = 0; jy < g.ny; ++jy)
            for (int jx = 0; jx < g.nx; ++jx)
                if (std::abs(f.at(jx, jy, 0)) > bc_tol * scale ||
                    std::abs(f.at(jx, jy, half)) > bc_tol * scale)
                    throw ValidationError(
                        "extend_half: nonzero trace at a Dirichlet wall");
    }

    for (int jz = 0; jz <= half; ++jz)
        for (int jy = 0; jy < g.ny; ++jy)
            for (int jx = 0; jx < g.nx; ++jx)
                out.at(jx, jy, jz) = f.at(jx, jy, jz);
    for (int jz = half + 1; jz < g.pz; ++jz) {
        const int jr = g.pz - jz; // reflection about z = 0
        for (int jy = 0; jy < g.ny; ++jy)
            for (int jx = 0; jx < g.nx; ++jx)
                out.at(jx, jy, jz) = sign * f.at(jx, jy, jr);
    }

    // Discrete boundary-condition check: the reflected field must be
    // representable in the matching symmetry basis (stress-free walls imply
    // a cosine profile, zero-trace walls a sine profile).
    if (scale > 0.0) {
        const Parity parity = bc == WallBc::StressFree ? Parity::Even : Parity::Odd;
        SpectralField3D modal = project_parity(out, parity);
        PhysicalField3D back = transform_inverse(modal);
        double resid = 0.0;
        for (std::size_t i = 0; i < out.v.size(); ++i)
            resid = std::max(resid, std::abs(out.v[i] - back.v[i]));
        if (resid > bc_tol * scale)
            throw ValidationError(
                "extend_half: field incompatible with the wall boundary conditions");
    }
    return out;
}

HalfField restrict_full(const PhysicalField3D& p) {
    const Grid& g = p.grid;
    HalfField out(g);
    for (int jz = 0; jz <= g.pz / 2; ++jz)
        for (int jy = 0; jy < g.ny; ++jy)
            for (int jx = 0; jx < g.nx; ++jx)
                out.at(jx, jy, jz) = p.at(jx, jy, jz);
    return out;
}

HalfState restrict_state(const State& s) {
    HalfState hs;
    hs.v1 = restrict_full(transform_inverse(s.v1));
    hs.v2 = restrict_full(transform_inverse(s.v2));
    hs.T = restrict_full(transform_inverse(s.T));
    hs.t = s.t;
    return hs;
}

State extend_state(const HalfState& hs, double bc_tol) {
    State s(hs.v1.grid);
    s.v1 = project_parity(extend_half(hs.v1, WallBc::StressFree, bc_tol), Parity::Even);
    s.v2 = project_parity(extend_half(hs.v2, WallBc::StressFree, bc_tol), Parity::Even);
    s.T = project_parity(extend_half(hs.T, WallBc::Dirichlet, bc_tol), Parity::Odd);
    s.t = hs.t;
    return s;
}

HalfDomainStepper::HalfDomainStepper(const Params& p, HalfState s0)
    : inner_(p, extend_state(s0)), hs_(std::move(s0)) {
    hs_ = restrict_state(inner_.state());
}

void HalfDomainStepper::advance() {
    inner_.replace_state(extend_state(hs_));
    inner_.advance();
    hs_ = restrict_state(inner_.state());
}

} // namespace apes
