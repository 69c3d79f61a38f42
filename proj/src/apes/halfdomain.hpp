#pragma once

#include "apes/dynamics.hpp"
#include "apes/state.hpp"

namespace apes {

// Physical values on the half column M x [-h, 0]: nodes z_j = -h + 2h j / pz
// for j = 0..pz/2, both walls included.
struct HalfField {
    Grid grid; // the associated full grid
    AlignedVec<double> v;

    HalfField() = default;
    explicit HalfField(const Grid& g)
        : grid(g), v(static_cast<std::size_t>(g.pz / 2 + 1) * g.ny * g.nx) {
        v.fill(0.0);
    }
    int nzh() const { return grid.pz / 2 + 1; }
    double& at(int jx, int jy, int jz) {
        return v[(static_cast<std::size_t>(jz) * grid.ny + jy) * grid.nx + jx];
    }
    double at(int jx, int jy, int jz) const {
        return v[(static_cast<std::size_t>(jz) * grid.ny + jy) * grid.nx + jx];
    }
};

// Physical boundary conditions at the walls z = -h, 0: stress-free fields
// (v, p) extend evenly, no-permeability/zero-trace fields (w, T) oddly.
enum class WallBc { StressFree, Dirichlet };

// Reflects the half field into M x (-h, h). The walls must be compatible
// with the implied basis to bc_tol (relative); otherwise ValidationError.
PhysicalField3D extend_half(const HalfField& f, WallBc bc, double bc_tol = 1e-8);

HalfField restrict_full(const PhysicalField3D& p);

struct HalfState {
    HalfField v1, v2, T;
    double t = 0.0;
};

HalfState restrict_state(const State& s);
State extend_state(const HalfState& hs, double bc_tol = 1e-8);

// Evolves the half-domain representation: each step reflects to the full
// domain, advances there, and restricts back.
class HalfDomainStepper {
public:
    HalfDomainStepper(const Params& p, HalfState s0);
    const HalfState& state() const { return hs_; }
    long step_index() const { return inner_.step_index(); }
    void advance();

private:
    Stepper inner_;
    HalfState hs_;
};

} // namespace apes
