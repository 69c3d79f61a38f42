#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apes/field.hpp"

namespace apes {

enum class Scheme { ImexCnAb2, ImexEuler };

Scheme scheme_from_string(const std::string& s);
std::string scheme_to_string(Scheme s);

enum class InitKind { RandomSmooth, Manufactured, File };

InitKind init_kind_from_string(const std::string& s);
std::string init_kind_to_string(InitKind k);

// Physical and numerical configuration. epsilon = 0 selects the target
// anisotropic system, epsilon > 0 the fully regularized one.
struct Params {
    int nx = 32, ny = 32, nz = 16;
    double h = 1.0;
    double epsilon = 0.0;
    double f0 = 0.0;
    double nu_h = 1.0;
    double kappa_z = 1.0;
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::ImexCnAb2;
    int monitor_stride = 10;
    std::vector<int> q_list = {4, 8, 16, 32};
    std::uint64_t seed = 0;

    InitKind init_kind = InitKind::RandomSmooth;
    double init_amplitude = 1.0;
    double init_slope = 4.0;
    double init_tmax = 1.0; // L-infinity cap on T0
    std::string init_file;

    std::string output_dir;
    int checkpoint_every = 0; // steps; 0 disables
    int snapshot_every = 0;   // steps; 0 disables

    Grid make_grid() const { return Grid(nx, ny, nz, h); }
    void validate() const; // throws ValidationError
};

// Prognostic state: (v1, v2) even, T odd, at one instant.
struct State {
    SpectralField3D v1, v2, T;
    double t = 0.0;

    State() = default;
    State(const Grid& g)
        : v1(g, Parity::Even), v2(g, Parity::Even), T(g, Parity::Odd) {}
    const Grid& grid() const { return v1.grid(); }
};

// Structural symmetry projection: Hermitian consistency, band truncation,
// no m = 0 sine content. Idempotent and L2 non-increasing.
State project_symmetry(const State& s);

// Replaces the barotropic (vertical-mean) part of v by its divergence-free
// Leray projection; the baroclinic part is untouched.
void project_barotropic(SpectralField3D& v1, SpectralField3D& v2);
State project_barotropic(const State& s);

// || int_-h^h div_H v dz ||_2 relative to ||v||_2 (the (dvfree) residual).
double barotropic_residual(const SpectralField3D& v1, const SpectralField3D& v2);

State make_initial_data(const Params& p);

} // namespace apes
