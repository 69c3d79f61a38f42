#pragma once

#include <functional>
#include <vector>

#include "apes/diagnostics.hpp"
#include "apes/monitors.hpp"
#include "apes/state.hpp"

namespace apes {

struct Tendency {
    SpectralField3D dv1, dv2, dT;
};

// Full tendency of (eq. system) at one state: advection, Coriolis, pressure
// gradient, and all dissipation terms; p_s solved diagnostically inside.
Tendency rhs(const State& s, const Params& p);

// Advection + Coriolis + pressure only (the explicitly stepped part).
Tendency rhs_explicit(const State& s, const Params& p);

// One IMEX step from a fresh state: Crank-Nicolson on the dissipation,
// explicit Euler on the rest (the AB2 startup step), followed by the
// symmetry and barotropic projections.
State step(const State& s, const Params& p);

class Stepper {
public:
    Stepper(const Params& p, State s0);

    const State& state() const { return s_; }
    long step_index() const { return n_; }
    const Params& params() const { return p_; }

    void advance();

    // AB2 memory for bit-exact checkpoint/restart.
    bool has_memory() const { return have_prev_; }
    const Tendency& memory() const { return prev_; }
    void restore_memory(Tendency prev, long step_index);

    // Half-domain driver support: swap in an equivalent state (same grid,
    // differing only by transform roundoff) without touching the AB2 memory.
    void replace_state(State s);

    // Energy bookkeeping of the last step (set after advance()).
    double last_imbalance() const { return last_imbalance_; }

private:
    Params p_;
    State s_;
    Tendency prev_;
    bool have_prev_ = false;
    long n_ = 0;
    double last_imbalance_ = 0.0;
    double prev_energy_ = 0.0, prev_diss_ = 0.0, prev_work_ = 0.0;
    bool have_energy_ = false;

    void apply_imex(const Tendency& expl, double wcur, double wprev,
                    const Tendency* prev);
    void energy_bookkeeping();
};

struct RunHooks {
    std::function<void(const MonitorRecord&)> on_record;
    std::function<void(const State&, const Tendency*, long)> on_checkpoint;
    std::function<void(const State&, long)> on_snapshot;
};

struct RunResult {
    State final_state;
    std::vector<MonitorRecord> records;
    long steps = 0;
    double fitted_energy_exponent = 0.0; // c in ||(v,T)||_2^2(t) <= e^{ct} E(0)
    double fitted_scheme_constant = 0.0; // max per-step |imbalance| / dt^2
};

// Integrates to t_final, recording monitors every monitor_stride steps (and
// at t = 0 and the final step). Throws BlowUpError on non-finite state.
RunResult run(const Params& p, const State& initial, const RunHooks& hooks = {});
RunResult run(const Params& p); // initial data from p

// Resume support: continue a run from a checkpointed stepper state.
RunResult run_from(Stepper& stepper, double t_final, const RunHooks& hooks = {});

} // namespace apes
