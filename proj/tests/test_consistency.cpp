#include <doctest.h>

#include <cmath>

#include <apes/consistency.hpp>
#include <apes/errors.hpp>

#include "test_helpers.hpp"

using namespace apes;
using namespace apes::testing;

namespace {
State random_admissible_state(const Grid& g, std::uint64_t seed, double amp = 0.5) {
    State s(g);
    s.v1 = random_field(g, Parity::Even, seed, 4.0, amp);
    s.v2 = random_field(g, Parity::Even, seed + 7, 4.0, amp);
    s.T = random_field(g, Parity::Odd, seed + 13, 4.0, amp);
    project_barotropic(s.v1, s.v2);
    return s;
}
} // namespace

TEST_CASE("appendix_a_check") {
    Params p;
    p.nx = p.ny = 16;
    p.nz = 8;
    p.epsilon = 1e-2;
    p.f0 = 0.5;
    Grid g = p.make_grid();

    SUBCASE("zero state has zero residuals") {
        State s(g);
        AppendixAResiduals r = appendix_a_check(s, p);
        CHECK(r.eta_abs == 0.0);
        CHECK(r.theta_abs == 0.0);
    }

    SUBCASE("random states satisfy the identity to roundoff") {
        for (int trial = 0; trial < 3; ++trial) {
            State s = random_admissible_state(g, 100 + trial, 0.7);
            AppendixAResiduals r = appendix_a_check(s, p);
            INFO("trial " << trial << " eta_rel " << r.eta_rel << " theta_rel "
                          << r.theta_rel);
            CHECK(r.eta_rel <= 1e-10);
            CHECK(r.theta_rel <= 1e-10);
        }
    }

    SUBCASE("identity is independent of the epsilon and coefficient values") {
        State s = random_admissible_state(g, 7, 0.5);
        for (double eps : {0.0, 0.3}) {
            Params q = p;
            q.epsilon = eps;
            q.nu_h = 1.7;
            q.kappa_z = 0.6;
            AppendixAResiduals r = appendix_a_check(s, q);
            CHECK(r.eta_rel <= 1e-10);
            CHECK(r.theta_rel <= 1e-10);
        }
    }
}

TEST_CASE("continuous dependence") {
    Params p;
    p.nx = p.ny = 12;
    p.nz = 6;
    p.dt = 2e-3;
    p.monitor_stride = 5;
    p.init_amplitude = 0.4;
    p.seed = 5;

    SUBCASE("delta = 0 keeps the twins identical") {
        TwinRunReport r = continuous_dependence_experiment(p, 0.0, 0.05);
        for (double d : r.delta_l2) CHECK(d == 0.0);
    }

    SUBCASE("halving delta quarters the separation in the linear regime") {
        TwinRunReport r1 = continuous_dependence_experiment(p, 1e-6, 0.05);
        TwinRunReport r2 = continuous_dependence_experiment(p, 5e-7, 0.05);
        REQUIRE(r1.times.size() == r2.times.size());
        CHECK(r1.perturbation_l2 ==
              doctest::Approx(4.0 * r2.perturbation_l2).epsilon(1e-9));
        for (std::size_t i = 0; i < r1.times.size(); ++i) {
            CHECK(r1.delta_l2[i] ==
                  doctest::Approx(4.0 * r2.delta_l2[i]).epsilon(0.10));
        }
    }

    SUBCASE("growth is at most exponential and stable under refinement") {
        TwinRunReport r1 = continuous_dependence_experiment(p, 1e-6, 0.1);
        Params q = p;
        q.dt = p.dt / 2;
        TwinRunReport r2 = continuous_dependence_experiment(q, 1e-6, 0.1);
        CHECK(std::isfinite(r1.growth_exponent));
        CHECK(std::abs(r2.growth_exponent - r1.growth_exponent) <=
              0.2 * std::max(1.0, std::abs(r1.growth_exponent)));
        // no super-exponential escape: every sample below the fitted envelope
        for (std::size_t i = 0; i < r1.times.size(); ++i) {
            const double envelope =
                r1.perturbation_l2 *
                std::exp((r1.growth_exponent + 1.0) * r1.times[i] + 0.5);
            CHECK(r1.delta_l2[i] <= envelope);
        }
    }
}
