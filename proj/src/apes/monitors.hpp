#pragma once

#include <string>
#include <vector>

#include "apes/diagnostics.hpp"
#include "apes/state.hpp"

namespace apes {

// One time-sample of every tracked norm and Gronwall quantity. lq_v holds
// ||v||_q / sqrt(q) for each q in Params::q_list (same order).
struct MonitorRecord {
    double t = 0.0;
    double l2_vT = 0.0;   // ||v||_2^2 + ||T||_2^2
    double diss = 0.0;    // ||grad_H v||^2 + ||dz T||^2 + eps(||dz v||^2 + ||grad_H T||^2)
    double max_T = 0.0;   // grid max of |T|
    std::vector<double> lq_v;
    double A2 = 0.0, B2 = 0.0;
    double vinf_proxy = 0.0; // ||v||_inf^2 / log(A2 + B2)
    double A3 = 0.0, B3 = 0.0;
    double A4 = 0.0, B4 = 0.0;
    double grad2_T = 0.0; // || grad^2 T ||_2^2

    static std::string csv_header(const std::vector<int>& q_list);
    std::string csv_row() const;
};

// Exponents used for the A3/A4 families (the two regimes of the gradient-
// of-temperature estimate: q in (2,4] and q in (4, inf)).
constexpr int kMonitorQ3 = 4;
constexpr int kMonitorQ4 = 8;

MonitorRecord monitor_report(const State& s, const Params& p);

// One concrete instance of the logarithmic Gronwall hypothesis:
// A' + B <= [l + m log(A+e) + n log(A+B+e)](A+e) + f with n <= K (A+e)^alpha.
// The coefficient functions are sampled on "times" (nonnegative values).
struct GronwallInstance {
    double A0 = 0.0;
    double K = 1.0;
    double alpha = 1.0;
    double horizon = 1.0;
    std::vector<double> times;
    std::vector<double> l, m, n, f;

    void validate() const;
};

struct GronwallBound {
    double Q = 0.0;
    double log_bound = 0.0; // log((2Q+1) e^Q) = Q + log(2Q+1)
    double bound = 0.0;     // exp(log_bound); may overflow to inf
};

// Evaluates Q(t) = e^{(alpha+1) int (m+n)} (log(A0+e) + int (l+f+log(2K) n) + t)
// and the bound (2Q+1)e^Q with trapezoid quadrature of the samples. K is
// floored at 1/2 so log(2K) stays nonnegative.
GronwallBound gronwall_bound(const GronwallInstance& inst, double t);

} // namespace apes
