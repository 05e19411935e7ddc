#pragma once

#include <cstdint>

#include "qkemp/qcalc.hpp"

namespace qkemp {

struct ThetaSolveResult {
    double theta;
    double residual;  // |mean(theta) - target|
    int iterations;
};

/// theta_n = lambda / [n - lambda]_q, the coupling under which KB(n, theta_n, q)
/// tends to the Heine law H((1 - q) lambda). Throws ParameterError unless
/// 0 < lambda < n.
double theta_for_poisson(std::int64_t n, QBase q, double lambda);

/// The unique theta with KB(n, theta, q) mean equal to mu. Requires mu > 0
/// and n >= 2 mu; bisects the increasing map theta -> mean over
/// [mu max(1/n, 1 - q), q^{-n+1}] until the bracket cannot be split further.
ThetaSolveResult theta_for_mean(std::int64_t n, QBase q, double mu);

/// The unique theta with Heine mean equal to mu (the n -> infinity limit of
/// theta_for_mean). Requires mu > 0.
ThetaSolveResult theta_limit_for_mean(QBase q, double mu);

/// Bisection iteration cap shared by both mean solvers.
inline constexpr int kMaxBisectionSteps = 200;

}  // namespace qkemp
