#include "qkemp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkemp/distributions.hpp"
#include "qkemp/error.hpp"

namespace qkemp {

namespace {

// Bisection on L = log theta for an increasing map L -> mean. Stops when the
// bracket no longer resolves distinct binary64 values of theta.
template <class MeanAtLog>
ThetaSolveResult bisect_log_theta(double lo, double hi, double mu, MeanAtLog mean_at_log) {
    int steps = 0;
    while (steps < kMaxBisectionSteps) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double theta_lo = std::exp(lo);
        const double theta_hi = std::exp(hi);
        if (std::isfinite(theta_hi) && std::nextafter(theta_lo, theta_hi) >= theta_hi) break;
        ++steps;
        if (mean_at_log(mid) < mu) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double log_theta = lo + 0.5 * (hi - lo);
    return {std::exp(log_theta), std::fabs(mean_at_log(log_theta) - mu), steps};
}

}  // namespace

double theta_for_poisson(std::int64_t n, QBase q, double lambda) {
    if (!(lambda > 0.0 && lambda < static_cast<double>(n))) {
        std::ostringstream msg;
        msg << "Poisson coupling needs 0 < lambda < n, got lambda = " << lambda << ", n = " << n;
        throw ParameterError(msg.str());
    }
    return lambda / q_number(static_cast<double>(n) - lambda, q);
}

ThetaSolveResult theta_for_mean(std::int64_t n, QBase q, double mu) {
    if (!(mu > 0.0) || !(static_cast<double>(n) >= 2.0 * mu)) {
        std::ostringstream msg;
        msg << "no bracket for mean " << mu << " at n = " << n << " (need mu > 0 and n >= 2 mu)";
        throw ParameterError(msg.str());
    }
    // mean(theta) < theta min(n, 1/(1-q)), and mean(q^{1-n}) >= n/2
    const double lo = std::log(mu * std::max(1.0 / static_cast<double>(n), 1.0 - q.value()));
    const double hi = -static_cast<double>(n - 1) * q.log();
    return bisect_log_theta(lo, std::max(hi, lo + 1.0), mu, [&](double log_theta) {
        return kb_moments(KempBinomial(n, ScaledReal::from_log(log_theta, q))).mean;
    });
}

ThetaSolveResult theta_limit_for_mean(QBase q, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("limit solver needs a finite mu > 0");
    // the Heine mean is below theta/(1-q); at theta = q^{-m} its first m+1
    // terms are each >= 1/2
    const double lo = std::log(mu * (1.0 - q.value()));
    const double hi = -std::ceil(2.0 * mu) * q.log();
    if (!std::isfinite(std::exp(hi))) throw ParameterError("limit solver: mu too large for binary64 theta");
    return bisect_log_theta(lo, hi, mu, [&](double log_theta) { return heine_mean(Heine(std::exp(log_theta), q)); });
}

}  // namespace qkemp
