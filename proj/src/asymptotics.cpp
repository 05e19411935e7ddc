#include "qkemp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qkemp/error.hpp"

namespace qkemp {

namespace {

void require_beta(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        std::ostringstream msg;
        msg << "beta must lie in [0, 1), got " << beta;
        throw ParameterError(msg.str());
    }
}

// sum_{l >= 0} w_l / (1 + w_l) with w_l = q^{l + start}, start > 0.
long double logistic_tail(double start, QBase q) {
    const long double tail_scale = 1.0L / (1.0L - q.value());
    long double sum = 0.0L;
    for (std::int64_t l = 0;; ++l) {
        const long double w = std::exp(static_cast<long double>(l + start) * q.log());
        if (w * tail_scale < 1e-18L) break;
        sum += w / (1.0L + w);
    }
    return sum;
}

// sum_{l >= 0} w_l / (1 + w_l)^2 with w_l = q^{l + start}, start >= 0.
long double variance_tail(double start, QBase q) {
    const long double tail_scale = 1.0L / (1.0L - q.value());
    long double sum = 0.0L;
    for (std::int64_t l = 0;; ++l) {
        const long double w = std::exp(static_cast<long double>(l + start) * q.log());
        if (w * tail_scale < 1e-18L) break;
        sum += w / ((1.0L + w) * (1.0L + w));
    }
    return sum;
}

}  // namespace

FractionalDrift::FractionalDrift(std::int64_t numerator, std::int64_t denominator, double offset)
    : num_(numerator), den_(denominator), offset_(offset) {
    if (!(numerator > 0 && numerator < denominator)) {
        throw ParameterError("drift slope must be a fraction p/r with 0 < p < r");
    }
    if (!std::isfinite(offset)) throw ParameterError("drift offset must be finite");
    const std::int64_t g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
}

DriftValue FractionalDrift::at(std::int64_t n) const {
    if (n < 0) throw ParameterError("drift evaluated at negative n");
    const std::int64_t whole = (num_ * n) / den_;
    const std::int64_t residue = (num_ * n) % den_;
    const double frac = static_cast<double>(residue) / static_cast<double>(den_) + offset_;
    const double floor_frac = std::floor(frac);
    return {whole + static_cast<std::int64_t>(floor_frac), frac - floor_frac};
}

KempBinomial kb_with_drift(std::int64_t n, const DriftValue& f, QBase q) {
    // q^{-whole - beta} = q^{-beta} * q^{-whole}, q^{-beta} in [1, 1/q)
    const double mantissa = std::pow(q.value(), -f.beta);
    return KempBinomial(n, ScaledReal::from_parts(mantissa, -f.whole, q));
}

double c_direct(double beta, QBase q) {
    require_beta(beta);
    const long double qb = std::exp(static_cast<long double>(beta) * q.log());
    long double c = 1.0L - qb / (1.0L + qb) - beta;
    c -= logistic_tail(beta + 1.0, q);
    c += logistic_tail(1.0 - beta, q);
    return static_cast<double>(c);
}

double c_fourier_series(double f_value, QBase q, int terms) {
    if (terms < 1) throw ParameterError("Fourier series needs at least one term");
    if (!std::isfinite(f_value)) throw ParameterError("f must be finite");
    const double frac = f_value - std::floor(f_value);
    if (frac == 0.0) return 0.0;
    constexpr double pi = std::numbers::pi;
    const double abs_log_q = -q.log();
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        // log q and sinh(2 k pi^2 / log q) are both negative; use
        // 1 / sinh(x) = 2 e^{-x} / (1 - e^{-2x}) to stay finite as q -> 1.
        const double x = 2.0 * k * pi * pi / abs_log_q;
        const double inv_sinh = 2.0 * std::exp(-x) / -std::expm1(-2.0 * x);
        if (inv_sinh == 0.0) break;
        sum += 2.0 * pi * std::sin(2.0 * k * frac * pi) * inv_sinh / abs_log_q;
    }
    return sum;
}

double c_fourier(double f_value, QBase q, int terms) {
    return 0.5 + c_fourier_series(f_value, q, terms);
}

int default_fourier_terms(QBase q) {
    const double k = std::ceil(-q.log() * 40.0 / (2.0 * std::numbers::pi * std::numbers::pi)) + 2.0;
    return std::max(3, static_cast<int>(k));
}

double error_bound_constant(QBase q) {
    return 10.0 / (1.0 - q.value());
}

MeanAsymptotics mean_expansion(std::int64_t n, const DriftValue& f, QBase q, int terms) {
    const double fv = f.value();
    if (!(fv > 0.0 && fv < static_cast<double>(n))) {
        std::ostringstream msg;
        msg << "mean expansion needs 0 < f(n) < n, got f(" << n << ") = " << fv;
        throw ParameterError(msg.str());
    }
    MeanAsymptotics m{};
    m.f_value = fv;
    m.beta = f.beta;
    m.c_value = c_fourier(f.beta, q, terms);
    m.estimate = static_cast<double>(f.whole) + (f.beta + m.c_value);
    const double rate = std::min(0.5 * fv, static_cast<double>(n) - fv);
    m.error_bound = error_bound_constant(q) * std::exp(rate * q.log());
    m.terms_used = terms;
    return m;
}

MeanAsymptotics mean_expansion(std::int64_t n, const FractionalDrift& f, QBase q, int terms) {
    return mean_expansion(n, f.at(n), q, terms);
}

double limiting_variance(double beta, QBase q) {
    require_beta(beta);
    // terms with u = q^{-beta-i} >= 1 enter through 1/u = q^{beta+i}
    return static_cast<double>(variance_tail(beta, q) + variance_tail(1.0 - beta, q));
}

int floor_case(double beta, QBase q) {
    require_beta(beta);
    const double s = c_direct(beta, q) + beta;
    const double nearest = std::round(s);
    const int computed = static_cast<int>(std::fabs(s - nearest) < 1e-12 ? nearest : std::floor(s));
    const int expected = beta < 0.5 ? 0 : 1;
    if (computed != expected) {
        std::ostringstream msg;
        msg << "floor(c + beta) = " << computed << " at beta = " << beta << ", q = " << q.value()
            << " contradicts the case split (expected " << expected << ")";
        throw NumericError(msg.str());
    }
    return computed;
}

double dnorm_alpha(double beta) {
    require_beta(beta);
    if (beta < 0.5) return 0.5 + beta;
    if (beta > 0.5) return beta - 0.5;
    return 0.0;
}

double LimitLaw::location(std::int64_t x) const {
    const double xd = static_cast<double>(x);
    if (beta == 0.5) return xd / sigma;
    return (xd - (beta + c_value - delta)) / sigma;
}

LimitLaw limit_law(double beta, QBase q) {
    require_beta(beta);
    const auto log_e_q = [q](double z) { return -log_q_pochhammer_inf(z, q).log_abs; };
    double log_const;
    if (beta == 0.5) {
        log_const = log_e_q(q.value()) + 2.0 * log_e_q(-std::sqrt(q.value()));
    } else {
        log_const = log_e_q(q.value()) + log_e_q(-std::pow(q.value(), beta)) + log_e_q(-std::pow(q.value(), 1.0 - beta));
    }
    std::vector<double> probs;
    probs.reserve(2 * kLimitLawHalfWidth + 1);
    for (std::int64_t x = -kLimitLawHalfWidth; x <= kLimitLawHalfWidth; ++x) {
        const double xd = static_cast<double>(x);
        double exponent;
        if (beta < 0.5) {
            exponent = 0.5 * (xd - 1.0) * (xd - 2.0 * beta);
        } else if (beta > 0.5) {
            exponent = 0.5 * xd * ((1.0 + xd) - 2.0 * beta);
        } else {
            exponent = 0.5 * xd * xd;
        }
        probs.push_back(std::exp(log_const + exponent * q.log()));
    }
    const int delta = floor_case(beta, q);
    return LimitLaw{beta,
                    q,
                    c_direct(beta, q),
                    std::sqrt(limiting_variance(beta, q)),
                    delta,
                    PmfTable(-kLimitLawHalfWidth, std::move(probs))};
}

}  // namespace qkemp
