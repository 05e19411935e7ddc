#include "qkemp/qcalc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qkemp/error.hpp"

namespace qkemp {

QBase::QBase(double q) : q_(q), log_q_(0.0) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream msg;
        msg << "q must lie in (0, 1), got " << q;
        throw ParameterError(msg.str());
    }
    log_q_ = std::log(q);
}

// ---------------------------------------------------------------------------
// ScaledReal

ScaledReal ScaledReal::from_double(double value, QBase q) {
    if (!std::isfinite(value)) throw ParameterError("ScaledReal: value must be finite");
    return from_parts(value, 0, q);
}

ScaledReal ScaledReal::from_parts(double mantissa, std::int64_t exponent, QBase q) {
    if (!std::isfinite(mantissa)) throw NumericError("ScaledReal: non-finite mantissa");
    ScaledReal s(q);
    s.mantissa_ = mantissa;
    s.exponent_ = exponent;
    s.normalize();
    return s;
}

ScaledReal ScaledReal::q_power(double power, QBase q) {
    return scaled_q_power(1.0, power, q);
}

ScaledReal ScaledReal::scaled_q_power(double coefficient, double power, QBase q) {
    if (!std::isfinite(power)) throw NumericError("ScaledReal: non-finite q-exponent");
    const double whole = std::ceil(power);
    // q^(power - ceil(power)) lies in [1, 1/q).
    const double frac_factor = std::pow(q.value(), power - whole);
    return from_parts(coefficient * frac_factor, static_cast<std::int64_t>(whole), q);
}

ScaledReal ScaledReal::from_log(double log_abs, QBase q, int sign) {
    if (log_abs == -std::numeric_limits<double>::infinity()) return ScaledReal(q);
    if (!std::isfinite(log_abs)) throw NumericError("ScaledReal: non-finite logarithm");
    const double shift = std::ceil(log_abs / q.log());
    const double mantissa = std::exp(log_abs - shift * q.log());
    return from_parts(sign < 0 ? -mantissa : mantissa, static_cast<std::int64_t>(shift), q);
}

void ScaledReal::normalize() {
    if (mantissa_ == 0.0) {
        exponent_ = 0;
        sign_ = 1;
        return;
    }
    sign_ = mantissa_ < 0.0 ? -1 : 1;
    double m = std::fabs(mantissa_);
    const double q = q_.value();
    if (m < 1.0 || m * q >= 1.0) {
        // m = m' * q^k with m' near [1, 1/q).
        const double k = std::ceil(std::log(m) / q_.log());
        const auto shift = static_cast<std::int64_t>(k);
        m *= std::pow(q, -k);
        exponent_ += shift;
    }
    while (m < 1.0) {
        m /= q;
        exponent_ += 1;
    }
    while (m * q >= 1.0) {
        m *= q;
        exponent_ -= 1;
    }
    mantissa_ = m;
}

double ScaledReal::log_abs() const noexcept {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(mantissa_) + static_cast<double>(exponent_) * q_.log();
}

double ScaledReal::to_double() const noexcept {
    if (is_zero()) return 0.0;
    const double scale = std::pow(q_.value(), static_cast<double>(exponent_));
    if (scale == 0.0 || std::isinf(scale)) {
        return sign_ * std::exp(log_abs());
    }
    return sign_ * mantissa_ * scale;
}

ScaledReal ScaledReal::shifted(std::int64_t k) const noexcept {
    ScaledReal s = *this;
    if (!s.is_zero()) s.exponent_ += k;
    return s;
}

ScaledReal ScaledReal::negated() const noexcept {
    ScaledReal s = *this;
    if (!s.is_zero()) s.sign_ = -s.sign_;
    return s;
}

ScaledReal ScaledReal::reciprocal() const {
    if (is_zero()) throw NumericError("ScaledReal: reciprocal of zero");
    return from_parts(sign_ / mantissa_, -exponent_, q_);
}

ScaledReal ScaledReal::pow(std::int64_t k) const {
    if (k < 0) return reciprocal().pow(-k);
    ScaledReal result = from_double(1.0, q_);
    ScaledReal base = *this;
    while (k > 0) {
        if (k & 1) result *= base;
        k >>= 1;
        if (k > 0) base *= base;
    }
    return result;
}

ScaledReal& ScaledReal::operator*=(const ScaledReal& other) {
    if (!(q_ == other.q_)) throw ParameterError("ScaledReal: mismatched bases");
    if (is_zero() || other.is_zero()) {
        *this = ScaledReal(q_);
        return *this;
    }
    mantissa_ = sign_ * other.sign_ * mantissa_ * other.mantissa_;
    exponent_ += other.exponent_;
    normalize();
    return *this;
}

ScaledReal& ScaledReal::operator*=(double factor) {
    return *this *= from_double(factor, q_);
}

ScaledReal& ScaledReal::operator/=(const ScaledReal& other) {
    return *this *= other.reciprocal();
}

ScaledReal one_minus(const ScaledReal& t) {
    const QBase q = t.base();
    if (t.is_zero()) return ScaledReal::from_double(1.0, q);
    const double value = t.to_double();
    if (std::isfinite(value) && std::fabs(value) < 1e250) {
        return ScaledReal::from_double(1.0 - value, q);
    }
    // |t| is astronomically large: 1 - t = -t (1 - 1/t).
    const double inv = t.reciprocal().to_double();
    return t.negated() * (1.0 - inv);
}

// ---------------------------------------------------------------------------
// Products

ScaledReal q_pochhammer(const ScaledReal& z, std::int64_t n) {
    const QBase q = z.base();
    ScaledReal result = ScaledReal::from_double(1.0, q);
    for (std::int64_t i = 0; i < n; ++i) {
        result *= one_minus(z.shifted(i));
        if (result.is_zero()) break;
    }
    return result;
}

ScaledReal q_pochhammer(double z, QBase q, std::int64_t n) {
    return q_pochhammer(ScaledReal::from_double(z, q), n);
}

SignedLog log_q_pochhammer_inf(double z, QBase q) {
    if (z == 0.0) return {0.0, 1};
    const double tail_scale = 1.0 / (1.0 - q.value());
    long double log_abs = 0.0L;
    int sign = 1;
    for (std::int64_t i = 0;; ++i) {
        const double t = z * std::pow(q.value(), static_cast<double>(i));
        const double tail = std::fabs(t) * tail_scale;
        if (tail < 1e-17) {
            // sum_{j>=i} log(1 - z q^j) = -z q^i / (1 - q) + O(tail^2)
            log_abs += -t * tail_scale;
            break;
        }
        const double factor = 1.0 - t;
        if (factor == 0.0) return {-std::numeric_limits<double>::infinity(), 1};
        if (factor < 0.0) sign = -sign;
        log_abs += std::fabs(t) < 0.5 ? std::log1p(-t) : std::log(std::fabs(factor));
    }
    return {static_cast<double>(log_abs), sign};
}

double q_pochhammer_inf(double z, QBase q) {
    const SignedLog l = log_q_pochhammer_inf(z, q);
    return l.sign * std::exp(l.log_abs);
}

double log_q_factorial(std::int64_t k, QBase q) {
    long double acc = 0.0L;
    for (std::int64_t i = 1; i <= k; ++i) {
        acc += std::log(-std::expm1(static_cast<double>(i) * q.log()));
    }
    return static_cast<double>(acc);
}

double log_q_binomial(std::int64_t n, std::int64_t k, QBase q) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k > n - k) k = n - k;
    // log prod_{i=1}^{k} (1 - q^{n-k+i}) / (1 - q^i)
    long double acc = 0.0L;
    for (std::int64_t i = 1; i <= k; ++i) {
        acc += std::log(-std::expm1(static_cast<double>(n - k + i) * q.log()));
        acc -= std::log(-std::expm1(static_cast<double>(i) * q.log()));
    }
    return static_cast<double>(acc);
}

double q_binomial(std::int64_t n, std::int64_t k, QBase q) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_q_binomial(n, k, q));
}

QFactorialTable::QFactorialTable(QBase q, std::int64_t max_k) {
    if (max_k < 0) throw ParameterError("QFactorialTable: negative size");
    logs_.resize(static_cast<std::size_t>(max_k) + 1);
    long double acc = 0.0L;
    logs_[0] = 0.0L;
    for (std::int64_t i = 1; i <= max_k; ++i) {
        acc += std::log(-std::expm1(static_cast<double>(i) * q.log()));
        logs_[static_cast<std::size_t>(i)] = acc;
    }
}

double QFactorialTable::log_binomial(std::int64_t n, std::int64_t k) const {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    const auto at = [this](std::int64_t j) { return logs_.at(static_cast<std::size_t>(j)); };
    return static_cast<double>(at(n) - at(k) - at(n - k));
}

// ---------------------------------------------------------------------------
// Scalars

double q_number(double x, QBase q) {
    return -std::expm1(x * q.log()) / (1.0 - q.value());
}

double e_q(double z, QBase q) {
    if (z > 0.0) {
        for (std::int64_t i = 0;; ++i) {
            const double t = z * std::pow(q.value(), static_cast<double>(i));
            if (t < 0.5) break;
            if (std::fabs(1.0 - t) < 1e-12) {
                std::ostringstream msg;
                msg << "e_q: argument " << z << " is within 1e-12 of the pole q^-" << i;
                throw NumericError(msg.str());
            }
        }
    }
    const SignedLog l = log_q_pochhammer_inf(z, q);
    return l.sign * std::exp(-l.log_abs);
}

double E_q(double z, QBase q) {
    return q_pochhammer_inf(-z, q);
}

}  // namespace qkemp
