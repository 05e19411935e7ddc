#pragma once

// q-calculus primitives: the base q, an overflow-free q-scaled number type,
// q-shifted factorials, Gaussian binomial coefficients and the two
// q-exponentials.

#include <cstdint>
#include <vector>

namespace qkemp {

/// The deformation parameter q, restricted to the open unit interval.
class QBase {
public:
    /// Throws ParameterError unless 0 < q < 1.
    explicit QBase(double q);

    double value() const noexcept { return q_; }
    /// Natural logarithm of q (always negative).
    double log() const noexcept { return log_q_; }

    friend bool operator==(const QBase& a, const QBase& b) noexcept { return a.q_ == b.q_; }

private:
    double q_;
    double log_q_;
};

/// A real number stored as sign * mantissa * q^exponent with the mantissa in
/// [1, 1/q) (or exactly 0 for zero). Multiplying by integer powers of q only
/// touches the exponent, so values such as theta * q^-n never overflow.
class ScaledReal {
public:
    /// Zero in base q.
    explicit ScaledReal(QBase q) noexcept : q_(q) {}

    static ScaledReal from_double(double value, QBase q);
    /// Normalizes an arbitrary finite (mantissa, q-exponent) pair.
    static ScaledReal from_parts(double mantissa, std::int64_t exponent, QBase q);
    /// q^power for real `power`; the integer part lands in the exponent exactly.
    static ScaledReal q_power(double power, QBase q);
    /// coefficient * q^power.
    static ScaledReal scaled_q_power(double coefficient, double power, QBase q);
    /// The number whose natural log is `log_abs`, with the given sign.
    static ScaledReal from_log(double log_abs, QBase q, int sign = 1);

    QBase base() const noexcept { return q_; }
    double mantissa() const noexcept { return mantissa_; }
    std::int64_t exponent() const noexcept { return exponent_; }
    int sign() const noexcept { return sign_; }
    bool is_zero() const noexcept { return mantissa_ == 0.0; }

    /// Natural log of |value|; -inf for zero.
    double log_abs() const noexcept;
    /// Conversion to binary64; saturates to +-inf or 0 outside its range.
    double to_double() const noexcept;

    /// value * q^k, exact.
    ScaledReal shifted(std::int64_t k) const noexcept;
    ScaledReal negated() const noexcept;
    /// Throws NumericError for zero.
    ScaledReal reciprocal() const;
    ScaledReal pow(std::int64_t k) const;

    ScaledReal& operator*=(const ScaledReal& other);
    ScaledReal& operator*=(double factor);
    ScaledReal& operator/=(const ScaledReal& other);

    friend ScaledReal operator*(ScaledReal a, const ScaledReal& b) { return a *= b; }
    friend ScaledReal operator*(ScaledReal a, double b) { return a *= b; }
    friend ScaledReal operator/(ScaledReal a, const ScaledReal& b) { return a /= b; }

    friend bool operator==(const ScaledReal& a, const ScaledReal& b) noexcept {
        return a.q_ == b.q_ && a.sign_ == b.sign_ && a.mantissa_ == b.mantissa_ &&
               a.exponent_ == b.exponent_;
    }

private:
    void normalize();

    QBase q_;
    double mantissa_ = 0.0;
    std::int64_t exponent_ = 0;
    int sign_ = 1;
};

/// 1 - t, staying in scaled form when t is far outside binary64 range.
ScaledReal one_minus(const ScaledReal& t);

/// (z; q)_n = prod_{i<n} (1 - z q^i). n = 0 gives 1.
ScaledReal q_pochhammer(double z, QBase q, std::int64_t n);
ScaledReal q_pochhammer(const ScaledReal& z, std::int64_t n);

struct SignedLog {
    double log_abs;  // -inf when the value is zero
    int sign;
};

/// log|(z; q)_inf| with the sign of the product.
SignedLog log_q_pochhammer_inf(double z, QBase q);
/// (z; q)_inf to relative accuracy ~1e-14.
double q_pochhammer_inf(double z, QBase q);

/// log of (q; q)_k for k >= 0.
double log_q_factorial(std::int64_t k, QBase q);

/// Gaussian binomial coefficient [n choose k]_q, 0 unless 0 <= k <= n.
double q_binomial(std::int64_t n, std::int64_t k, QBase q);
double log_q_binomial(std::int64_t n, std::int64_t k, QBase q);

/// Cached log (q; q)_k for k = 0..max_k; makes repeated Gaussian binomial
/// evaluation for a fixed n O(1).
class QFactorialTable {
public:
    QFactorialTable(QBase q, std::int64_t max_k);
    double log_factorial(std::int64_t k) const {
        return static_cast<double>(logs_.at(static_cast<std::size_t>(k)));
    }
    /// -inf outside 0 <= k <= n.
    double log_binomial(std::int64_t n, std::int64_t k) const;
    std::int64_t max_k() const noexcept { return static_cast<std::int64_t>(logs_.size()) - 1; }

private:
    std::vector<long double> logs_;
};

/// [x]_q = (1 - q^x) / (1 - q).
double q_number(double x, QBase q);

/// e_q(z) = 1 / (z; q)_inf. Throws NumericError when some factor
/// |1 - z q^i| < 1e-12 (the function has poles at z = q^-i).
double e_q(double z, QBase q);
/// E_q(z) = (-z; q)_inf.
double E_q(double z, QBase q);

}  // namespace qkemp
