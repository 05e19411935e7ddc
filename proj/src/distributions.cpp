#include "qkemp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qkemp/error.hpp"

namespace qkemp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// theta = mantissa * q^e with mantissa in [1, 1/q). The factors theta q^i with
// e + i <= 0 are >= 1; there are `big` of them among i = 0..n-1. Splitting
// log(-theta; q)_n into
//   big * log(mantissa) + log q * (big * e + big (big - 1) / 2) + remainder
// keeps every large q-power as an exact integer coefficient of log q.
struct KbLogSplit {
    std::int64_t big = 0;
    double log_mantissa = 0.0;
    std::int64_t exponent = 0;
    double remainder = 0.0;
};

KbLogSplit split_log_normalizer(const KempBinomial& d) {
    const QBase q = d.q();
    KbLogSplit s;
    s.log_mantissa = std::log(d.theta.mantissa());
    s.exponent = d.theta.exponent();
    s.big = std::clamp<std::int64_t>(1 - s.exponent, 0, d.n);
    long double rem = 0.0L;
    for (std::int64_t i = 0; i < d.n; ++i) {
        const std::int64_t e = s.exponent + i;
        double small;  // min(theta q^i, 1 / (theta q^i))
        if (i < s.big) {
            small = std::pow(q.value(), static_cast<double>(-e)) / d.theta.mantissa();
        } else {
            small = d.theta.mantissa() * std::pow(q.value(), static_cast<double>(e));
        }
        rem += std::log1p(small);
    }
    s.remainder = static_cast<double>(rem);
    return s;
}

double kb_log_pmf_with(const KempBinomial& d, const KbLogSplit& s, double log_binom, std::int64_t x) {
    const std::int64_t dx = x - s.big;
    const std::int64_t k = dx * s.exponent + (x * (x - 1) - s.big * (s.big - 1)) / 2;
    return log_binom + static_cast<double>(dx) * s.log_mantissa + static_cast<double>(k) * d.q().log() -
           s.remainder;
}

void require_nonnegative_n(std::int64_t n) {
    if (n < 0) throw ParameterError("KB: trial count n must be >= 0");
}

// min(t, 1/t) for t = theta q^i, plus whether t >= 1.
struct FactorSize {
    long double small;
    bool large;
};

FactorSize factor_size(const ScaledReal& theta, std::int64_t i) {
    const std::int64_t e = theta.exponent() + i;
    const long double q = theta.base().value();
    if (e <= 0) return {std::pow(q, static_cast<long double>(-e)) / theta.mantissa(), true};
    return {theta.mantissa() * std::pow(q, static_cast<long double>(e)), false};
}

}  // namespace

// ---------------------------------------------------------------------------
// Kemp binomial

KempBinomial::KempBinomial(std::int64_t n_, ScaledReal theta_) : n(n_), theta(theta_) {
    require_nonnegative_n(n);
    if (theta.sign() < 0 && !theta.is_zero()) throw ParameterError("KB: theta must be >= 0");
}

KempBinomial::KempBinomial(std::int64_t n_, double theta_, QBase q)
    : KempBinomial(n_, ScaledReal::from_double(theta_, q)) {}

double kb_log_pmf(const KempBinomial& d, std::int64_t x) {
    if (x < 0 || x > d.n) return kNegInf;
    if (d.theta.is_zero()) return x == 0 ? 0.0 : kNegInf;
    return kb_log_pmf_with(d, split_log_normalizer(d), log_q_binomial(d.n, x, d.q()), x);
}

double kb_pmf(const KempBinomial& d, std::int64_t x) {
    return std::exp(kb_log_pmf(d, x));
}

PmfTable kb_table(const KempBinomial& d) {
    if (d.theta.is_zero()) return PmfTable::point_mass(0);
    const QFactorialTable fact(d.q(), d.n);
    const KbLogSplit split = split_log_normalizer(d);
    std::vector<double> probs(static_cast<std::size_t>(d.n) + 1);
    for (std::int64_t x = 0; x <= d.n; ++x) {
        probs[static_cast<std::size_t>(x)] = std::exp(kb_log_pmf_with(d, split, fact.log_binomial(d.n, x), x));
    }
    return PmfTable(0, std::move(probs));
}

std::vector<double> kb_success_probabilities(const KempBinomial& d) {
    std::vector<double> p(static_cast<std::size_t>(d.n), 0.0);
    if (d.theta.is_zero()) return p;
    for (std::int64_t i = 0; i < d.n; ++i) {
        const FactorSize f = factor_size(d.theta, i);
        // t / (1 + t) written in terms of min(t, 1/t)
        p[static_cast<std::size_t>(i)] =
            static_cast<double>(f.large ? 1.0L / (1.0L + f.small) : f.small / (1.0L + f.small));
    }
    return p;
}

MomentPair kb_moments(const KempBinomial& d) {
    if (d.theta.is_zero()) return {0.0, 0.0};
    long double mean = 0.0L;
    long double var = 0.0L;
    for (std::int64_t i = 0; i < d.n; ++i) {
        const FactorSize f = factor_size(d.theta, i);
        const long double one_plus = 1.0L + f.small;
        mean += f.large ? 1.0L / one_plus : f.small / one_plus;
        // t / (1 + t)^2 is invariant under t -> 1/t
        var += f.small / (one_plus * one_plus);
    }
    return {static_cast<double>(mean), static_cast<double>(var)};
}

KbSampler::KbSampler(const KempBinomial& d) : success_(kb_success_probabilities(d)) {}

std::int64_t KbSampler::operator()(UniformSource& rng) const {
    std::int64_t successes = 0;
    for (double p : success_) {
        if (rng.next() < p) ++successes;
    }
    return successes;
}

std::int64_t kb_sample(const KempBinomial& d, UniformSource& rng) {
    return KbSampler(d)(rng);
}

// ---------------------------------------------------------------------------
// Heine

Heine::Heine(double theta_, QBase q_) : theta(theta_), q(q_) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("Heine: theta must be finite and >= 0");
}

double heine_pmf(const Heine& d, std::int64_t x) {
    if (x < 0) return 0.0;
    if (d.theta == 0.0) return x == 0 ? 1.0 : 0.0;
    const double xd = static_cast<double>(x);
    const double log_p = 0.5 * xd * (xd - 1.0) * d.q.log() + xd * std::log(d.theta) - log_q_factorial(x, d.q) -
                         log_q_pochhammer_inf(-d.theta, d.q).log_abs;
    return std::exp(log_p);
}

double heine_mean(const Heine& d) {
    if (d.theta == 0.0) return 0.0;
    const long double q = d.q.value();
    const long double tail_scale = 1.0L / (1.0L - q);
    long double sum = 0.0L;
    for (std::int64_t i = 0;; ++i) {
        const long double t = d.theta * std::pow(q, static_cast<long double>(i));
        // remaining terms are bounded by sum_{j>=i} theta q^j
        if (t * tail_scale < 1e-17L) break;
        sum += t / (1.0L + t);
    }
    return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// Discrete normal

namespace {

// The exponent x^2/2 - x alpha measured from its value at the integer
// `center`, factored so that it stays exact for moderate integers.
double dnorm_relative_exponent(double alpha, std::int64_t center, std::int64_t x) {
    const double dx = static_cast<double>(x - center);
    return dx * (0.5 * static_cast<double>(x + center) - alpha);
}

std::int64_t dnorm_center(double alpha) {
    return static_cast<std::int64_t>(std::llround(alpha));
}

std::int64_t dnorm_half_width(QBase q) {
    // q^{(k - alpha)^2 / 2} < 1e-18 once (k - alpha)^2 / 2 > 18 ln 10 / |log q|
    const double span = std::sqrt(2.0 * (18.0 * std::log(10.0) + 2.0) / -q.log());
    return static_cast<std::int64_t>(std::ceil(span)) + 2;
}

}  // namespace

namespace {

// log sum_k q^{relative exponent of k}
double centered_log_sum(const DiscreteNormal& d, std::int64_t center) {
    if (!std::isfinite(d.alpha)) throw ParameterError("discrete normal: alpha must be finite");
    const std::int64_t width = dnorm_half_width(d.q);
    long double sum = 0.0L;
    for (std::int64_t k = center - width; k <= center + width; ++k) {
        sum += std::exp(dnorm_relative_exponent(d.alpha, center, k) * d.q.log());
    }
    return static_cast<double>(std::log(sum));
}

}  // namespace

double dnorm_log_normalizer(const DiscreteNormal& d) {
    const std::int64_t center = dnorm_center(d.alpha);
    const double c = static_cast<double>(center);
    return (0.5 * c * c - c * d.alpha) * d.q.log() + centered_log_sum(d, center);
}

double dnorm_pmf(const DiscreteNormal& d, std::int64_t x) {
    const std::int64_t center = dnorm_center(d.alpha);
    return std::exp(dnorm_relative_exponent(d.alpha, center, x) * d.q.log() - centered_log_sum(d, center));
}

// ---------------------------------------------------------------------------
// Generic tables

InversionSampler::InversionSampler(const PmfTable& table) : offset_(table.offset()) {
    if (table.captured_mass() < 1.0 - 1e-12) {
        throw ParameterError("inversion sampling needs captured mass >= 1 - 1e-12, got " +
                             std::to_string(table.captured_mass()));
    }
    cumulative_.reserve(table.size());
    long double acc = 0.0L;
    for (double p : table.probs()) {
        acc += p;
        cumulative_.push_back(static_cast<double>(acc));
    }
}

std::int64_t InversionSampler::operator()(UniformSource& rng) const {
    const double u = rng.next() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return offset_ + static_cast<std::int64_t>(it - cumulative_.begin());
}

std::int64_t sample_by_inversion(const PmfTable& table, UniformSource& rng) {
    return InversionSampler(table)(rng);
}

double reference_pmf(const ReferenceLaw& law, std::int64_t x) {
    return std::visit(
        [x](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Binomial>) {
                if (l.n < 0 || !(l.p >= 0.0 && l.p <= 1.0)) throw ParameterError("binomial: need n >= 0, p in [0,1]");
                if (x < 0 || x > l.n) return 0.0;
                if (l.p == 0.0) return x == 0 ? 1.0 : 0.0;
                if (l.p == 1.0) return x == l.n ? 1.0 : 0.0;
                const double n = static_cast<double>(l.n);
                const double k = static_cast<double>(x);
                const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
                return std::exp(log_choose + k * std::log(l.p) + (n - k) * std::log1p(-l.p));
            } else {
                if (!(l.lambda >= 0.0) || !std::isfinite(l.lambda)) throw ParameterError("poisson: need lambda >= 0");
                if (x < 0) return 0.0;
                if (l.lambda == 0.0) return x == 0 ? 1.0 : 0.0;
                const double k = static_cast<double>(x);
                return std::exp(k * std::log(l.lambda) - l.lambda - std::lgamma(k + 1.0));
            }
        },
        law);
}

PmfTable reflect(const PmfTable& table, std::int64_t n) {
    if (table.lo() < 0 || table.hi() > n) {
        std::ostringstream msg;
        msg << "reflect: support [" << table.lo() << ", " << table.hi() << "] is not inside [0, " << n << "]";
        throw ParameterError(msg.str());
    }
    std::vector<double> probs(table.probs().rbegin(), table.probs().rend());
    return PmfTable(n - table.hi(), std::move(probs));
}

}  // namespace qkemp
