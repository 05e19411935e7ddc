#pragma once

// Mean asymptotics and limit laws for KB(n, q^{-f(n)}, q) when f(n) grows
// sub-linearly away from both 0 and n.

#include <cstdint>

#include "qkemp/distributions.hpp"
#include "qkemp/pmf_table.hpp"
#include "qkemp/qcalc.hpp"

namespace qkemp {

/// f evaluated at some n, split as whole + beta with beta = {f(n)} in [0, 1).
struct DriftValue {
    std::int64_t whole;
    double beta;

    double value() const noexcept { return static_cast<double>(whole) + beta; }
};

/// f(n) = (numerator / denominator) * n + offset with 0 < numerator/denominator < 1.
/// The fractional part is formed from the integer residue numerator*n mod
/// denominator, so {f(n)} is identical along every residue class of n.
class FractionalDrift {
public:
    /// Throws ParameterError unless 0 < numerator < denominator and offset is finite.
    FractionalDrift(std::int64_t numerator, std::int64_t denominator, double offset);

    DriftValue at(std::int64_t n) const;

    std::int64_t numerator() const noexcept { return num_; }
    std::int64_t denominator() const noexcept { return den_; }
    double offset() const noexcept { return offset_; }

private:
    std::int64_t num_;
    std::int64_t den_;
    double offset_;
};

/// KB(n, q^{-f}, q), with the q-exponent of theta carried exactly.
KempBinomial kb_with_drift(std::int64_t n, const DriftValue& f, QBase q);

/// The additive constant c(beta, q) of the mean, summed from its two
/// geometric-type series.
double c_direct(double beta, QBase q);

/// 1/2 + c_fourier_series(f, q, terms).
double c_fourier(double f_value, QBase q, int terms);
/// sum_{k=1}^{terms} 2 pi sin(2 k f pi) / (log q sinh(2 k pi^2 / log q)).
double c_fourier_series(double f_value, QBase q, int terms);
/// Number of Fourier terms after which every further term is below 1e-16.
int default_fourier_terms(QBase q);

/// Constant in the mean expansion's error bound, C(q) = 10 / (1 - q). Not a
/// proven constant; it is checked empirically by the test suite.
double error_bound_constant(QBase q);

struct MeanAsymptotics {
    double f_value;
    double beta;
    double c_value;
    double estimate;     // f(n) + c
    double error_bound;  // C(q) q^{min(f/2, n - f)}
    int terms_used;
};

/// Throws ParameterError unless 0 < f(n) < n and terms >= 1.
MeanAsymptotics mean_expansion(std::int64_t n, const FractionalDrift& f, QBase q, int terms);
MeanAsymptotics mean_expansion(std::int64_t n, const DriftValue& f, QBase q, int terms);

/// Limit of the KB variance along a subsequence with {f(n)} = beta.
double limiting_variance(double beta, QBase q);

/// floor(c(beta, q) + beta). Values within 1e-12 of an integer snap to it.
/// Throws NumericError if the result contradicts the known case split
/// (0 for beta < 1/2, 1 otherwise).
int floor_case(double beta, QBase q);

/// Location parameter of the discrete normal law matching the lattice limit.
double dnorm_alpha(double beta);

struct LimitLaw {
    double beta;
    QBase q;
    double c_value;
    double sigma;
    int delta;
    /// P(X_n = shift_n + x) -> lattice_probs.at(x), |x| <= 50, where shift_n is
    /// floor(mu_n) (or the ceil/floor rule at beta = 1/2).
    PmfTable lattice_probs;

    /// Position of lattice point x after centering by mu_n and scaling by sigma.
    double location(std::int64_t x) const;
};

/// Throws ParameterError unless 0 <= beta < 1.
LimitLaw limit_law(double beta, QBase q);

inline constexpr std::int64_t kLimitLawHalfWidth = 50;

}  // namespace qkemp
