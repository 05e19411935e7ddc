#pragma once

// Kemp's q-binomial law KB(n, theta, q), its Heine and discrete normal
// limits, and the classical binomial / Poisson reference laws.

#include <cstdint>
#include <variant>
#include <vector>

#include "qkemp/pmf_table.hpp"
#include "qkemp/qcalc.hpp"
#include "qkemp/random.hpp"

namespace qkemp {

/// KB(n, theta, q): P(X = x) = [n x]_q theta^x q^{x(x-1)/2} / (-theta; q)_n.
/// theta = 0 is admitted and gives the point mass at 0.
struct KempBinomial {
    std::int64_t n;
    ScaledReal theta;

    KempBinomial(std::int64_t n, ScaledReal theta);
    KempBinomial(std::int64_t n, double theta, QBase q);

    QBase q() const noexcept { return theta.base(); }
};

/// Heine law H(theta): P(X = x) = q^{x(x-1)/2} theta^x / (q; q)_x * e_q(-theta).
struct Heine {
    double theta;
    QBase q;

    Heine(double theta, QBase q);
};

/// Discrete normal law on Z with P(X = x) proportional to q^{-x alpha + x^2/2}.
struct DiscreteNormal {
    double alpha;
    QBase q;
};

struct Binomial {
    std::int64_t n;
    double p;
};

struct Poisson {
    double lambda;
};

using ReferenceLaw = std::variant<Binomial, Poisson>;

struct MomentPair {
    double mean;
    double variance;
};

// ---------------------------------------------------------------------------
// Kemp binomial

double kb_log_pmf(const KempBinomial& d, std::int64_t x);
double kb_pmf(const KempBinomial& d, std::int64_t x);
/// The whole law on {0, ..., n}.
PmfTable kb_table(const KempBinomial& d);
/// Mean and variance from the Bernoulli decomposition
/// (success probabilities theta q^i / (1 + theta q^i)).
MomentPair kb_moments(const KempBinomial& d);
/// Success probabilities of the n independent Bernoulli summands.
std::vector<double> kb_success_probabilities(const KempBinomial& d);

/// Draws KB variates as sums of independent Bernoulli variables.
class KbSampler {
public:
    explicit KbSampler(const KempBinomial& d);
    std::int64_t operator()(UniformSource& rng) const;

private:
    std::vector<double> success_;
};

std::int64_t kb_sample(const KempBinomial& d, UniformSource& rng);

// ---------------------------------------------------------------------------
// Heine

double heine_pmf(const Heine& d, std::int64_t x);
/// sum_{i >= 0} theta q^i / (1 + theta q^i), the n -> infinity limit of the KB mean.
double heine_mean(const Heine& d);

// ---------------------------------------------------------------------------
// Discrete normal

double dnorm_pmf(const DiscreteNormal& d, std::int64_t x);
/// Natural log of sum_k q^{-k alpha + k^2/2}.
double dnorm_log_normalizer(const DiscreteNormal& d);

// ---------------------------------------------------------------------------
// Generic tables

/// Inversion sampling from a table whose captured mass is at least 1 - 1e-12.
class InversionSampler {
public:
    /// Throws ParameterError when the table misses more than 1e-12 of mass.
    explicit InversionSampler(const PmfTable& table);
    std::int64_t operator()(UniformSource& rng) const;

private:
    std::int64_t offset_;
    std::vector<double> cumulative_;
};

std::int64_t sample_by_inversion(const PmfTable& table, UniformSource& rng);

double reference_pmf(const ReferenceLaw& law, std::int64_t x);

/// The law of n - X for X distributed per `table`; support must lie in [0, n].
PmfTable reflect(const PmfTable& table, std::int64_t n);

}  // namespace qkemp
