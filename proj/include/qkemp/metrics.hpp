#pragma once

// Lattice distances and the convergence sweeps that compare KB laws with their
// limits numerically.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qkemp/asymptotics.hpp"
#include "qkemp/distributions.hpp"
#include "qkemp/pmf_table.hpp"

namespace qkemp {

using Law = std::variant<KempBinomial, Heine, DiscreteNormal, Binomial, Poisson>;

/// Finite table of `law` holding all but at most `tol` of its mass.
/// Throws ParameterError unless 0 < tol <= 1e-6.
PmfTable tabulate(const Law& law, double tol);

/// 1/2 sum |a(x) - b(x)| over the union support, plus 1/2 |uncaptured(a) - uncaptured(b)|.
double tv_distance(const PmfTable& a, const PmfTable& b);
/// max_x |F_a(x) - F_b(x)|.
double kolmogorov_distance(const PmfTable& a, const PmfTable& b);

enum class Scenario {
    PoissonCoupling,        // theta_n = lambda / [n - lambda]_q  vs  H((1-q) lambda)
    ConstantMean,           // mean fixed at mu                  vs  H(theta(q))
    Subexponential,         // theta_n = q^{-f(n)}, shifted       vs  lattice limit law
    ExponentialReflection,  // n - X, theta_n = theta q^{-n}      vs  H(q / theta)
    Degenerate,             // n - X, theta_n = q^{-n - sqrt(n)}  vs  point mass at 0
    QToOneBinomial,         // q_k = 1 - 10^{-k}                  vs  B(n, theta / (1 + theta))
};

std::string scenario_name(Scenario s);
/// Throws ParameterError for unknown names.
Scenario parse_scenario(const std::string& name);

/// Scenario inputs; each scenario reads the fields it needs and rejects
/// missing or out-of-range ones.
struct SweepParams {
    double q = 0.5;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<double> theta;
    std::optional<FractionalDrift> drift;
    /// Trial count for the q -> 1 scenario (whose sweep index is k).
    std::optional<std::int64_t> trials;
    /// Verdict threshold; defaults to default_threshold(scenario).
    std::optional<double> threshold;
};

double default_threshold(Scenario s);

struct ConvergenceRow {
    std::int64_t n;
    double distance;
    std::map<std::string, double> auxiliary;
};

struct SweepReport {
    Scenario scenario;
    double threshold;
    std::vector<ConvergenceRow> rows;
    bool pass;

    /// Header n,distance,<aux keys in sorted order>,threshold,pass.
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// One row per entry of `n_list` (strictly increasing); verdict is
/// final distance <= threshold. For QToOneBinomial the entries are the
/// exponents k of q = 1 - 10^{-k}.
SweepReport convergence_sweep(Scenario scenario, const SweepParams& params, const std::vector<std::int64_t>& n_list);

/// True when the second half of `rows` has nonincreasing distances.
bool eventually_nonincreasing(const std::vector<ConvergenceRow>& rows);

}  // namespace qkemp
