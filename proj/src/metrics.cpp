#include "qkemp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qkemp/error.hpp"
#include "qkemp/format.hpp"
#include "qkemp/solvers.hpp"

namespace qkemp {

namespace {

// Every table is certified at least this deep, whatever the requested tol.
constexpr double kTailTarget = 1e-15;

PmfTable tabulate_heine(const Heine& d, double tail_target) {
    if (d.theta == 0.0) return PmfTable::point_mass(0);
    const double log_theta = std::log(d.theta);
    double log_p = -log_q_pochhammer_inf(-d.theta, d.q).log_abs;
    std::vector<double> probs;
    for (std::int64_t x = 0;; ++x) {
        const double p = std::exp(log_p);
        probs.push_back(p);
        // P(x+1) / P(x) = theta q^x / (1 - q^{x+1}), decreasing in x
        const double log_ratio = log_theta + static_cast<double>(x) * d.q.log() -
                                 std::log(-std::expm1(static_cast<double>(x + 1) * d.q.log()));
        const double ratio = std::exp(log_ratio);
        if (ratio < 1.0 && p * ratio / (1.0 - ratio) < tail_target) break;
        log_p += log_ratio;
    }
    return PmfTable(0, std::move(probs));
}

PmfTable tabulate_poisson(const Poisson& d, double tail_target) {
    if (!(d.lambda >= 0.0) || !std::isfinite(d.lambda)) throw ParameterError("poisson: need lambda >= 0");
    if (d.lambda == 0.0) return PmfTable::point_mass(0);
    std::vector<double> probs;
    for (std::int64_t x = 0;; ++x) {
        const double p = reference_pmf(d, x);
        probs.push_back(p);
        const double ratio = d.lambda / static_cast<double>(x + 1);
        if (ratio < 1.0 && p * ratio / (1.0 - ratio) < tail_target) break;
    }
    return PmfTable(0, std::move(probs));
}

PmfTable tabulate_dnorm(const DiscreteNormal& d) {
    const auto center = static_cast<std::int64_t>(std::llround(d.alpha));
    // beyond this half-width each side carries < 1e-18 relative mass
    const auto width =
        static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * (18.0 * std::log(10.0) + 2.0) / -d.q.log()))) + 2;
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(2 * width + 1));
    for (std::int64_t x = center - width; x <= center + width; ++x) probs.push_back(dnorm_pmf(d, x));
    return PmfTable(center - width, std::move(probs));
}

PmfTable tabulate_binomial(const Binomial& d) {
    std::vector<double> probs;
    for (std::int64_t x = 0; x <= d.n; ++x) probs.push_back(reference_pmf(d, x));
    return PmfTable(0, std::move(probs));
}

}  // namespace

PmfTable tabulate(const Law& law, double tol) {
    if (!(tol > 0.0 && tol <= 1e-6)) throw ParameterError("tabulate: tol must lie in (0, 1e-6]");
    const double target = std::min(tol, kTailTarget);
    return std::visit(
        [target](const auto& l) -> PmfTable {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, KempBinomial>) return kb_table(l);
            else if constexpr (std::is_same_v<T, Heine>) return tabulate_heine(l, target);
            else if constexpr (std::is_same_v<T, DiscreteNormal>) return tabulate_dnorm(l);
            else if constexpr (std::is_same_v<T, Binomial>) return tabulate_binomial(l);
            else return tabulate_poisson(l, target);
        },
        law);
}

double tv_distance(const PmfTable& a, const PmfTable& b) {
    const std::int64_t lo = std::min(a.lo(), b.lo());
    const std::int64_t hi = std::max(a.hi(), b.hi());
    long double sum = 0.0L;
    for (std::int64_t x = lo; x <= hi; ++x) sum += std::fabs(static_cast<long double>(a.at(x)) - b.at(x));
    return static_cast<double>(0.5L * sum) + 0.5 * std::fabs(a.uncaptured_mass() - b.uncaptured_mass());
}

double kolmogorov_distance(const PmfTable& a, const PmfTable& b) {
    const std::int64_t lo = std::min(a.lo(), b.lo());
    const std::int64_t hi = std::max(a.hi(), b.hi());
    long double fa = 0.0L;
    long double fb = 0.0L;
    long double worst = 0.0L;
    for (std::int64_t x = lo; x <= hi; ++x) {
        fa += a.at(x);
        fb += b.at(x);
        worst = std::max(worst, std::fabs(fa - fb));
    }
    return static_cast<double>(worst);
}

// ---------------------------------------------------------------------------
// Scenarios

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::PoissonCoupling: return "poisson-coupling";
        case Scenario::ConstantMean: return "constant-mean";
        case Scenario::Subexponential: return "subexponential";
        case Scenario::ExponentialReflection: return "exponential-reflection";
        case Scenario::Degenerate: return "degenerate";
        case Scenario::QToOneBinomial: return "q-to-1-binomial";
    }
    return "unknown";
}

Scenario parse_scenario(const std::string& name) {
    for (Scenario s : {Scenario::PoissonCoupling, Scenario::ConstantMean, Scenario::Subexponential,
                       Scenario::ExponentialReflection, Scenario::Degenerate, Scenario::QToOneBinomial}) {
        if (scenario_name(s) == name) return s;
    }
    throw ParameterError("unknown scenario '" + name + "'");
}

double default_threshold(Scenario s) {
    switch (s) {
        case Scenario::PoissonCoupling: return 1e-6;
        case Scenario::ConstantMean: return 1e-6;
        case Scenario::Subexponential: return 1e-4;
        case Scenario::ExponentialReflection: return 1e-6;
        case Scenario::Degenerate: return 1e-5;
        case Scenario::QToOneBinomial: return 1e-3;
    }
    return 0.0;
}

namespace {

template <class T>
const T& require(const std::optional<T>& value, const char* what, Scenario s) {
    if (!value) throw ParameterError(scenario_name(s) + " scenario needs " + what);
    return *value;
}

// floor(mu), or the ceil/floor rule when beta = 1/2. Means within 1e-9 of an
// integer are taken to be that integer.
std::int64_t lattice_shift(double mu, const DriftValue& f, std::int64_t n) {
    const double nearest = std::round(mu);
    if (std::fabs(mu - nearest) < 1e-9) return static_cast<std::int64_t>(nearest);
    if (f.beta == 0.5 && 2.0 * f.value() >= static_cast<double>(n)) return static_cast<std::int64_t>(std::ceil(mu));
    return static_cast<std::int64_t>(std::floor(mu));
}

ConvergenceRow subexponential_row(std::int64_t n, const DriftValue& f, QBase q, const LimitLaw& law) {
    if (!(f.value() > 0.0 && f.value() < static_cast<double>(n))) {
        throw ParameterError("subexponential scenario needs 0 < f(n) < n at n = " + std::to_string(n));
    }
    const KempBinomial kb = kb_with_drift(n, f, q);
    const MomentPair m = kb_moments(kb);
    const std::int64_t shift = lattice_shift(m.mean, f, n);
    const PmfTable table = kb_table(kb);
    const PmfTable centred(-shift, std::vector<double>(table.probs().begin(), table.probs().end()));
    return {n,
            tv_distance(centred, law.lattice_probs),
            {{"mean", m.mean}, {"shift", static_cast<double>(shift)}, {"sigma", std::sqrt(m.variance)}, {"f", f.value()}}};
}

}  // namespace

SweepReport convergence_sweep(Scenario scenario, const SweepParams& params, const std::vector<std::int64_t>& n_list) {
    if (n_list.empty()) throw ParameterError("sweep needs at least one n");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) throw ParameterError("sweep n-list must be strictly increasing");
    }
    SweepReport report{scenario, params.threshold.value_or(default_threshold(scenario)), {}, false};
    if (!(report.threshold >= 0.0)) throw ParameterError("sweep threshold must be >= 0");

    const auto positive_n = [&](std::int64_t n) {
        if (n < 1) throw ParameterError(scenario_name(scenario) + " scenario needs n >= 1");
    };

    switch (scenario) {
        case Scenario::PoissonCoupling: {
            const QBase q(params.q);
            const double lambda = require(params.lambda, "lambda", scenario);
            const Heine limit((1.0 - q.value()) * lambda, q);
            const PmfTable target = tabulate(limit, 1e-15);
            const double limit_mean = heine_mean(limit);
            for (std::int64_t n : n_list) {
                const double theta = theta_for_poisson(n, q, lambda);
                const KempBinomial kb(n, theta, q);
                report.rows.push_back(
                    {n, tv_distance(kb_table(kb), target), {{"theta", theta}, {"mean_gap", kb_moments(kb).mean - limit_mean}}});
            }
            break;
        }
        case Scenario::ConstantMean: {
            const QBase q(params.q);
            const double mu = require(params.mu, "mu", scenario);
            const ThetaSolveResult limit_theta = theta_limit_for_mean(q, mu);
            const PmfTable target = tabulate(Heine(limit_theta.theta, q), 1e-15);
            for (std::int64_t n : n_list) {
                const ThetaSolveResult solved = theta_for_mean(n, q, mu);
                const KempBinomial kb(n, solved.theta, q);
                report.rows.push_back({n,
                                       tv_distance(kb_table(kb), target),
                                       {{"theta", solved.theta},
                                        {"theta_limit", limit_theta.theta},
                                        {"residual", solved.residual}}});
            }
            break;
        }
        case Scenario::Subexponential: {
            const QBase q(params.q);
            const FractionalDrift& drift = require(params.drift, "a drift f(n)", scenario);
            const double beta = drift.at(n_list.front()).beta;
            for (std::int64_t n : n_list) {
                if (drift.at(n).beta != beta) {
                    throw ParameterError("subexponential scenario: n-list must keep {f(n)} constant (n = " +
                                         std::to_string(n) + " leaves the residue class)");
                }
            }
            const LimitLaw law = limit_law(beta, q);
            for (std::int64_t n : n_list) report.rows.push_back(subexponential_row(n, drift.at(n), q, law));
            break;
        }
        case Scenario::ExponentialReflection: {
            const QBase q(params.q);
            const double theta = require(params.theta, "theta", scenario);
            if (!(theta > 0.0)) throw ParameterError("exponential-reflection scenario needs theta > 0");
            const PmfTable target = tabulate(Heine(q.value() / theta, q), 1e-15);
            for (std::int64_t n : n_list) {
                positive_n(n);
                const KempBinomial kb(n, ScaledReal::from_double(theta, q).shifted(-n));
                const PmfTable reflected = reflect(kb_table(kb), n);
                report.rows.push_back({n, tv_distance(reflected, target), {{"p_zero", reflected.at(0)}}});
            }
            break;
        }
        case Scenario::Degenerate: {
            const QBase q(params.q);
            const PmfTable target = PmfTable::point_mass(0);
            for (std::int64_t n : n_list) {
                positive_n(n);
                const double f = std::sqrt(static_cast<double>(n));
                const KempBinomial kb(n, ScaledReal::q_power(-static_cast<double>(n) - f, q));
                const PmfTable reflected = reflect(kb_table(kb), n);
                const double bound = std::exp((f + 1.0) * q.log()) / (1.0 - q.value());
                report.rows.push_back(
                    {n, tv_distance(reflected, target), {{"p_zero", reflected.at(0)}, {"product_bound", bound}}});
            }
            break;
        }
        case Scenario::QToOneBinomial: {
            const std::int64_t trials = require(params.trials, "a trial count", scenario);
            const double theta = require(params.theta, "theta", scenario);
            if (trials < 0 || !(theta > 0.0)) throw ParameterError("q-to-1-binomial scenario needs n >= 0, theta > 0");
            const PmfTable target = tabulate(Binomial{trials, theta / (1.0 + theta)}, 1e-15);
            for (std::int64_t k : n_list) {
                if (k < 1 || k > 15) throw ParameterError("q-to-1-binomial exponents k must lie in [1, 15]");
                const QBase q(1.0 - std::pow(10.0, -static_cast<double>(k)));
                report.rows.push_back({k, tv_distance(kb_table(KempBinomial(trials, theta, q)), target), {{"q", q.value()}}});
            }
            break;
        }
    }
    report.pass = report.rows.back().distance <= report.threshold;
    return report;
}

bool eventually_nonincreasing(const std::vector<ConvergenceRow>& rows) {
    for (std::size_t i = rows.size() / 2 + 1; i < rows.size(); ++i) {
        if (rows[i].distance > rows[i - 1].distance) return false;
    }
    return true;
}

std::string SweepReport::to_csv() const {
    std::set<std::string> keys;
    for (const auto& row : rows) {
        for (const auto& [k, v] : row.auxiliary) keys.insert(k);
    }
    std::string out = "n,distance";
    for (const auto& k : keys) out += "," + k;
    out += ",threshold,pass\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n) + "," + format_real(row.distance);
        for (const auto& k : keys) {
            out += ',';
            if (auto it = row.auxiliary.find(k); it != row.auxiliary.end()) out += format_real(it->second);
        }
        out += "," + format_real(threshold) + (pass ? ",true\n" : ",false\n");
    }
    return out;
}

nlohmann::json SweepReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
        rows_json.push_back({{"n", row.n}, {"distance", row.distance}, {"aux", row.auxiliary}});
    }
    return {{"scenario", scenario_name(scenario)}, {"threshold", threshold}, {"pass", pass}, {"rows", rows_json}};
}

}  // namespace qkemp
