// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qkemp/asymptotics.hpp"
#include "qkemp/distributions.hpp"
#include "qkemp/error.hpp"
#include "qkemp/metrics.hpp"
#include "qkemp/solvers.hpp"

using namespace qkemp;

namespace {

struct Check {
    std::vector<std::string> failures;
    int count = 0;

    void expect(bool ok, const std::string& what) {
        ++count;
        if (!ok) failures.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream msg;
        msg.precision(6);
        msg << what << " (got " << got << ", want " << want << " +- " << tol << ")";
        expect(std::fabs(got - want) <= tol, msg.str());
    }
    void at_most(double got, double bound, const std::string& what) {
        std::ostringstream msg;
        msg.precision(6);
        msg << what << " (" << got << " > " << bound << ")";
        expect(got <= bound, msg.str());
    }
};

std::string str(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

double sum_probs(const PmfTable& t) {
    double s = 0.0;
    for (double p : t.probs()) s += p;
    return s;
}

void c1(Check& c) {
    for (double z : {0.1, 0.5, 1.0}) {
        for (double qv : {0.1, 0.5, 0.9}) {
            const std::string tag = "e_q(z)E_q(-z) at z=" + str(z) + " q=" + str(qv);
            try {
                c.near(e_q(z, QBase(qv)) * E_q(-z, QBase(qv)), 1.0, 1e-12, tag);
            } catch (const NumericError& e) {
                c.expect(false, tag + ": " + e.what());
            }
        }
    }
    for (double qv : {0.2, 0.5, 0.9}) {
        const QBase q(qv);
        for (double z : {0.05, 0.5, 2.0, 40.0}) {
            const ScaledReal zs = ScaledReal::from_double(z, q);
            for (std::int64_t n = 0; n <= 30; ++n) {
                const ScaledReal lhs = q_pochhammer(zs.negated(), n);
                ScaledReal rhs = ScaledReal::from_parts(1.0, n * (n - 1) / 2, q) * zs.pow(n);
                for (std::int64_t i = 0; i < n; ++i) rhs *= one_minus(zs.shifted(i).reciprocal().negated());
                c.at_most(std::fabs(std::expm1(lhs.log_abs() - rhs.log_abs())), 1e-12,
                          "reflection identity z=" + str(z) + " q=" + str(qv) + " n=" + std::to_string(n));
            }
        }
    }
}

void c2(Check& c) {
    for (double qv : {0.2, 0.5, 0.9}) {
        const QBase q(qv);
        for (std::int64_t n = 0; n <= 60; ++n) {
            const std::vector<ScaledReal> thetas{ScaledReal::from_double(0.1, q), ScaledReal::from_double(1.0, q),
                                                 ScaledReal::from_double(5.0, q), ScaledReal::from_parts(1.0, -n, q)};
            for (const ScaledReal& theta : thetas) {
                const std::string tag = "n=" + std::to_string(n) + " theta=" + str(theta.to_double()) + " q=" + str(qv);
                const KempBinomial d(n, theta);
                const PmfTable t = kb_table(d);
                c.near(sum_probs(t), 1.0, 1e-12, "sum pmf " + tag);
                const auto ref = oracle::moments(
                    oracle::kb_pmf(static_cast<int>(n), static_cast<long double>(theta.log_abs()), qv));
                const MomentPair m = kb_moments(d);
                c.near(m.mean, static_cast<double>(ref.mean), 1e-10, "mean " + tag);
                c.near(m.variance, static_cast<double>(ref.variance), 1e-10, "variance " + tag);
                c.near(m.mean, t.mean(), 1e-10, "table mean " + tag);
                c.near(m.variance, t.variance(), 1e-10, "table variance " + tag);
            }
        }
    }
}

void c3(Check& c) {
    SweepParams p;
    p.q = 0.5;
    p.lambda = 2.0;
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 10; n <= 100; ++n) ns.push_back(n);
    const SweepReport r = convergence_sweep(Scenario::PoissonCoupling, p, ns);
    c.at_most(r.rows.back().distance, 1e-6, "TV at n=100");
    c.expect(eventually_nonincreasing(r.rows), "TV nonincreasing over the last half");
}

void c4(Check& c) {
    const QBase q(0.5);
    const ThetaSolveResult lim = theta_limit_for_mean(q, 1.0);
    c.at_most(lim.residual, 1e-12, "limit residual");
    // beyond n = 50 consecutive roots differ by less than one ulp, so only
    // closeness to the limit is checked there
    double prev = INFINITY;
    for (std::int64_t n = 2; n <= 200; ++n) {
        const ThetaSolveResult r = theta_for_mean(n, q, 1.0);
        c.at_most(r.residual, 1e-12, "residual n=" + std::to_string(n));
        if (n <= 50) {
            c.expect(r.theta < prev, "theta_n strictly decreasing at n=" + std::to_string(n));
        } else {
            c.at_most(std::fabs(r.theta - lim.theta), 1e-8, "|theta_n - theta_limit| at n=" + std::to_string(n));
        }
        prev = r.theta;
    }
    c.at_most(std::fabs(prev - lim.theta), 1e-8, "|theta_200 - theta_limit|");
    const double eps = 1e-4;
    const ThetaSolveResult near_one = theta_limit_for_mean(QBase(1.0 - eps), 1.0);
    c.at_most(near_one.residual, 1e-12, "residual at q=1-1e-4");
    c.near(near_one.theta / eps, 1.0, 1e-2, "theta(q)/(1-q) at q=1-1e-4");
}

void c5(Check& c) {
    const QBase q(0.5);
    const FractionalDrift f(3, 10, 0.25);
    for (std::int64_t n = 50; n <= 400; ++n) {
        const DriftValue fv = f.at(n);
        const MeanAsymptotics m = mean_expansion(n, fv, q, default_fourier_terms(q));
        const double direct = kb_moments(kb_with_drift(n, fv, q)).mean;
        const double err = std::fabs(direct - m.estimate);
        if (n >= 200) c.at_most(err, 1e-12, "|direct - estimate| n=" + std::to_string(n));
        c.at_most(err, m.error_bound, "error bound n=" + std::to_string(n));
    }
    for (double qv : {0.2, 0.5, 0.8}) {
        for (int i = 0; i < 10; ++i) {
            const double b = 0.1 * i;
            c.at_most(std::fabs(c_direct(b, QBase(qv)) - c_fourier(b, QBase(qv), 20)), 1e-12,
                      "c_direct vs c_fourier beta=" + str(b) + " q=" + str(qv));
        }
    }
}

void c6(Check& c) {
    for (double qv : {0.2, 0.5, 0.9}) {
        const QBase q(qv);
        const double bound = 2.0 / (1.0 - qv);
        for (int i = 0; i < 20; ++i) {
            const double b = 0.05 * i;
            c.at_most(limiting_variance(b, q), bound, "limit variance beta=" + str(b) + " q=" + str(qv));
        }
        for (const FractionalDrift& f : {FractionalDrift(3, 10, 0.25), FractionalDrift(1, 2, 0.3)}) {
            for (std::int64_t n = 10; n <= 400; n += 10) {
                c.at_most(kb_moments(kb_with_drift(n, f.at(n), q)).variance, bound,
                          "sigma_n^2 n=" + std::to_string(n) + " q=" + str(qv));
            }
        }
        c.near(c_direct(0.0, q), 0.5, 1e-12, "c(0,q) q=" + str(qv));
        c.near(c_direct(0.5, q), 0.5, 1e-12, "c(1/2,q) q=" + str(qv));
        for (int i = 1; i < 10; ++i) {
            const double b = 0.1 * i;
            c.near(c_direct(b, q) + c_direct(1.0 - b, q), 1.0, 1e-12, "c(b)+c(1-b) b=" + str(b) + " q=" + str(qv));
        }
        for (int i = 1; i <= 19; ++i) {
            const double b = 0.05 * i;
            const int want = b < 0.5 ? 0 : 1;
            c.expect(floor_case(b, q) == want, "floor_case table beta=" + str(b) + " q=" + str(qv));
            const std::int64_t n = qv > 0.8 ? 1200 : 300;
            const double mu = kb_moments(kb_with_drift(n, DriftValue{n / 3, b}, q)).mean;
            c.expect(static_cast<std::int64_t>(std::floor(mu)) - n / 3 == want,
                     "floor of finite mean beta=" + str(b) + " q=" + str(qv));
        }
    }
    const QBase half(0.5);
    const DriftValue f{10, 0.5};
    for (std::int64_t n : {21, 20}) {
        const double mu = kb_moments(kb_with_drift(n, f, half)).mean;
        c.expect(mu < 11.0, "mu_n < f + 1/2 when 2f >= n, n=" + std::to_string(n) + " (mu=" + str(mu) + ")");
        c.expect(std::ceil(mu) == 11.0, "ceil(mu_n) = f + 1/2, n=" + std::to_string(n));
    }
    const double mu23 = kb_moments(kb_with_drift(23, f, half)).mean;
    c.expect(mu23 > 11.0 && std::floor(mu23) == 11.0, "mu_n > f + 1/2 when 2f <= n - 1, n=23");
}

void c7(Check& c) {
    const QBase q(0.5);
    SweepParams p;
    p.q = 0.5;
    p.drift = FractionalDrift(1, 2, 0.3);
    const SweepReport r = convergence_sweep(Scenario::Subexponential, p, {20, 40, 60, 80, 100, 120});
    c.at_most(r.rows.back().distance, 1e-4, "shifted TV at n=120");
    for (double b : {0.0, 0.3, 0.5, 0.7}) {
        const LimitLaw law = limit_law(b, q);
        c.near(sum_probs(law.lattice_probs), 1.0, 1e-10, "limit lattice sum beta=" + str(b));
        const DiscreteNormal dn{dnorm_alpha(b), q};
        double best = INFINITY;
        for (std::int64_t shift = -2; shift <= 2; ++shift) {
            double worst = 0.0;
            for (std::int64_t x = -kLimitLawHalfWidth; x <= kLimitLawHalfWidth; ++x) {
                worst = std::max(worst, std::fabs(law.lattice_probs.at(x) - dnorm_pmf(dn, x + shift)));
            }
            best = std::min(best, worst);
        }
        c.at_most(best, 1e-10, "limit law vs shifted dnorm beta=" + str(b));
    }
    const auto min_asymmetry = [&](double b) {
        const LimitLaw law = limit_law(b, q);
        double best = INFINITY;
        for (std::int64_t s = -6; s <= 6; ++s) {
            double worst = 0.0;
            for (std::int64_t x = -30; x <= 30; ++x) {
                worst = std::max(worst, std::fabs(law.lattice_probs.at(x) - law.lattice_probs.at(s - x)));
            }
            best = std::min(best, worst);
        }
        return best;
    };
    c.expect(min_asymmetry(0.0) == 0.0, "exact symmetry at beta=0");
    c.expect(min_asymmetry(0.5) == 0.0, "exact symmetry at beta=1/2");
    c.expect(min_asymmetry(0.3) > 1e-3, "measurable asymmetry at beta=0.3");
}

void c8(Check& c) {
    const QBase q(0.5);
    for (std::int64_t n = 0; n <= 60; ++n) {
        const PmfTable reflected = reflect(kb_table(KempBinomial(n, ScaledReal::scaled_q_power(2.0, -double(n), q))), n);
        const KempBinomial dual(n, 0.25, q);
        double worst = 0.0;
        for (std::int64_t y = 0; y <= n; ++y) worst = std::max(worst, std::fabs(reflected.at(y) - kb_pmf(dual, y)));
        c.at_most(worst, 1e-12, "reflection identity n=" + std::to_string(n));
    }
    SweepParams p;
    p.q = 0.5;
    p.theta = 2.0;
    const SweepReport r = convergence_sweep(Scenario::ExponentialReflection, p, {10, 20, 40, 80});
    c.at_most(r.rows.back().distance, 1e-6, "TV(reflected, Heine(q/theta)) at n=80");
    SweepParams d;
    d.q = 0.5;
    const SweepReport deg = convergence_sweep(Scenario::Degenerate, d, {400});
    c.expect(deg.rows.back().auxiliary.at("p_zero") >= 1.0 - 1e-5, "P(Y_400 = 0) >= 1 - 1e-5");
}

void c9(Check& c) {
    const QBase q(1.0 - 1e-4);
    const PmfTable kb = kb_table(KempBinomial(10, 1.0, q));
    const PmfTable bin = tabulate(Binomial{10, 0.5}, 1e-12);
    c.at_most(tv_distance(kb, bin), 1e-3, "TV(KB, binomial) at q=1-1e-4");
    c.at_most(std::fabs(c_direct(0.3, QBase(0.999)) - 0.5), 0.01, "|c(0.3, 0.999) - 1/2|");
    const double series = c_fourier_series(0.3, QBase(1e-3), default_fourier_terms(QBase(1e-3)));
    c.near(series, 0.5 - 0.3, 1e-2, "series part at beta=0.3, q=1e-3");
}

void c10(Check& c) {
    const KempBinomial d(20, 1.3, QBase(0.6));
    const PmfTable t = kb_table(d);
    const auto draw = [&](std::uint64_t seed) {
        const KbSampler sampler(d);
        UniformSource rng(seed);
        std::vector<std::int64_t> xs(1'000'000);
        for (auto& x : xs) x = sampler(rng);
        return xs;
    };
    const std::vector<std::int64_t> xs = draw(20240601);
    std::vector<double> counts(21, 0.0);
    for (std::int64_t x : xs) counts[static_cast<std::size_t>(x)] += 1.0;
    const double total = static_cast<double>(xs.size());
    double tv = 0.0;
    for (std::int64_t x = 0; x <= 20; ++x) tv += std::fabs(counts[static_cast<std::size_t>(x)] / total - t.at(x));
    c.at_most(0.5 * tv, 0.005, "empirical TV");

    double stat = 0.0;
    int cells = 0;
    double obs = 0.0;
    double expct = 0.0;
    for (std::int64_t x = 0; x <= 20; ++x) {
        obs += counts[static_cast<std::size_t>(x)];
        expct += total * t.at(x);
        if (expct >= 5.0) {
            stat += (obs - expct) * (obs - expct) / expct;
            ++cells;
            obs = expct = 0.0;
        }
    }
    if (expct > 0.0) stat += (obs - expct) * (obs - expct) / expct;
    const double p_value = boost::math::gamma_q(0.5 * (cells - 1), 0.5 * stat);
    c.expect(p_value > 1e-3, "chi-square p-value " + str(p_value) + " with " + std::to_string(cells - 1) + " dof");
    c.expect(draw(20240601) == xs, "same seed reproduces draws");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"q-calculus identities", c1},
        {"KB normalization and moments", c2},
        {"Poisson coupling to Heine", c3},
        {"constant-mean solver", c4},
        {"mean expansion", c5},
        {"variance bound, c(beta,q) properties, floor cases", c6},
        {"lattice limit law", c7},
        {"exponential reflection and degenerate limit", c8},
        {"boundary limits q -> 1 and q -> 0", c9},
        {"sampling", c10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        std::string crash;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            crash = e.what();
        }
        const bool ok = c.failures.empty() && crash.empty();
        failed += ok ? 0 : 1;
        std::printf("%s criterion %zu: %s (%d checks, %zu failed)\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), c.count, c.failures.size());
        for (std::size_t k = 0; k < c.failures.size() && k < 10; ++k) std::printf("    - %s\n", c.failures[k].c_str());
        if (c.failures.size() > 10) std::printf("    ... %zu more\n", c.failures.size() - 10);
        if (!crash.empty()) std::printf("    - aborted: %s\n", crash.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
