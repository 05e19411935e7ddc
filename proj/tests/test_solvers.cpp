#include <gtest/gtest.h>

#include <cmath>

#include "qkemp/distributions.hpp"
#include "qkemp/error.hpp"
#include "qkemp/metrics.hpp"
#include "qkemp/solvers.hpp"

using namespace qkemp;

TEST(ThetaForPoisson, Examples) {
    EXPECT_NEAR(theta_for_poisson(2, QBase(0.5), 1.0), 1.0, 1e-15);
    const double t = theta_for_poisson(10, QBase(0.9999), 2.0);
    EXPECT_NEAR(t / (1.0 + t), 0.2, 1e-3);
    EXPECT_THROW(theta_for_poisson(2, QBase(0.5), 2.0), ParameterError);
    EXPECT_THROW(theta_for_poisson(2, QBase(0.5), 0.0), ParameterError);
}

TEST(ThetaForPoisson, CouplesToHeine) {
    const QBase q(0.5);
    const double theta = theta_for_poisson(100, q, 2.0);
    const PmfTable kb = kb_table(KempBinomial(100, theta, q));
    const PmfTable h = tabulate(Heine(0.5 * 2.0, q), 1e-15);
    EXPECT_LT(tv_distance(kb, h), 1e-8);
}

TEST(ThetaForMean, InvertsMoments) {
    const ThetaSolveResult r = theta_for_mean(2, QBase(0.5), 5.0 / 6.0);
    EXPECT_NEAR(r.theta, 1.0, 1e-10);
    EXPECT_LE(r.residual, 1e-12);
    for (double qv : {0.2, 0.5, 0.9}) {
        for (std::int64_t n : {4, 10, 40}) {
            for (double mu : {0.01, 0.7, 2.0}) {
                const ThetaSolveResult s = theta_for_mean(n, QBase(qv), mu);
                EXPECT_LE(s.residual, 1e-12);
                EXPECT_NEAR(kb_moments(KempBinomial(n, s.theta, QBase(qv))).mean, mu, 1e-12);
            }
        }
    }
}

TEST(ThetaForMean, SmallTargetsGiveSmallTheta) {
    double prev = INFINITY;
    for (double mu : {1e-2, 1e-4, 1e-8}) {
        const double t = theta_for_mean(10, QBase(0.5), mu).theta;
        EXPECT_LT(t, prev);
        prev = t;
    }
    EXPECT_LT(prev, 1e-7);
    EXPECT_THROW(theta_for_mean(10, QBase(0.5), 0.0), ParameterError);
    EXPECT_THROW(theta_for_mean(3, QBase(0.5), 2.0), ParameterError);
}

TEST(ThetaForMean, StrictlyDecreasingInN) {
    const QBase q(0.5);
    double prev = INFINITY;
    for (std::int64_t n = 2; n <= 50; ++n) {
        const ThetaSolveResult r = theta_for_mean(n, q, 1.0);
        EXPECT_LE(r.residual, 1e-12);
        EXPECT_LT(r.theta, prev) << n;
        prev = r.theta;
    }
}

TEST(ThetaForMean, ConvergesToLimit) {
    const QBase q(0.5);
    const ThetaSolveResult lim = theta_limit_for_mean(q, 1.0);
    EXPECT_LE(lim.residual, 1e-12);
    double prev_gap = INFINITY;
    for (std::int64_t n : {5, 10, 20, 40, 80}) {
        const double gap = theta_for_mean(n, q, 1.0).theta - lim.theta;
        EXPECT_GE(gap, 0.0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LT(std::fabs(theta_for_mean(200, q, 1.0).theta - lim.theta), 1e-8);
}

TEST(ThetaLimit, NearOneAndNearZero) {
    const double eps = 1e-4;
    const ThetaSolveResult r = theta_limit_for_mean(QBase(1.0 - eps), 1.0);
    EXPECT_NEAR(r.theta / eps, 1.0, 1e-2);
    EXPECT_LT(theta_limit_for_mean(QBase(0.5), 1e-9).theta, 1e-8);
    EXPECT_THROW(theta_limit_for_mean(QBase(0.5), -1.0), ParameterError);
}

TEST(Solvers, Deterministic) {
    const ThetaSolveResult a = theta_for_mean(37, QBase(0.63), 1.7);
    const ThetaSolveResult b = theta_for_mean(37, QBase(0.63), 1.7);
    EXPECT_EQ(a.theta, b.theta);
    EXPECT_EQ(a.residual, b.residual);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_LE(a.iterations, kMaxBisectionSteps);
}

TEST(Solvers, MeanIncreasingInThetaAndQ) {
    for (double qv : {0.2, 0.5, 0.9}) {
        double prev = -1.0;
        for (int i = -40; i <= 40; ++i) {
            const double m = kb_moments(KempBinomial(25, std::exp(0.25 * i), QBase(qv))).mean;
            EXPECT_GT(m, prev);
            prev = m;
        }
    }
    for (double theta : {0.1, 1.0, 4.0}) {
        double prev = -1.0;
        for (int i = 1; i < 20; ++i) {
            const double m = kb_moments(KempBinomial(25, theta, QBase(0.05 * i))).mean;
            EXPECT_GT(m, prev);
            prev = m;
        }
    }
}
