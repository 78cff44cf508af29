#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "belief/core.hpp"
#include "oracle.hpp"

using namespace belief;

namespace {

ArgumentRecord rec(int p, double s, Role role) {
    ArgumentRecord r;
    r.polarity = Polarity::from_int(p);
    r.strength = s;
    r.role = role;
    return r;
}

std::vector<ArgumentRecord> random_records(std::mt19937_64& g, std::size_t n) {
    std::uniform_real_distribution<double> s(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<ArgumentRecord> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(rec(coin(g) ? 1 : -1, s(g), coin(g) ? Role::seed : (coin(g) ? Role::self : Role::opponent)));
    return out;
}

} // namespace

TEST(ComputeLogOdds, EmptySetIsZero) {
    EXPECT_EQ(compute_log_odds(std::vector<ArgumentRecord>{}, UAProfile::make(0.4, 0.7)), 0.0);
}

TEST(ComputeLogOdds, SingleFullStrengthSeed) {
    const std::vector recs{rec(1, 1.0, Role::seed)};
    EXPECT_NEAR(compute_log_odds(recs, UAProfile::make(0.123, 1.0)), std::numbers::ln2, 1e-15);
    EXPECT_NEAR(compute_log_odds(recs, UAProfile::make(0.9, 1.0)), 0.6931472, 1e-7);
}

TEST(ComputeLogOdds, SeedAndOpponentMix) {
    const std::vector recs{rec(1, 0.9, Role::seed), rec(-1, 0.8, Role::opponent)};
    // ln(1.63) - ln(1.32), frozen from an independent scalar evaluation
    EXPECT_NEAR(compute_log_odds(recs, UAProfile::make(0.40, 0.70)), 0.21094827822039136, 1e-14);
}

TEST(ComputeLogOdds, NonSeedInertAtZeroUptake) {
    const std::vector recs{rec(-1, 0.5, Role::opponent)};
    EXPECT_EQ(compute_log_odds(recs, UAProfile::make(0.0, 1.0)), 0.0);
}

TEST(ComputeLogOdds, RejectsOutOfRangeStrengthAndArchived) {
    std::vector recs{rec(1, 1.2, Role::seed)};
    EXPECT_THROW(compute_log_odds(recs, UAProfile::make(0.4, 0.7)), ContractViolation);
    recs = {rec(1, -0.1, Role::seed)};
    EXPECT_THROW(compute_log_odds(recs, UAProfile::make(0.4, 0.7)), ContractViolation);
    recs = {rec(1, 0.5, Role::seed)};
    recs[0].active = false;
    EXPECT_THROW(compute_log_odds(recs, UAProfile::make(0.4, 0.7)), ContractViolation);
}

TEST(Stance, TransformExamples) {
    EXPECT_EQ(stance_from_log_odds(0.0), 0.0);
    EXPECT_NEAR(stance_from_log_odds(std::numbers::ln2), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(stance_from_log_odds(-std::numbers::ln2), -1.0 / 3.0, 1e-15);
}

TEST(Stance, InverseExamples) {
    EXPECT_EQ(log_odds_from_stance(0.0), 0.0);
    EXPECT_NEAR(log_odds_from_stance(1.0 / 3.0), std::numbers::ln2, 1e-15);
    EXPECT_NEAR(log_odds_from_stance(0.995), 5.988961416889864, 1e-12);
    EXPECT_THROW(log_odds_from_stance(1.0), ContractViolation);
    EXPECT_THROW(log_odds_from_stance(-1.0), ContractViolation);
}

TEST(Stance, TanhIdentityAndRoundTrip) {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> L(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double l = L(g);
        EXPECT_NEAR(oracle::logistic_stance(l), stance_from_log_odds(l), 1e-12);
    }
    std::uniform_real_distribution<double> S(-0.999, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const double s = S(g);
        EXPECT_NEAR(stance_from_log_odds(log_odds_from_stance(s)), s, 1e-10);
    }
}

TEST(BeliefState, SignAndZeroInvariants) {
    for (double l : {-1e-300, -1e-20, 0.0, 1e-20, 1e-300, 3.0, -40.0}) {
        BeliefState b(l);
        EXPECT_EQ(b.stance() > 0, l > 0) << l;
        EXPECT_EQ(b.stance() < 0, l < 0) << l;
        EXPECT_EQ(b.stance() == 0.0, l == 0.0) << l;
        EXPECT_NEAR(b.stance(), std::tanh(l / 2), 1e-12);
    }
}

TEST(Prior, ScaledLogitExamples) {
    EXPECT_NEAR(init_prior_from_stance(0.2, UAProfile::make(0.1, 1.0)).stance(), 0.2, 1e-12);
    const BeliefState half = init_prior_from_stance(0.2, UAProfile::make(0.1, 0.5));
    EXPECT_NEAR(half.log_odds(), 0.2027325540540822, 1e-14);
    EXPECT_NEAR(half.stance(), 0.10102051443364381, 1e-14);
    for (double s : {-1.0, -0.6, 0.2, 1.0}) {
        const BeliefState z = init_prior_from_stance(s, UAProfile::make(0.3, 0.0));
        EXPECT_EQ(z.log_odds(), 0.0);
        EXPECT_EQ(z.stance(), 0.0);
    }
    // endpoints are clipped, not rejected
    EXPECT_NEAR(init_prior_from_stance(1.0, UAProfile::make(0.3, 1.0)).stance(), 0.995, 1e-12);
}

TEST(Incremental, Examples) {
    const UAProfile prof = UAProfile::make(0.4, 1.0);
    BeliefState b;
    b = update_incremental(b, rec(1, 1.0, Role::seed), prof);
    EXPECT_NEAR(b.log_odds(), std::numbers::ln2, 1e-15);
    b = update_incremental(b, rec(-1, 1.0, Role::seed), prof);
    EXPECT_EQ(b.log_odds(), 0.0);
    EXPECT_EQ(b.stance(), 0.0);
    const BeliefState c = update_incremental(BeliefState(1.25), rec(-1, 0.0, Role::opponent), prof);
    EXPECT_EQ(c.log_odds(), 1.25);
    EXPECT_THROW(update_incremental(b, rec(1, 0.5, Role::seed), prof, true), ContractViolation);
}

TEST(Incremental, MatchesBatchOnRandomSequences) {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> w(0.0, 1.5);
    for (int t = 0; t < 200; ++t) {
        const auto recs = random_records(g, 1 + t % 50);
        const UAProfile prof = UAProfile::make(w(g), w(g));
        BeliefState b;
        for (const auto& r : recs) b = update_incremental(b, r, prof);
        EXPECT_NEAR(b.log_odds(), compute_log_odds(recs, prof), 1e-12);
    }
}

TEST(Properties, OrderInvarianceAndBoundedStance) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> w(0.0, 1.5);
    for (int t = 0; t < 300; ++t) {
        auto recs = random_records(g, 1 + t % 40);
        const UAProfile prof = UAProfile::make(w(g), w(g));
        const double base = compute_log_odds(recs, prof);
        std::shuffle(recs.begin(), recs.end(), g);
        EXPECT_NEAR(compute_log_odds(recs, prof), base, 1e-12);
        const double s = stance_from_log_odds(base);
        EXPECT_GT(s, -1.0);
        EXPECT_LT(s, 1.0);
    }
}

TEST(Properties, UptakeAndAnchoringMonotone) {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> s(0.01, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<ArgumentRecord> recs;
        for (int i = 0; i < 5; ++i) recs.push_back(rec(1, s(g), Role::seed));
        for (int i = 0; i < 8; ++i) recs.push_back(rec(-1, s(g), Role::opponent));
        double prev_u = std::numeric_limits<double>::infinity();
        double prev_a = -std::numeric_limits<double>::infinity();
        for (double x = 0.0; x <= 1.5; x += 0.1) {
            const double lu = compute_log_odds(recs, UAProfile::make(x, 0.7));
            const double la = compute_log_odds(recs, UAProfile::make(0.4, x));
            EXPECT_LT(lu, prev_u);
            EXPECT_GT(la, prev_a);
            prev_u = lu;
            prev_a = la;
        }
    }
}

TEST(Properties, ZeroUptakeLeavesPrior) {
    std::mt19937_64 g(9);
    for (int t = 0; t < 100; ++t) {
        auto recs = random_records(g, 20);
        std::vector<ArgumentRecord> seeds;
        for (const auto& r : recs)
            if (r.role == Role::seed) seeds.push_back(r);
        const UAProfile prof = UAProfile::make(0.0, 0.9);
        EXPECT_EQ(stance_from_log_odds(compute_log_odds(recs, prof)),
                  stance_from_log_odds(compute_log_odds(seeds, prof)));
    }
}

TEST(Profile, Validation) {
    EXPECT_THROW(UAProfile::make(-0.1, 0.5), ConfigError);
    EXPECT_THROW(UAProfile::make(0.1, -0.5), ConfigError);
    EXPECT_THROW(UAProfile::make(0.1, 0.5, 0.2), ConfigError);
    EXPECT_NO_THROW(UAProfile::make(0.0, 0.0, 0.0));
    EXPECT_EQ(kOpenMinded.uptake, 0.40);
    EXPECT_EQ(kStubborn.anchoring, 0.80);
}
