#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "belief/synthetic.hpp"

using namespace belief;

namespace {

ReplayCase make_case(int init, int fin, std::vector<EvidenceItem> ev = {}) {
    ReplayCase c;
    c.participant = "p";
    c.group = "g";
    c.topic = "t";
    c.initial_likert = init;
    c.final_likert = fin;
    c.initial_stance = likert_to_stance(init);
    c.final_stance = likert_to_stance(fin);
    c.evidence = std::move(ev);
    return c;
}

EvidenceItem item(std::int64_t order, std::string claim, int p, double s) {
    EvidenceItem e;
    e.order = order;
    e.claim = std::move(claim);
    e.polarity = Polarity::from_int(p);
    e.strength = s;
    return e;
}

// Root of d/dbeta sum (beta*E - dS)^2, found by bisection on the derivative.
double numeric_beta(const std::vector<EvidenceMove>& xs) {
    auto grad = [&](double b) {
        long double g = 0;
        for (const auto& x : xs) g += static_cast<long double>(x.net_evidence) * (b * x.net_evidence - x.delta);
        return g;
    };
    double lo = -100, hi = 100;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (grad(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(Likert, MapsOntoSixEvenlySpacedStances) {
    const double want[] = {-1.0, -0.6, -0.2, 0.2, 0.6, 1.0};
    for (int v = 1; v <= 6; ++v) EXPECT_DOUBLE_EQ(likert_to_stance(v), want[v - 1]);
    EXPECT_THROW(likert_to_stance(0), IngestionError);
    EXPECT_THROW(likert_to_stance(7), IngestionError);
}

TEST(ReplayCase, HandEvaluatedSingleItem) {
    const auto c = make_case(4, 4, {item(1, "more turnout means broader mandates", +1, 0.5)});
    const double L = std::log(1.2 / 0.8) + std::log(1.0 + 0.5 * 0.2);
    EXPECT_NEAR(L, 0.500775, 1e-6);
    const double s = replay_case(c, UAProfile{0.2, 1.0, 0.0});
    EXPECT_NEAR(s, std::tanh(L / 2), 1e-12);
    EXPECT_NEAR(s, 0.24528, 5e-6);
}

TEST(ReplayCase, EmptyStreamAndZeroUptakeKeepThePrior) {
    const auto empty = make_case(5, 2);
    EXPECT_NEAR(replay_case(empty, UAProfile{0.4, 1.0, 0.0}), 0.6, 1e-12);
    // endpoints are clipped before inversion
    EXPECT_NEAR(replay_case(make_case(6, 6), UAProfile{0.4, 1.0, 0.0}), 0.995, 1e-12);

    const auto c = make_case(2, 5, {item(1, "a claim about costs", +1, 0.9), item(2, "a claim about liberty", -1, 0.3)});
    EXPECT_NEAR(replay_case(c, UAProfile{0.0, 1.0, 0.0}), -0.6, 1e-12);
    EXPECT_NEAR(replay_case(c, UAProfile{0.0, 0.5, 0.0}), std::tanh(0.5 * std::log(0.4 / 1.6) / 2), 1e-12);
}

TEST(NetEvidence, SumsAcceptedRecordsOnly) {
    EXPECT_EQ(net_evidence(make_case(3, 3)), 0.0);
    const auto two = make_case(3, 3, {item(1, "fines punish the poor most", +1, 0.6),
                                      item(2, "turnout data from Australia", -1, 0.4)});
    EXPECT_NEAR(net_evidence(two), 0.2, 1e-15);

    auto dup = two;
    dup.evidence.push_back(item(3, "fines punish the poor most", +1, 0.5));
    EXPECT_NEAR(net_evidence(dup), 0.2, 1e-15);
    EXPECT_EQ(prepare_case(dup, {}).archived, 1u);

    // a stronger repeat replaces the weaker record
    auto stronger = two;
    stronger.evidence.push_back(item(3, "fines punish the poor most", +1, 0.9));
    EXPECT_NEAR(net_evidence(stronger), 0.5, 1e-15);
}

TEST(NetEvidence, UsesTheSameAcceptedSetAsReplay) {
    SyntheticConfig cfg;
    cfg.cases = 60;
    cfg.duplicate_rate = 0.4;
    for (const auto& s : generate_population(cfg)) {
        const PreparedCase p = prepare_case(s.c, {});
        double e = 0;
        for (const auto& a : p.accepted) e += a.polarity.value() * a.strength;
        EXPECT_DOUBLE_EQ(net_evidence(s.c), e);
        EXPECT_EQ(p.accepted.size() + p.archived, s.c.evidence.size());
    }
}

TEST(LinearBaseline, ClosedFormExample) {
    const auto fit = fit_linear_baseline({{1.0, 0.5}, {2.0, 1.0}});
    EXPECT_DOUBLE_EQ(fit.beta, 0.5);
    EXPECT_FALSE(fit.degenerate);
    EXPECT_EQ(fit_linear_baseline({{1.0, 0.0}, {-3.0, 0.0}}).beta, 0.0);
    const auto zero = fit_linear_baseline({{0.0, 0.4}});
    EXPECT_TRUE(zero.degenerate);
    EXPECT_EQ(zero.beta, 0.0);
    EXPECT_EQ(linear_prediction(0.8, 2.0, 0.5), 1.0);
}

TEST(LinearBaseline, MatchesNumericMinimisation) {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        std::vector<EvidenceMove> xs(1 + uniform_below(rng, 30));
        for (auto& x : xs) x = {uniform(rng, -3, 3), uniform(rng, -1.5, 1.5)};
        EXPECT_NEAR(fit_linear_baseline(xs).beta, numeric_beta(xs), 1e-8);
    }
}

TEST(Evaluate, RmseAndMovement) {
    auto a = make_case(3, 3);
    auto b = make_case(3, 5);
    const auto ev = evaluate({a, b}, {a.final_stance + 0.3, b.final_stance - 0.4});
    EXPECT_NEAR(ev.rmse, std::sqrt(0.125), 1e-15);
    EXPECT_NEAR(ev.rmse, 0.35355, 1e-5);
    EXPECT_NEAR(ev.mean_abs_delta, 0.4, 1e-15);
    EXPECT_THROW(evaluate({a}, {}), ContractViolation);
    EXPECT_EQ(evaluate({a, a}, {a.initial_stance, a.initial_stance}).rmse, 0.0);
}

TEST(Folds, RoundRobinCohesionAndDeterminism) {
    std::vector<ReplayCase> cases;
    for (int g = 0; g < 10; ++g)
        for (int k = 0; k < 3; ++k) {
            auto c = make_case(3, 3);
            c.group = "g" + std::to_string(g);
            cases.push_back(c);
        }
    const auto f = assign_folds(cases, FoldKey::group, 5, 42);
    EXPECT_EQ(f.folds, 5);
    std::map<int, std::set<std::string>> groups_in;
    std::map<std::string, int> fold_of;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        groups_in[f.fold_of_case[i]].insert(cases[i].group);
        auto [it, fresh] = fold_of.emplace(cases[i].group, f.fold_of_case[i]);
        if (!fresh) { EXPECT_EQ(it->second, f.fold_of_case[i]); }
    }
    for (const auto& [fold, gs] : groups_in) EXPECT_EQ(gs.size(), 2u);
    EXPECT_EQ(assign_folds(cases, FoldKey::group, 5, 42).fold_of_case, f.fold_of_case);

    const auto few = assign_folds({cases[0], cases[3]}, FoldKey::group, 5, 42);
    EXPECT_EQ(few.folds, 2);
    EXPECT_EQ(few.warnings.size(), 1u);

    auto missing = cases;
    missing[0].topic.clear();
    EXPECT_THROW(assign_folds(missing, FoldKey::topic), IngestionError);
}

TEST(Subgroups, Definitions) {
    EXPECT_EQ(classify_subgroup(0.0, 5.0), Subgroup::stable);
    EXPECT_EQ(classify_subgroup(0.4, 2.3, 0.1), Subgroup::aligned);
    EXPECT_EQ(classify_subgroup(-0.4, 2.3, 0.1), Subgroup::opposed);
    EXPECT_EQ(classify_subgroup(-0.4, 0.04), Subgroup::weak_signal);
    EXPECT_EQ(classify_subgroup(-0.4, 0.05), Subgroup::opposed);
}

TEST(Calibrate, SingleCellAndTieBreak) {
    std::vector<ReplayCase> cases;
    for (int i = 0; i < 10; ++i) {
        // initial stance 0 with no evidence: every cell predicts 0 exactly
        auto c = make_case(3, 4);
        c.initial_likert.reset();
        c.initial_stance = 0.0;
        c.final_stance = 0.0;
        c.group = "g" + std::to_string(i);
        cases.push_back(c);
    }
    std::vector<PreparedCase> prepared;
    for (const auto& c : cases) prepared.push_back(prepare_case(c, {}));
    const auto folds = assign_folds(cases, FoldKey::group);

    const auto res = calibrate(prepared, folds, CalibrationGrid::replay_default());
    ASSERT_EQ(res.folds.size(), 5u);
    for (const auto& f : res.folds) {
        EXPECT_EQ(f.u, 0.005);
        EXPECT_EQ(f.a, 0.02);
    }
    const auto one = calibrate(prepared, folds, CalibrationGrid{{0.3}, {0.7}});
    for (const auto& f : one.folds) {
        EXPECT_EQ(f.u, 0.3);
        EXPECT_EQ(f.a, 0.7);
    }
    EXPECT_THROW(calibrate(prepared, folds, CalibrationGrid{{0.3, 0.2}, {0.7}}), ConfigError);
    EXPECT_THROW(calibrate(prepared, folds, CalibrationGrid{{}, {0.7}}), ConfigError);
}

TEST(Calibrate, RecoversTheGeneratingProfile) {
    SyntheticConfig cfg;
    cfg.cases = 200;
    const auto cases = cases_of(generate_population(cfg));
    std::vector<PreparedCase> prepared;
    for (const auto& c : cases) prepared.push_back(prepare_case(c, {}));
    const auto res = calibrate(prepared, assign_folds(cases, FoldKey::group), CalibrationGrid::replay_default());
    ASSERT_EQ(res.folds.size(), 5u);
    for (const auto& f : res.folds) {
        EXPECT_EQ(f.u, 0.15);
        EXPECT_EQ(f.a, 0.5);
        EXPECT_EQ(f.heldout_rmse, 0.0);
    }
    EXPECT_LE(res.be_rmse, res.linear_rmse);
}

TEST(Calibrate, StablePopulationPicksMinimumUptake) {
    SyntheticConfig cfg;
    cfg.cases = 200;
    cfg.profile_share = 0;
    cfg.stable_share = 1;
    auto cases = cases_of(generate_population(cfg));
    // interior starting points keep the a = 1 row free of clipping error
    for (auto& c : cases)
        if (std::abs(c.initial_stance) == 1.0) c.initial_stance = c.final_stance = 0.6 * c.initial_stance;
    std::vector<PreparedCase> prepared;
    for (const auto& c : cases) prepared.push_back(prepare_case(c, {}));
    const auto grid = CalibrationGrid::replay_default();
    const auto res = calibrate(prepared, assign_folds(cases, FoldKey::group), grid);
    for (const auto& f : res.folds) {
        EXPECT_EQ(f.u, grid.u.front());
        EXPECT_EQ(f.a, 1.0);
    }
    // along the a = 1 row the surface can only rise with u
    double prev = -1;
    for (const auto& cell : res.surface)
        if (cell.a == 1.0) {
            EXPECT_GE(cell.rmse, prev);
            prev = cell.rmse;
        }
}

TEST(ReplayRun, SubgroupRowsAndLabels) {
    SyntheticConfig cfg;
    cfg.cases = 120;
    cfg.profile = {0.6, 1.0, 0.0};
    cfg.profile_share = 0.4;
    cfg.stable_share = 0.3;
    cfg.anti_share = 0.3;
    cfg.noise_sd = 0.02;
    cfg.seed = 9;
    const auto pop = generate_population(cfg);
    const auto rep = run_replay(cases_of(pop), ReplayOptions{});
    ASSERT_GE(rep.rows.size(), 3u);
    EXPECT_EQ(rep.rows.front().group, "all");
    EXPECT_EQ(rep.rows.front().n, pop.size());
    std::size_t total = 0;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) total += rep.rows[i].n;
    EXPECT_EQ(total, pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop[i].kind == MoverKind::stable) { EXPECT_EQ(rep.labels[i], Subgroup::stable); }
    EXPECT_THROW(run_replay({}, ReplayOptions{}), IngestionError);
}

TEST(Ingestion, ReportsMalformedLinesByNumber) {
    std::istringstream in(
        R"({"participant":"a","group":"g1","topic":"t","initial_likert":2,"final_likert":3,"evidence":[{"order":1,"claim":"x y z","polarity":1,"strength":0.5},{"order":2,"claim":"mine","polarity":-1,"source":"self"}]})"
        "\n\n"
        R"({"participant":"b","group":"g1","topic":"t","initial_likert":9,"final_likert":3})"
        "\n"
        "not json\n"
        R"({"participant":"c","group":"g2","topic":"t","initial_stance":0.1,"final_stance":0.3,"evidence":[{"order":2,"claim":"p","polarity":1},{"order":2,"claim":"q","polarity":1}]})"
        "\n"
        R"({"participant":"d","group":"g2","topic":"t","initial_stance":0.1,"final_stance":0.3,"evidence":[{"order":1,"text":"CLAIM +0.7: costs fall"}]})"
        "\n");
    const auto res = read_cases_jsonl(in);
    ASSERT_EQ(res.cases.size(), 2u);
    ASSERT_EQ(res.errors.size(), 3u);
    EXPECT_EQ(res.errors[0].rfind("line 3:", 0), 0u);
    EXPECT_EQ(res.errors[1].rfind("line 4:", 0), 0u);
    EXPECT_EQ(res.errors[2].rfind("line 5:", 0), 0u);
    EXPECT_EQ(res.cases[0].evidence.size(), 1u);  // self-authored item dropped
    EXPECT_EQ(res.warnings.size(), 1u);

    // raw text items go through the extractor; the hint becomes the strength
    EXPECT_NEAR(net_evidence(res.cases[1]), 0.7, 1e-12);

    const auto back = case_from_json(case_to_json(res.cases[0]));
    EXPECT_EQ(case_to_json(back), case_to_json(res.cases[0]));
}

TEST(Ingestion, ValidityFilterHook) {
    std::istringstream in(R"({"participant":"a","group":"g","topic":"t","initial_likert":2,"final_likert":3})"
                          "\n"
                          R"({"participant":"b","group":"g","topic":"t","initial_likert":2,"final_likert":2})"
                          "\n");
    const auto res = read_cases_jsonl(in, [](const ReplayCase& c) { return c.participant != "b"; });
    EXPECT_EQ(res.cases.size(), 1u);
    EXPECT_EQ(res.warnings.size(), 1u);
}
