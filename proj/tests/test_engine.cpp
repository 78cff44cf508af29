#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "belief/engine.hpp"
#include "belief/verify.hpp"
#include "oracle.hpp"

using namespace belief;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "belief_engine_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

oracle::Item item(const ArgumentRecord& r) { return {r.polarity.value(), r.strength, r.role == Role::seed}; }

double oracle_log_odds(const Agent& a) {
    std::vector<oracle::Item> items;
    for (const auto& r : a.memory().active_set()) items.push_back(item(r));
    return a.prior_offset() + oracle::log_odds_by_product(items, a.profile().uptake, a.profile().anchoring);
}

Agent make_agent(TraceSink* sink = nullptr, UAProfile prof = kOpenMinded) {
    return Agent("agent", "topic", prof, EngineConfig{}, Ports{}, sink);
}

} // namespace

TEST(StanceBins, Boundaries) {
    EXPECT_EQ(stance_bin(-1.0), 0);
    EXPECT_EQ(stance_bin(-0.8), 1);
    EXPECT_EQ(stance_bin(-0.2), 4);
    EXPECT_EQ(stance_bin(0.0), 5);
    EXPECT_EQ(stance_bin(0.19999), 5);
    EXPECT_EQ(stance_bin(0.2), 6);
    EXPECT_EQ(stance_bin(0.6), 8);
    EXPECT_EQ(stance_bin(0.99), 9);
    EXPECT_EQ(stance_bin(1.0), 9);
    for (int j = 0; j < 10; ++j) EXPECT_EQ(stance_bin(-1.0 + 0.2 * j), j) << j;
    EXPECT_EQ(stance_to_instruction(0.95).text, "argue strongly for");
    EXPECT_EQ(stance_to_instruction(-0.95).text, "argue strongly against");
}

TEST(Agent, ProcessesClaimsAndTracksOracle) {
    Agent a = make_agent();
    a.process_message({"CLAIM +0.9: compulsory voting raises turnout\nCLAIM -0.6: fines burden the poor",
                       AuthorRole::opponent, 1});
    EXPECT_EQ(a.memory().size(), 2u);
    EXPECT_NEAR(a.belief().log_odds(), oracle_log_odds(a), 1e-12);
    EXPECT_NEAR(a.belief().log_odds(), std::log(1.36) - std::log(1.24), 1e-12);
}

TEST(Agent, RejectsNonIncreasingOrder) {
    Agent a = make_agent();
    a.process_message({"x", AuthorRole::opponent, 3});
    EXPECT_THROW(a.process_message({"y", AuthorRole::opponent, 3}), ContractViolation);
    EXPECT_THROW(a.process_message({"y", AuthorRole::opponent, 2}), ContractViolation);
    EXPECT_NO_THROW(a.process_message({"y", AuthorRole::opponent, 4}));
}

TEST(Agent, EmptyExtractionLeavesBeliefUnchanged) {
    Agent a = make_agent();
    a.process_message({"CLAIM +0.9: one", AuthorRole::opponent, 1});
    const double before = a.belief().log_odds();
    const auto events = a.process_message({"no claims here", AuthorRole::opponent, 2});
    EXPECT_EQ(a.belief().log_odds(), before);
    for (const auto& e : events) EXPECT_NE(e.kind, TraceKind::updated);
}

TEST(Agent, DuplicateClaimArchivesWeaker) {
    Agent a = make_agent();
    a.process_message({"CLAIM +0.3: Voting is a civic duty", AuthorRole::opponent, 1});
    a.process_message({"CLAIM +0.3: voting is a civic duty", AuthorRole::opponent, 2});
    ASSERT_EQ(a.memory().size(), 2u);
    EXPECT_TRUE(a.memory().get(0).active);
    EXPECT_FALSE(a.memory().get(1).active);
    EXPECT_EQ(a.memory().get(1).archived_by, 0);
    EXPECT_NEAR(a.belief().log_odds(), oracle_log_odds(a), 1e-12);
}

TEST(Agent, HistoryIsBounded) {
    EngineConfig cfg;
    cfg.history_window = 3;
    Agent a("x", "t", kOpenMinded, cfg, Ports{});
    for (int i = 1; i <= 10; ++i) a.process_message({"m" + std::to_string(i), AuthorRole::opponent, i});
    ASSERT_EQ(a.history().size(), 3u);
    EXPECT_EQ(a.history().front().text, "m8");
}

TEST(Agent, SpeakFeedsBackAsSelf) {
    Agent a = make_agent();
    a.process_message({"CLAIM +0.8: alpha beta gamma\nCLAIM -0.7: delta epsilon zeta", AuthorRole::opponent, 1});
    const Message m = a.speak(2);
    EXPECT_EQ(m.author_role, AuthorRole::self);
    EXPECT_TRUE(m.text.starts_with("[lean"));
    std::size_t self = 0;
    for (const auto& r : a.memory().records())
        if (r.role == Role::self) ++self;
    EXPECT_EQ(self, 2u);  // the opponent claims re-enter as self claims once
    EXPECT_NEAR(a.belief().log_odds(), oracle_log_odds(a), 1e-12);
}

TEST(Agent, TemplateOutputIsReExtractable) {
    TemplateGenerator gen;
    RetrievalContext ctx;
    ArgumentRecord r;
    r.claim = "a claim";
    r.polarity = Polarity::con();
    r.strength = 0.25;
    ctx.records.push_back(r);
    const std::string text = gen.generate(stance_to_instruction(-0.3), ctx, {});
    EXPECT_EQ(text, "[lean against] | claims:\nCLAIM -0.250000: a claim");
    EXPECT_EQ(gen.generate(stance_to_instruction(0.0), RetrievalContext{}, {}), "[lean slightly in favour]");
    const auto ex = parse_scripted_message({text, AuthorRole::self, 0});
    ASSERT_EQ(ex.candidates.size(), 1u);
    EXPECT_EQ(ex.candidates[0].claim, "a claim");
}

TEST(Agent, SeedScaleAndPriorRecomputeFromScratch) {
    Agent a = make_agent(nullptr, UAProfile::make(0.4, 0.7));
    a.ingest({CandidateArgument("seed one text", Polarity::pro(), Role::seed, 0.9),
              CandidateArgument("other seed here", Polarity::pro(), Role::seed, 0.5)},
             0);
    a.scale_seeds(0.5);
    EXPECT_NEAR(a.belief().log_odds(), std::log1p(0.45 * 0.7) + std::log1p(0.25 * 0.7), 1e-14);
    a.set_prior_offset(0.3);
    EXPECT_NEAR(a.belief().log_odds(), 0.3 + std::log1p(0.45 * 0.7) + std::log1p(0.25 * 0.7), 1e-14);
    EXPECT_THROW(a.scale_seeds(0.0), ContractViolation);
}

TEST(Trace, VerifiesAndDetectsTampering) {
    const auto path = temp_file("agent_trace.jsonl");
    {
        TraceSink sink(path);
        Agent a = make_agent(&sink);
        a.ingest({CandidateArgument("seeded", Polarity::pro(), Role::seed, 0.8)}, 0);
        a.scale_seeds(0.75);
        for (int r = 1; r <= 4; ++r) {
            a.process_message({"CLAIM -0.7: opposed " + std::to_string(r % 2) + "\nCLAIM +0.2: weak support",
                               AuthorRole::opponent, 2 * r - 1});
            a.speak(2 * r);
        }
        sink.close();
        const auto verified = verify_events(read_trace_file(path));
        ASSERT_EQ(verified.count("agent"), 1u);
        EXPECT_NEAR(verified.at("agent").belief.log_odds(), a.belief().log_odds(), 1e-12);
        EXPECT_EQ(verified.at("agent").records, a.memory().size());
    }

    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();

    // flip one digit in an L_after value: digest catches it
    std::string tampered = text;
    const auto pos = tampered.find("\"L_after\":");
    ASSERT_NE(pos, std::string::npos);
    const auto digit = tampered.find_first_of("123456789", pos + 10);
    tampered[digit] = tampered[digit] == '9' ? '8' : static_cast<char>(tampered[digit] + 1);
    std::istringstream bad(tampered);
    EXPECT_THROW(read_trace(bad), VerificationError);

    // a consistent-looking but wrong value with a valid chain fails verification
    auto events = read_trace_file(path);
    for (auto& e : events)
        if (e.kind == TraceKind::updated) {
            e.payload["L_after"] = e.payload["L_after"].get<double>() + 1e-6;
            break;
        }
    EXPECT_THROW(verify_events(events), VerificationError);
}

TEST(Trace, DropsAndReordersAreDetected) {
    TraceSink sink;
    Agent a = make_agent(&sink);
    a.process_message({"CLAIM +0.5: x one\nCLAIM -0.4: y two", AuthorRole::opponent, 1});
    auto events = sink.events();
    EXPECT_NO_THROW(verify_events(events));
    auto dropped = events;
    for (std::size_t i = 0; i < dropped.size(); ++i)
        if (dropped[i].kind == TraceKind::stored) {
            dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    EXPECT_THROW(verify_events(dropped), VerificationError);
}
