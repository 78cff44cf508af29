#pragma once

// Generated-agent experiments: seeding, single-agent sweeps against a scripted
// opponent, two-agent profile debates and the debate metric suite.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "belief/core.hpp"
#include "belief/engine.hpp"
#include "belief/extraction.hpp"
#include "belief/random.hpp"
#include "belief/trace.hpp"

namespace belief {

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

// A seed corpus or opponent script: scripted-grammar lines in file order.
struct ScriptCorpus {
    std::vector<CandidateArgument> claims;
    std::vector<std::string> warnings;

    std::vector<CandidateArgument> with_polarity(Polarity p) const {
        std::vector<CandidateArgument> out;
        for (const auto& c : claims)
            if (c.polarity == p) out.push_back(c);
        return out;
    }
};

inline ScriptCorpus parse_corpus(const std::string& text, AuthorRole role) {
    const Extraction ex = parse_scripted_message(Message{text, role, 0});
    return {ex.candidates, ex.warnings};
}

inline ScriptCorpus load_corpus(const std::filesystem::path& file, AuthorRole role) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read corpus " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str(), role);
}

// Opponent script: messages separated by blank lines; '#' lines are comments.
inline std::vector<std::string> parse_script_messages(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    std::istringstream in(text);
    std::string line;
    auto flush = [&] {
        if (!trim(current).empty()) out.push_back(trim(current));
        current.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.starts_with("#")) continue;
        if (trim(line).empty()) {
            flush();
            continue;
        }
        current += line + "\n";
    }
    flush();
    return out;
}

inline std::vector<std::string> load_script_messages(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read opponent script " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto msgs = parse_script_messages(ss.str());
    if (msgs.empty()) throw ConfigError("opponent script " + file.string() + " has no messages");
    return msgs;
}

// Registers every corpus hint with the table scorer so that a claim keeps its
// corpus strength no matter who later repeats it.
inline void register_strengths(TableScorer& table, const std::string& topic, const ScriptCorpus& corpus) {
    for (const auto& c : corpus.claims)
        if (c.strength_hint) table.offer_hint(topic, c.claim, *c.strength_hint);
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

// Draws n claims without replacement, in random order.
inline std::vector<CandidateArgument> select_seeds(const std::vector<CandidateArgument>& pool, int n, Rng& rng) {
    if (n < 0) throw ConfigError("seed count must be >= 0");
    if (pool.size() < static_cast<std::size_t>(n))
        throw ConfigError("seed corpus provides " + std::to_string(pool.size()) + " claims, " +
                          std::to_string(n) + " required");
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    fisher_yates(idx, rng);
    std::vector<CandidateArgument> out;
    for (int i = 0; i < n; ++i) {
        CandidateArgument c = pool[idx[static_cast<std::size_t>(i)]];
        c.role = Role::seed;
        out.push_back(std::move(c));
    }
    return out;
}

// Log-odds from the active seed records if every seed strength were scaled by lambda.
inline double scaled_seed_log_odds(const MemoryStore& memory, double anchoring, double lambda) {
    double pro = 0.0, con = 0.0;
    for (const auto& r : memory.records()) {
        if (!r.active || r.role != Role::seed) continue;
        const double t = std::log1p(lambda * r.strength * anchoring);
        if (r.polarity.affirmative()) pro += t;
        else con += t;
    }
    return pro - con;
}

struct SeedScale {
    double lambda = 1.0;
    bool reached = true;
};

// Bisection for the global seed scale lambda in (0,1] that brings the
// seed-only stance to the target, evaluated at the given anchoring.
inline SeedScale solve_seed_scale(const MemoryStore& memory, double anchoring, double target) {
    auto stance_at = [&](double lambda) { return stance_from_log_odds(scaled_seed_log_odds(memory, anchoring, lambda)); };
    const double full = stance_at(1.0);
    if (std::abs(full - target) <= 1e-12) return {1.0, true};
    // stance(0) = 0, so the target is reachable only if it lies between 0 and the unscaled stance
    const bool same_side = (target > 0.0 && full > 0.0) || (target < 0.0 && full < 0.0);
    if (!same_side || std::abs(target) > std::abs(full)) return {1.0, false};
    double lo = 0.0, hi = 1.0;
    const bool increasing = full > 0.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double s = stance_at(mid);
        if ((s < target) == increasing) lo = mid;
        else hi = mid;
    }
    const double lambda = std::abs(stance_at(lo) - target) <= std::abs(stance_at(hi) - target) ? lo : hi;
    return {lambda > 0.0 ? lambda : hi, true};
}

struct SeedResult {
    double lambda = 1.0;
    bool reached = true;
    double stance = 0.0;
    std::size_t active_seeds = 0;
};

// Inserts the seeds through judgement, then applies the single global scale.
// `scale_anchoring` lets a sweep keep one lambda across all its grid values.
inline SeedResult seed_agent(Agent& agent, const std::vector<CandidateArgument>& seeds, double target,
                             std::optional<double> scale_anchoring = std::nullopt) {
    if (std::abs(target) > 1.0) throw ConfigError("seed target must lie in [-1,1]");
    std::vector<CandidateArgument> as_seeds = seeds;
    for (auto& c : as_seeds) c.role = Role::seed;
    agent.ingest(as_seeds, 0);

    SeedResult res;
    res.active_seeds = static_cast<std::size_t>(std::ranges::count_if(
        agent.memory().records(), [](const auto& r) { return r.active && r.role == Role::seed; }));
    if (res.active_seeds < seeds.size())
        agent.warn(std::to_string(seeds.size() - res.active_seeds) + " seed(s) archived as near-duplicates");

    const SeedScale sc =
        solve_seed_scale(agent.memory(), scale_anchoring.value_or(agent.profile().anchoring), target);
    res.lambda = sc.lambda;
    res.reached = sc.reached;
    if (!sc.reached)
        agent.warn("seed target " + std::to_string(target) + " unreachable; unscaled stance " +
                   std::to_string(agent.belief().stance()) + " kept");
    if (sc.lambda != 1.0) agent.scale_seeds(sc.lambda);
    res.stance = agent.belief().stance();
    return res;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct TrialStances {
    double pro_initial = 0.0;
    double con_initial = 0.0;
    double pro_final = 0.0;
    double con_final = 0.0;
};

struct TrialMetrics {
    double final_pro = 0.0;
    double final_con = 0.0;
    double abs_final_gap = 0.0;
    double initial_gap = 0.0;
    double gap_reduction = 0.0;
    double mean_abs_shift = 0.0;
    double centre_shift = 0.0;
    double crossing = 0.0;
};

struct MetricSummary {
    double final_pro = 0.0;
    double final_con = 0.0;
    double abs_final_gap = 0.0;
    double gap_reduction = 0.0;
    double mean_abs_shift = 0.0;
    double centre_shift = 0.0;
    double crossing_rate = 0.0;
    double convergence = 0.0;  // identical to gap_reduction
    std::size_t trials = 0;
};

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

inline TrialMetrics trial_metrics(const TrialStances& t) {
    TrialMetrics m;
    m.final_pro = t.pro_final;
    m.final_con = t.con_final;
    m.abs_final_gap = std::abs(t.pro_final - t.con_final);
    m.initial_gap = std::abs(t.pro_initial - t.con_initial);
    m.gap_reduction = m.initial_gap - m.abs_final_gap;
    m.mean_abs_shift = 0.5 * (std::abs(t.pro_final - t.pro_initial) + std::abs(t.con_final - t.con_initial));
    // positive when both agents move toward the other side
    m.centre_shift = 0.5 * ((t.pro_initial - t.pro_final) + (t.con_final - t.con_initial));
    m.crossing = (sign_of(t.pro_final) != sign_of(t.pro_initial) || sign_of(t.con_final) != sign_of(t.con_initial))
                     ? 1.0
                     : 0.0;
    return m;
}

inline MetricSummary compute_metrics(const std::vector<TrialStances>& trials) {
    MetricSummary s;
    s.trials = trials.size();
    if (trials.empty()) return s;
    for (const auto& t : trials) {
        const TrialMetrics m = trial_metrics(t);
        s.final_pro += m.final_pro;
        s.final_con += m.final_con;
        s.abs_final_gap += m.abs_final_gap;
        s.gap_reduction += m.gap_reduction;
        s.mean_abs_shift += m.mean_abs_shift;
        s.centre_shift += m.centre_shift;
        s.crossing_rate += m.crossing;
    }
    const double n = static_cast<double>(trials.size());
    for (double* v : {&s.final_pro, &s.final_con, &s.abs_final_gap, &s.gap_reduction, &s.mean_abs_shift,
                      &s.centre_shift, &s.crossing_rate})
        *v /= n;
    s.convergence = s.gap_reduction;
    return s;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Names the trace file for one run; empty path disables tracing.
using TracePathFn = std::function<std::filesystem::path(const std::string& run_name)>;

struct SweepConfig {
    std::string topic = "We should introduce compulsory voting";
    std::vector<CandidateArgument> seed_pool;   // pro claims
    std::vector<std::string> opponent_script;   // one message per round, cycled
    int rounds = 15;
    int seeds = 10;
    double target = 0.99;
    std::vector<double> u_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> a_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
    double fixed_a = 0.70;  // held during the u-sweep; also the seed-scale reference
    double fixed_u = 0.40;  // held during the a-sweep
    int trials = 1;
    std::uint64_t rng_seed = 42;
    EngineConfig engine{0.80, 0.50, 5, 6, kDefaultBinLabels};
    std::shared_ptr<ScorerPort> scorer;  // defaults to a table built from the corpora

    void validate() const {
        if (rounds < 1) throw ConfigError("rounds must be >= 1");
        if (seeds < 0) throw ConfigError("seeds per side must be >= 0");
        if (u_grid.empty() || a_grid.empty()) throw ConfigError("sweep grids must be non-empty");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (opponent_script.empty()) throw ConfigError("opponent script is empty");
        if (std::abs(target) > 1.0) throw ConfigError("target must lie in [-1,1]");
        for (double v : u_grid) UAProfile::make(v, fixed_a);
        for (double v : a_grid) UAProfile::make(fixed_u, v);
        engine.validate();
    }
};

struct SweepRun {
    std::string sweep;  // "u" or "a"
    double value = 0.0;
    int trial = 0;
    UAProfile profile;
    double seed_lambda = 1.0;
    std::vector<double> series;  // rounds + 1 points
    double final_stance() const { return series.back(); }
};

struct SweepResult {
    std::vector<SweepRun> runs;
};

inline std::string fmt_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline SweepResult run_scripted_opponent_sweep(const SweepConfig& cfg, const TracePathFn& trace_path = {}) {
    cfg.validate();
    std::shared_ptr<ScorerPort> scorer = cfg.scorer;
    if (!scorer) {
        auto table = std::make_shared<TableScorer>();
        for (const auto& c : cfg.seed_pool)
            if (c.strength_hint) table->offer_hint(cfg.topic, c.claim, *c.strength_hint);
        for (const auto& line : cfg.opponent_script)
            register_strengths(*table, cfg.topic, parse_corpus(line, AuthorRole::opponent));
        scorer = table;
    }

    SweepResult result;
    auto run_one = [&](const std::string& sweep, double value, const UAProfile& prof, int trial) {
        Rng rng(cfg.rng_seed + static_cast<std::uint64_t>(trial));
        const auto seeds = select_seeds(cfg.seed_pool, cfg.seeds, rng);

        std::unique_ptr<TraceSink> sink;
        if (trace_path) {
            const auto path = trace_path(sweep + "_" + fmt_value(value) + "_t" + std::to_string(trial));
            if (!path.empty()) sink = std::make_unique<TraceSink>(path);
        }
        Ports ports;
        ports.scorer = scorer;
        Agent agent("agent", cfg.topic, prof, cfg.engine, ports, sink.get());
        const SeedResult sr = seed_agent(agent, seeds, cfg.target, cfg.fixed_a);

        SweepRun run{sweep, value, trial, prof, sr.lambda, {agent.belief().stance()}};
        for (int r = 1; r <= cfg.rounds; ++r) {
            const std::string& text = cfg.opponent_script[static_cast<std::size_t>(r - 1) % cfg.opponent_script.size()];
            agent.process_message(Message{text, AuthorRole::opponent, 2 * r - 1});
            agent.speak(2 * r);
            run.series.push_back(agent.belief().stance());
        }
        result.runs.push_back(std::move(run));
    };

    for (int t = 0; t < cfg.trials; ++t) {
        for (double u : cfg.u_grid) run_one("u", u, UAProfile::make(u, cfg.fixed_a), t);
        for (double a : cfg.a_grid) run_one("a", a, UAProfile::make(cfg.fixed_u, a), t);
    }
    return result;
}

struct DebateConfig {
    std::string topic = "We should introduce compulsory voting";
    std::vector<CandidateArgument> pro_pool;
    std::vector<CandidateArgument> con_pool;
    int rounds = 15;
    int seeds = 10;
    UAProfile pro_profile = kOpenMinded;
    UAProfile con_profile = kOpenMinded;
    double pro_target = 0.75;
    double con_target = -0.75;
    int trials = 3;
    std::uint64_t rng_seed = 42;
    EngineConfig engine{0.60, 0.45, 5, 6, kDefaultBinLabels};
    std::shared_ptr<ScorerPort> scorer;
    std::shared_ptr<GeneratorPort> generator;  // defaults to the template generator

    void validate() const {
        if (rounds < 0) throw ConfigError("rounds must be >= 0");
        if (seeds < 0) throw ConfigError("seeds per side must be >= 0");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (std::abs(pro_target) > 1.0 || std::abs(con_target) > 1.0) throw ConfigError("targets must lie in [-1,1]");
        pro_profile.validate();
        con_profile.validate();
        engine.validate();
    }
};

struct DebateTrial {
    int trial = 0;
    std::vector<double> pro_series;
    std::vector<double> con_series;
    SeedResult pro_seed;
    SeedResult con_seed;
    std::filesystem::path trace_file;

    TrialStances stances() const {
        return {pro_series.front(), con_series.front(), pro_series.back(), con_series.back()};
    }
};

struct DebateResult {
    std::vector<DebateTrial> trials;
    MetricSummary metrics;

    std::vector<TrialStances> stances() const {
        std::vector<TrialStances> out;
        for (const auto& t : trials) out.push_back(t.stances());
        return out;
    }
};

inline std::shared_ptr<TableScorer> corpus_table(const std::string& topic,
                                                 std::initializer_list<const std::vector<CandidateArgument>*> pools) {
    auto table = std::make_shared<TableScorer>();
    for (const auto* pool : pools)
        for (const auto& c : *pool)
            if (c.strength_hint) table->offer_hint(topic, c.claim, *c.strength_hint);
    return table;
}

// Alternating turns, pro first. A turn is: speaker composes, listener
// processes, speaker processes its own message. Stances are sampled after
// seeding and after every round.
inline DebateResult run_two_agent_debate(const DebateConfig& cfg, const TracePathFn& trace_path = {},
                                         const std::string& run_name = "debate") {
    cfg.validate();
    std::shared_ptr<ScorerPort> scorer = cfg.scorer ? cfg.scorer : corpus_table(cfg.topic, {&cfg.pro_pool, &cfg.con_pool});

    DebateResult result;
    for (int t = 0; t < cfg.trials; ++t) {
        DebateTrial trial;
        trial.trial = t;
        Rng rng(cfg.rng_seed + static_cast<std::uint64_t>(t));

        std::unique_ptr<TraceSink> sink;
        if (trace_path) {
            trial.trace_file = trace_path(run_name + "_t" + std::to_string(t));
            if (!trial.trace_file.empty()) sink = std::make_unique<TraceSink>(trial.trace_file);
        }
        Ports ports;
        ports.scorer = scorer;
        if (cfg.generator) ports.generator = cfg.generator;
        Agent pro("pro", cfg.topic, cfg.pro_profile, cfg.engine, ports, sink.get());
        Agent con("con", cfg.topic, cfg.con_profile, cfg.engine, ports, sink.get());

        try {
            trial.pro_seed = seed_agent(pro, select_seeds(cfg.pro_pool, cfg.seeds, rng), cfg.pro_target);
            trial.con_seed = seed_agent(con, select_seeds(cfg.con_pool, cfg.seeds, rng), cfg.con_target);
            trial.pro_series.push_back(pro.belief().stance());
            trial.con_series.push_back(con.belief().stance());

            auto turn = [](Agent& speaker, Agent& listener, std::int64_t order) {
                Message m = speaker.compose_response(order);
                listener.process_message(Message{m.text, AuthorRole::opponent, order});
                speaker.process_message(m);
            };
            for (int r = 1; r <= cfg.rounds; ++r) {
                turn(pro, con, 2 * r - 1);
                turn(con, pro, 2 * r);
                trial.pro_series.push_back(pro.belief().stance());
                trial.con_series.push_back(con.belief().stance());
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(run_name + " trial " + std::to_string(t) + ": " + e.what());
        }
        result.trials.push_back(std::move(trial));
    }
    result.metrics = compute_metrics(result.stances());
    return result;
}

struct NamedProfile {
    std::string name;
    UAProfile profile;
};

inline const std::vector<NamedProfile> kDefaultProfiles = {{"Open", kOpenMinded}, {"Stubborn", kStubborn}};

struct PairingResult {
    std::string pairing;  // "<pro>/<con>"
    DebateResult result;
};

// Every ordered (pro, con) pairing of the given profiles.
inline std::vector<PairingResult> run_profile_grid(DebateConfig base, const std::vector<NamedProfile>& profiles,
                                                   const TracePathFn& trace_path = {}) {
    std::vector<PairingResult> out;
    for (const auto& p : profiles)
        for (const auto& c : profiles) {
            base.pro_profile = p.profile;
            base.con_profile = c.profile;
            const std::string name = p.name + "/" + c.name;
            std::string file_stem = p.name + "-" + c.name;
            out.push_back({name, run_two_agent_debate(base, trace_path, file_stem)});
        }
    return out;
}

} // namespace belief
