#pragma once

// Command implementations behind the `belief` executable. Each command takes
// parsed options, writes its outputs under the output directory and returns
// an exit code: 0 success, 1 validation, 2 runtime, 3 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "belief/config.hpp"
#include "belief/csv.hpp"
#include "belief/replay.hpp"
#include "belief/simulation.hpp"
#include "belief/verify.hpp"

namespace belief {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitVerification = 3 };

struct CommandOptions {
    fs::path config;
    std::optional<fs::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<FoldKey> key;
    bool strict = false;
    fs::path trace;  // trace-verify input
};

namespace detail {

struct Prepared {
    RunConfig cfg;
    fs::path out;
};

inline Prepared prepare(const CommandOptions& opt) {
    Prepared p;
    p.cfg = load_config(opt.config);
    apply_environment(p.cfg);
    validate_ports(p.cfg.ports);
    if (opt.seed) p.cfg.seed = *opt.seed;
    if (opt.out) p.out = *opt.out;
    else if (p.cfg.out) p.out = *p.cfg.out;
    else throw ConfigError("no output directory: pass --out or set [run] out");
    return p;
}

inline void write_snapshot(const fs::path& out, const nlohmann::json& j) {
    std::ofstream f(out / "config.resolved.json");
    if (!f) throw std::runtime_error("cannot write " + (out / "config.resolved.json").string());
    f << j.dump(2) << '\n';
}

inline std::shared_ptr<ScorerPort> make_scorer(const PortsConfig& p, const std::string& topic,
                                               const std::vector<const ScriptCorpus*>& corpora) {
    if (is_service_url(p.scorer)) return std::make_shared<ServiceScorer>(p.endpoint(p.scorer));
    if (p.scorer == "builtin") return std::make_shared<BuiltinScorer>();
    auto table = std::make_shared<TableScorer>();
    for (const auto* c : corpora) register_strengths(*table, topic, *c);
    return table;
}

inline std::shared_ptr<ExtractorPort> make_extractor(const PortsConfig& p) {
    if (is_service_url(p.extractor)) return std::make_shared<ServiceExtractor>(p.endpoint(p.extractor));
    return std::make_shared<ScriptedExtractor>();
}

inline std::shared_ptr<GeneratorPort> make_generator(const PortsConfig& p) {
    if (is_service_url(p.generator)) return std::make_shared<ServiceGenerator>(p.endpoint(p.generator));
    return std::make_shared<TemplateGenerator>();
}

inline ScriptCorpus require_corpus(const fs::path& file, const char* what, std::ostream& err) {
    if (file.empty()) throw ConfigError(std::string("missing ") + what);
    ScriptCorpus c = load_corpus(file, AuthorRole::seed_source);
    for (const auto& w : c.warnings) err << "warning: " << file.string() << ": " << w << '\n';
    if (c.claims.empty()) throw ConfigError(file.string() + " contains no claims");
    return c;
}

inline TracePathFn trace_dir(const fs::path& out) {
    const fs::path dir = out / "traces";
    fs::create_directories(dir);
    return [dir](const std::string& name) { return dir / (name + ".jsonl"); };
}

// Maps the exception taxonomy onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IngestionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const VerificationError& e) {
        err << "verification failed: " << e.what() << '\n';
        return kExitVerification;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------

// Experiment setup shared by the commands and the acceptance checks.
inline SweepConfig make_sweep_config(const RunConfig& cfg, std::ostream& err = std::cerr) {
    const auto& w = cfg.sweep;
    const ScriptCorpus seeds = detail::require_corpus(w.seed_corpus, "[sweep] seed_corpus", err);
    if (w.opponent_script.empty()) throw ConfigError("missing [sweep] opponent_script");

    SweepConfig sc;
    sc.topic = cfg.topic;
    sc.seed_pool = seeds.with_polarity(Polarity::pro());
    sc.opponent_script = load_script_messages(w.opponent_script);
    sc.rounds = w.rounds;
    sc.seeds = w.seeds;
    sc.target = w.target;
    sc.u_grid = w.u_grid;
    sc.a_grid = w.a_grid;
    sc.fixed_a = w.fixed_a;
    sc.fixed_u = w.fixed_u;
    sc.trials = w.trials;
    sc.rng_seed = cfg.seed;
    sc.engine = cfg.engine.apply(EngineConfig{0.80, 0.50, 5, 6, kDefaultBinLabels});
    ScriptCorpus script;
    for (const auto& m : sc.opponent_script)
        for (auto& c : parse_corpus(m, AuthorRole::opponent).claims) script.claims.push_back(c);
    sc.scorer = detail::make_scorer(cfg.ports, cfg.topic, {&seeds, &script});
    sc.validate();
    return sc;
}

inline int cmd_sweep(const CommandOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        auto [cfg, dir] = detail::prepare(opt);
        const SweepConfig sc = make_sweep_config(cfg, err);

        fs::create_directories(dir);
        detail::write_snapshot(dir, resolved_json(cfg, "sweep", sc.engine));
        const SweepResult res = run_scripted_opponent_sweep(sc, detail::trace_dir(dir));

        CsvWriter traj(dir / "sweep_trajectories.csv", {"sweep", "value", "trial", "round", "stance"});
        CsvWriter fin(dir / "sweep_final.csv",
                      {"sweep", "value", "trial", "u", "a", "seed_lambda", "initial_stance", "final_stance"});
        for (const auto& r : res.runs) {
            for (std::size_t i = 0; i < r.series.size(); ++i)
                traj.row({r.sweep, r.value, static_cast<long long>(r.trial), static_cast<long long>(i), r.series[i]});
            fin.row({r.sweep, r.value, static_cast<long long>(r.trial), r.profile.uptake, r.profile.anchoring,
                     r.seed_lambda, r.series.front(), r.final_stance()});
        }
        out << "sweep: " << res.runs.size() << " runs written to " << dir.string() << '\n';
        return int{kExitOk};
    });
}

struct DebateJob {
    TopicSpec topic;
    DebateConfig config;
};

struct DebatePlan {
    std::vector<DebateJob> jobs;  // one per topic
    std::vector<NamedProfile> profiles;
    EngineConfig engine;
};

inline DebatePlan make_debate_plan(const RunConfig& cfg, std::ostream& err = std::cerr) {
    const auto& d = cfg.debate;
    DebatePlan plan;
    std::vector<TopicSpec> topics = cfg.topics;
    if (topics.empty()) topics.push_back({"default", cfg.topic, d.pro_corpus, d.con_corpus});
    for (const auto& name : d.profiles) {
        const auto it = cfg.profiles.find(name);
        if (it == cfg.profiles.end()) throw ConfigError("[debate] profiles: unknown profile '" + name + "'");
        it->second.validate();
        plan.profiles.push_back({name, it->second});
    }
    if (plan.profiles.empty()) throw ConfigError("[debate] profiles is empty");

    plan.engine = cfg.engine.apply(EngineConfig{0.60, 0.45, 5, 6, kDefaultBinLabels});
    for (const auto& t : topics) {
        if (t.proposition.empty()) throw ConfigError("[topic." + t.name + "] needs a proposition");
        const ScriptCorpus pro = detail::require_corpus(t.pro_corpus, "pro corpus", err);
        const ScriptCorpus con = detail::require_corpus(t.con_corpus, "con corpus", err);
        DebateConfig dc;
        dc.topic = t.proposition;
        dc.pro_pool = pro.with_polarity(Polarity::pro());
        dc.con_pool = con.with_polarity(Polarity::con());
        dc.rounds = d.rounds;
        dc.seeds = d.seeds;
        dc.pro_target = d.pro_target;
        dc.con_target = d.con_target;
        dc.trials = d.trials;
        dc.rng_seed = cfg.seed;
        dc.engine = plan.engine;
        dc.scorer = detail::make_scorer(cfg.ports, t.proposition, {&pro, &con});
        dc.generator = detail::make_generator(cfg.ports);
        dc.validate();
        plan.jobs.push_back({t, std::move(dc)});
    }
    return plan;
}

inline int cmd_debate(const CommandOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        auto [cfg, dir] = detail::prepare(opt);
        const DebatePlan plan = make_debate_plan(cfg, err);
        const auto& jobs = plan.jobs;
        const auto& profiles = plan.profiles;
        const EngineConfig& engine = plan.engine;

        fs::create_directories(dir);
        detail::write_snapshot(dir, resolved_json(cfg, "debate", engine));
        const TracePathFn traces = detail::trace_dir(dir);

        CsvWriter metrics(dir / "debate_metrics.csv",
                          {"topic", "setup", "trial", "Final pro", "Final con", "|Final gap|", "Gap reduction",
                           "Mean abs. shift", "Centre shift", "Crossing rate"});
        CsvWriter summary(dir / "debate_summary.csv",
                          {"topic", "setup", "trials", "Final pro", "Final con", "|Final gap|", "Gap reduction",
                           "Mean abs. shift", "Centre shift", "Crossing rate"});
        CsvWriter series(dir / "debate_series.csv", {"topic", "setup", "trial", "round", "pro_stance", "con_stance"});
        CsvWriter conv(dir / "convergence.csv", {"topic", "setup", "convergence"});

        for (const auto& job : jobs) {
            const auto stem = [&](const std::string& run) { return traces(job.topic.name + "_" + run); };
            for (const auto& pr : run_profile_grid(job.config, profiles, stem)) {
                const std::string& topic = job.topic.name;
                for (const auto& t : pr.result.trials) {
                    const TrialMetrics m = trial_metrics(t.stances());
                    metrics.row({topic, pr.pairing, static_cast<long long>(t.trial), m.final_pro, m.final_con,
                                 m.abs_final_gap, m.gap_reduction, m.mean_abs_shift, m.centre_shift, m.crossing});
                    for (std::size_t i = 0; i < t.pro_series.size(); ++i)
                        series.row({topic, pr.pairing, static_cast<long long>(t.trial), static_cast<long long>(i),
                                    t.pro_series[i], t.con_series[i]});
                }
                const MetricSummary& s = pr.result.metrics;
                summary.row({topic, pr.pairing, static_cast<long long>(s.trials), s.final_pro, s.final_con,
                             s.abs_final_gap, s.gap_reduction, s.mean_abs_shift, s.centre_shift, s.crossing_rate});
                conv.row({topic, pr.pairing, s.convergence});
                out << topic << ' ' << pr.pairing << ": final gap " << csv_number(s.abs_final_gap)
                    << ", convergence " << csv_number(s.convergence) << '\n';
            }
        }
        return int{kExitOk};
    });
}

inline int cmd_replay(const CommandOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        auto [cfg, dir] = detail::prepare(opt);
        auto& r = cfg.replay;
        if (opt.key) r.key = *opt.key;
        if (opt.strict) r.strict = true;
        if (r.cases.empty()) throw ConfigError("missing [replay] cases");
        r.grid.validate();
        if (r.folds < 1) throw ConfigError("[replay] folds must be >= 1");
        if (!(r.clip > 0.0 && r.clip < 1.0)) throw ConfigError("[replay] clip must lie in (0,1)");
        if (!(r.theta >= 0.0 && r.theta <= 1.0)) throw ConfigError("[replay] theta must lie in [0,1]");

        std::ifstream in(r.cases);
        if (!in) throw ConfigError("cannot read replay cases " + r.cases.string());
        IngestResult ing = read_cases_jsonl(in);
        for (const auto& e : ing.errors) err << "malformed case: " << r.cases.filename().string() << ": " << e << '\n';
        for (const auto& w : ing.warnings) err << "warning: " << w << '\n';
        if (!ing.errors.empty() && r.strict)
            throw IngestionError(std::to_string(ing.errors.size()) + " malformed case line(s) under --strict");
        if (ing.cases.empty()) throw IngestionError("no valid replay cases in " + r.cases.string());

        ReplayOptions ro;
        ro.settings.theta = r.theta;
        ro.settings.clip = r.clip;
        ro.settings.scorer = detail::make_scorer(cfg.ports, cfg.topic, {});
        ro.settings.extractor = detail::make_extractor(cfg.ports);
        ro.grid = r.grid;
        ro.key = r.key;
        ro.folds = r.folds;
        ro.seed = cfg.seed;
        ro.eps_weak = r.eps_weak;

        fs::create_directories(dir);
        detail::write_snapshot(dir, resolved_json(cfg, "replay", EngineConfig{r.theta, 0.5, 5, 6, kDefaultBinLabels}));
        const ReplayReport rep = run_replay(ing.cases, ro);
        for (const auto& w : rep.folds.warnings) err << "warning: " << w << '\n';

        CsvWriter summary(dir / "replay_summary.csv", {"Group", "N", "|Δ|", "No-ch.", "Linear", "BE", "Gain"});
        CsvWriter folds(dir / "replay_folds.csv", {"subset", "fold", "u", "a", "train_rmse", "heldout_rmse", "beta",
                                                   "linear_heldout_rmse", "nochange_heldout_rmse", "n_train",
                                                   "n_heldout"});
        CsvWriter surface(dir / "replay_surface.csv", {"subset", "u", "a", "rmse", "excess_rmse"});
        for (const auto& row : rep.rows) {
            summary.row({row.group, static_cast<long long>(row.n), row.mean_abs_delta, row.nochange_rmse,
                         row.linear_rmse, row.be_rmse, row.gain});
            for (const auto& f : row.calibration.folds)
                folds.row({row.group, static_cast<long long>(f.fold), f.u, f.a, f.train_rmse, f.heldout_rmse, f.beta,
                           f.linear_heldout_rmse, f.nochange_heldout_rmse, static_cast<long long>(f.n_train),
                           static_cast<long long>(f.n_heldout)});
            for (const auto& c : row.calibration.surface) surface.row({row.group, c.u, c.a, c.rmse, c.excess});
            for (const auto& w : row.calibration.warnings) err << "warning: " << row.group << ": " << w << '\n';
            out << row.group << ": N=" << row.n << " no-change " << csv_number(row.nochange_rmse) << " linear "
                << csv_number(row.linear_rmse) << " BE " << csv_number(row.be_rmse) << '\n';
        }

        const CalibrationResult& pooled = rep.rows.front().calibration;
        CsvWriter preds(dir / "replay_predictions.csv", {"participant", "group", "topic", "fold", "subgroup",
                                                         "initial_stance", "final_stance", "net_evidence",
                                                         "no_change", "linear", "be"});
        for (std::size_t i = 0; i < ing.cases.size(); ++i) {
            const ReplayCase& c = ing.cases[i];
            preds.row({c.participant, c.group, c.topic, static_cast<long long>(rep.folds.fold_of_case[i]),
                       std::string(to_string(rep.labels[i])), c.initial_stance, c.final_stance,
                       rep.prepared[i].net_evidence, c.initial_stance, pooled.linear_prediction[i],
                       pooled.be_prediction[i]});
        }
        return int{kExitOk};
    });
}

inline int cmd_trace_verify(const CommandOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        if (opt.trace.empty()) throw ConfigError("trace-verify needs a trace file");
        if (!fs::exists(opt.trace)) throw ConfigError("no such trace file: " + opt.trace.string());
        const auto events = read_trace_file(opt.trace);
        const auto agents = verify_events(events);
        out << "ok: " << events.size() << " events verified\n";
        for (const auto& [id, a] : agents)
            out << "  " << id << ": L=" << csv_number(a.belief.log_odds()) << " S=" << csv_number(a.belief.stance())
                << " records=" << a.records << " updates=" << a.updates << '\n';
        return int{kExitOk};
    });
}

} // namespace belief
