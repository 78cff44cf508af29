#pragma once

// Observed-evidence replay and (u, a) calibration.
//
// Each case starts from its mapped initial stance as a scaled-logit prior
// a * logit(clip(S_init)). Its received evidence passes the same judgement
// filter as the live engine; the surviving records add u-weighted log-odds.
// Calibration grid-searches (u, a) per held-out fold against two references:
// no change, and S_init + beta * E with E the signed net accepted evidence.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "belief/core.hpp"
#include "belief/embedding.hpp"
#include "belief/extraction.hpp"
#include "belief/judgement.hpp"
#include "belief/memory.hpp"
#include "belief/random.hpp"
#include "belief/scoring.hpp"

namespace belief {

inline double likert_to_stance(int v) {
    if (v < 1 || v > 6) throw IngestionError("Likert value " + std::to_string(v) + " outside 1..6");
    return (2.0 * v - 7.0) / 5.0;
}

struct EvidenceItem {
    std::int64_t order = 0;
    std::string claim;                 // pre-extracted claim, or empty when `text` is set
    std::optional<Polarity> polarity;
    std::optional<double> strength;    // scorer is consulted when absent
    std::string text;                  // raw message routed through the extractor
};

struct ReplayCase {
    std::string participant;
    std::string group;
    std::string topic;
    double initial_stance = 0.0;
    double final_stance = 0.0;
    std::optional<int> initial_likert;
    std::optional<int> final_likert;
    std::vector<EvidenceItem> evidence;

    double delta() const noexcept { return final_stance - initial_stance; }
};

enum class FoldKey { group, topic };

inline const std::string& key_of(const ReplayCase& c, FoldKey k) { return k == FoldKey::group ? c.group : c.topic; }

struct CalibrationGrid {
    std::vector<double> u;
    std::vector<double> a;

    static CalibrationGrid replay_default() {
        return {{0.005, 0.01, 0.02, 0.035, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8},
                {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.2, 1.5}};
    }

    void validate() const {
        auto check = [](const std::vector<double>& v, const char* name) {
            if (v.empty()) throw ConfigError(std::string(name) + " grid is empty");
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
                    throw ConfigError(std::string(name) + " grid values must be finite and >= 0");
                if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(std::string(name) + " grid must be strictly increasing");
            }
        };
        check(u, "u");
        check(a, "a");
    }
};

// ---------------------------------------------------------------------------
// Judgement filter
// ---------------------------------------------------------------------------

struct AcceptedEvidence {
    Polarity polarity;
    double strength = 0.0;
};

// A case after judgement: the records still active once the whole stream has
// been replayed, in insertion order.
struct PreparedCase {
    const ReplayCase* source = nullptr;
    double initial_log_odds = 0.0;  // logit(clip(S_init)), before anchoring
    std::vector<AcceptedEvidence> accepted;
    double net_evidence = 0.0;
    std::size_t archived = 0;
    std::vector<std::string> warnings;
};

struct ReplaySettings {
    double theta = 0.85;
    double clip = kDefaultStanceClip;
    std::shared_ptr<ScorerPort> scorer = std::make_shared<TableScorer>();
    std::shared_ptr<ExtractorPort> extractor = std::make_shared<ScriptedExtractor>();
    std::shared_ptr<Embedder> embedder = std::make_shared<TrigramEmbedder>();
};

inline PreparedCase prepare_case(const ReplayCase& c, const ReplaySettings& s) {
    PreparedCase out;
    out.source = &c;
    out.initial_log_odds = log_odds_from_stance(clip_stance(c.initial_stance, s.clip));

    MemoryStore memory;
    auto admit = [&](const CandidateArgument& cand, std::int64_t order, std::optional<double> strength) {
        ArgumentRecord rec;
        rec.claim = cand.claim;
        rec.polarity = cand.polarity;
        rec.role = Role::opponent;
        rec.strength = strength ? std::clamp(*strength, 0.0, 1.0) : score_strength(cand, c.topic, *s.scorer);
        rec.embedding = s.embedder->embed(cand.claim);
        rec.inserted_at = order;
        const auto res = resolve_conflict(rec, memory, s.theta);
        for (const auto& w : res.warnings) out.warnings.push_back(w);
        memory.insert(std::move(rec));
    };

    for (const auto& item : c.evidence) {
        try {
            if (!item.text.empty()) {
                const Extraction ex = s.extractor->extract(c.topic, Message{item.text, AuthorRole::opponent, item.order});
                for (const auto& w : ex.warnings) out.warnings.push_back(w);
                for (const auto& cand : ex.candidates) {
                    CandidateArgument received = cand;
                    received.role = Role::opponent;
                    admit(received, item.order, std::nullopt);
                }
            } else {
                admit(CandidateArgument(item.claim, *item.polarity, Role::opponent), item.order, item.strength);
            }
        } catch (const BackendError& e) {
            throw IngestionError("case " + c.participant + ": " + e.what());
        }
    }

    for (const auto& r : memory.records()) {
        if (r.active) {
            out.accepted.push_back({r.polarity, r.strength});
            out.net_evidence += r.polarity.value() * r.strength;
        } else {
            ++out.archived;
        }
    }
    return out;
}

// Sum of u-weighted log-odds terms over the accepted records, in order.
inline double evidence_log_odds(const PreparedCase& p, double uptake) {
    double total = 0.0;
    for (const auto& e : p.accepted) total += e.polarity.value() * std::log1p(e.strength * uptake);
    return total;
}

inline double predict_stance(const PreparedCase& p, const UAProfile& profile) {
    const double prior = profile.anchoring * p.initial_log_odds;
    return stance_from_log_odds(prior + evidence_log_odds(p, profile.uptake));
}

inline double replay_case(const ReplayCase& c, const UAProfile& profile, const ReplaySettings& s = {}) {
    profile.validate();
    return predict_stance(prepare_case(c, s), profile);
}

inline double net_evidence(const ReplayCase& c, const ReplaySettings& s = {}) { return prepare_case(c, s).net_evidence; }

// ---------------------------------------------------------------------------
// Baselines and evaluation
// ---------------------------------------------------------------------------

struct LinearFit {
    double beta = 0.0;
    bool degenerate = false;  // every E was zero
};

struct EvidenceMove {
    double net_evidence = 0.0;
    double delta = 0.0;
};

// Least squares for dS = beta * E with no intercept.
inline LinearFit fit_linear_baseline(const std::vector<EvidenceMove>& training) {
    double num = 0.0, den = 0.0;
    for (const auto& t : training) {
        num += t.net_evidence * t.delta;
        den += t.net_evidence * t.net_evidence;
    }
    if (den == 0.0) return {0.0, true};
    return {num / den, false};
}

inline double linear_prediction(double initial_stance, double net_evidence, double beta) {
    return std::clamp(initial_stance + beta * net_evidence, -1.0, 1.0);
}

struct Evaluation {
    double rmse = 0.0;
    double mean_abs_delta = 0.0;
    std::size_t n = 0;
};

inline double rmse(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size()) throw ContractViolation("rmse: length mismatch");
    if (predicted.empty()) return 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - observed[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(predicted.size()));
}

inline Evaluation evaluate(const std::vector<ReplayCase>& cases, const std::vector<double>& predictions) {
    if (cases.size() != predictions.size()) throw ContractViolation("evaluate: cases and predictions differ in length");
    Evaluation ev;
    ev.n = cases.size();
    if (cases.empty()) return ev;
    std::vector<double> observed;
    double moved = 0.0;
    for (const auto& c : cases) {
        observed.push_back(c.final_stance);
        moved += std::abs(c.delta());
    }
    ev.rmse = rmse(predictions, observed);
    ev.mean_abs_delta = moved / static_cast<double>(cases.size());
    return ev;
}

// ---------------------------------------------------------------------------
// Folds and subgroups
// ---------------------------------------------------------------------------

struct FoldAssignment {
    std::vector<int> fold_of_case;
    int folds = 0;
    std::vector<std::string> warnings;
};

// Sorted distinct keys, seeded Fisher-Yates shuffle, dealt round-robin.
inline FoldAssignment assign_folds(const std::vector<ReplayCase>& cases, FoldKey key, int folds = 5,
                                   std::uint64_t seed = 42) {
    if (folds < 1) throw ConfigError("folds must be >= 1");
    std::set<std::string> distinct;
    for (const auto& c : cases) {
        if (key_of(c, key).empty()) throw IngestionError("case " + c.participant + " lacks the fold key");
        distinct.insert(key_of(c, key));
    }
    FoldAssignment out;
    std::vector<std::string> keys(distinct.begin(), distinct.end());
    out.folds = folds;
    if (!keys.empty() && keys.size() < static_cast<std::size_t>(folds)) {
        out.folds = static_cast<int>(keys.size());
        out.warnings.push_back("only " + std::to_string(keys.size()) + " distinct keys; using that many folds");
    }
    Rng rng(seed);
    fisher_yates(keys, rng);
    std::map<std::string, int> fold_of_key;
    for (std::size_t i = 0; i < keys.size(); ++i) fold_of_key[keys[i]] = static_cast<int>(i % static_cast<std::size_t>(out.folds));
    for (const auto& c : cases) out.fold_of_case.push_back(fold_of_key.at(key_of(c, key)));
    return out;
}

enum class Subgroup { aligned, opposed, weak_signal, stable };

inline std::string_view to_string(Subgroup g) {
    switch (g) {
        case Subgroup::aligned: return "aligned";
        case Subgroup::opposed: return "opposed";
        case Subgroup::weak_signal: return "weak_signal";
        case Subgroup::stable: return "stable";
    }
    return "?";
}

inline constexpr double kDefaultWeakSignal = 0.05;

inline Subgroup classify_subgroup(double delta, double net_evidence, double eps_weak = kDefaultWeakSignal) {
    if (delta == 0.0) return Subgroup::stable;
    if (std::abs(net_evidence) < eps_weak) return Subgroup::weak_signal;
    return ((delta > 0.0) == (net_evidence > 0.0)) ? Subgroup::aligned : Subgroup::opposed;
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

struct FoldReport {
    int fold = 0;
    double u = 0.0;
    double a = 0.0;
    double train_rmse = 0.0;
    double heldout_rmse = 0.0;
    double beta = 0.0;
    double linear_heldout_rmse = 0.0;
    double nochange_heldout_rmse = 0.0;
    std::size_t n_train = 0;
    std::size_t n_heldout = 0;
};

struct SurfaceCell {
    double u = 0.0;
    double a = 0.0;
    double rmse = 0.0;
    double excess = 0.0;  // over the surface minimum
};

struct CalibrationResult {
    std::vector<FoldReport> folds;
    std::vector<SurfaceCell> surface;
    std::vector<std::size_t> case_index;       // positions in the input span
    std::vector<double> be_prediction;          // held-out, per case
    std::vector<double> linear_prediction;      // held-out, per case
    double be_rmse = 0.0;
    double linear_rmse = 0.0;
    double nochange_rmse = 0.0;
    double mean_abs_delta = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

// Per-case evidence terms for every u on the grid, so a cell costs one tanh.
struct CaseTable {
    double l0 = 0.0;
    double s_init = 0.0;
    double s_final = 0.0;
    double e = 0.0;
    std::vector<double> evidence_by_u;
};

inline double cell_prediction(const CaseTable& t, std::size_t ui, double a) {
    return stance_from_log_odds(a * t.l0 + t.evidence_by_u[ui]);
}

inline double cell_rmse(const std::vector<CaseTable>& tabs, const std::vector<std::size_t>& rows, std::size_t ui, double a) {
    if (rows.empty()) return 0.0;
    double ss = 0.0;
    for (std::size_t r : rows) {
        const double d = cell_prediction(tabs[r], ui, a) - tabs[r].s_final;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(rows.size()));
}

} // namespace detail

// Calibrates on `members` (indices into `cases`) using the given fold ids.
// Per fold: pick the cell minimising training RMSE (ties: smaller u, then
// smaller a), then score it on the held-out cases.
inline CalibrationResult calibrate(const std::vector<PreparedCase>& cases, const std::vector<std::size_t>& members,
                                   const std::vector<int>& fold_of_case, int folds, const CalibrationGrid& grid) {
    grid.validate();
    if (fold_of_case.size() != cases.size()) throw ContractViolation("calibrate: fold ids do not match cases");

    std::vector<detail::CaseTable> tabs;
    for (std::size_t m : members) {
        const PreparedCase& p = cases.at(m);
        detail::CaseTable t{p.initial_log_odds, p.source->initial_stance, p.source->final_stance, p.net_evidence, {}};
        for (double u : grid.u) t.evidence_by_u.push_back(evidence_log_odds(p, u));
        tabs.push_back(std::move(t));
    }

    CalibrationResult res;
    res.case_index = members;
    res.be_prediction.assign(members.size(), 0.0);
    res.linear_prediction.assign(members.size(), 0.0);

    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> train, held;
        for (std::size_t i = 0; i < members.size(); ++i)
            (fold_of_case[members[i]] == f ? held : train).push_back(i);
        if (held.empty()) continue;
        if (train.empty()) {
            res.warnings.push_back("fold " + std::to_string(f) + " has no training cases; skipped");
            continue;
        }
        FoldReport rep;
        rep.fold = f;
        rep.n_train = train.size();
        rep.n_heldout = held.size();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_u = 0, best_a = 0;
        for (std::size_t ui = 0; ui < grid.u.size(); ++ui)
            for (std::size_t ai = 0; ai < grid.a.size(); ++ai) {
                const double r = detail::cell_rmse(tabs, train, ui, grid.a[ai]);
                if (r < best) {
                    best = r;
                    best_u = ui;
                    best_a = ai;
                }
            }
        rep.u = grid.u[best_u];
        rep.a = grid.a[best_a];
        rep.train_rmse = best;
        rep.heldout_rmse = detail::cell_rmse(tabs, held, best_u, rep.a);

        std::vector<EvidenceMove> moves;
        for (std::size_t i : train) moves.push_back({tabs[i].e, tabs[i].s_final - tabs[i].s_init});
        const LinearFit fit = fit_linear_baseline(moves);
        if (fit.degenerate) res.warnings.push_back("fold " + std::to_string(f) + ": all net evidence zero; beta = 0");
        rep.beta = fit.beta;

        std::vector<double> lin, nc, obs;
        for (std::size_t i : held) {
            res.be_prediction[i] = detail::cell_prediction(tabs[i], best_u, rep.a);
            res.linear_prediction[i] = linear_prediction(tabs[i].s_init, tabs[i].e, fit.beta);
            lin.push_back(res.linear_prediction[i]);
            nc.push_back(tabs[i].s_init);
            obs.push_back(tabs[i].s_final);
        }
        rep.linear_heldout_rmse = rmse(lin, obs);
        rep.nochange_heldout_rmse = rmse(nc, obs);
        res.folds.push_back(rep);
    }

    // Pooled held-out errors over the cases that received a prediction.
    std::vector<double> be, lin, nc, obs;
    double moved = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const int f = fold_of_case[members[i]];
        const bool predicted = std::ranges::any_of(res.folds, [f](const FoldReport& r) { return r.fold == f; });
        if (!predicted) continue;
        be.push_back(res.be_prediction[i]);
        lin.push_back(res.linear_prediction[i]);
        nc.push_back(tabs[i].s_init);
        obs.push_back(tabs[i].s_final);
        moved += std::abs(tabs[i].s_final - tabs[i].s_init);
    }
    res.be_rmse = rmse(be, obs);
    res.linear_rmse = rmse(lin, obs);
    res.nochange_rmse = rmse(nc, obs);
    res.mean_abs_delta = obs.empty() ? 0.0 : moved / static_cast<double>(obs.size());

    std::vector<std::size_t> all(members.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    double min_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t ui = 0; ui < grid.u.size(); ++ui)
        for (double a : grid.a) {
            const double r = detail::cell_rmse(tabs, all, ui, a);
            res.surface.push_back({grid.u[ui], a, r, 0.0});
            min_rmse = std::min(min_rmse, r);
        }
    for (auto& c : res.surface) c.excess = c.rmse - min_rmse;
    return res;
}

inline CalibrationResult calibrate(const std::vector<PreparedCase>& cases, const FoldAssignment& folds,
                                   const CalibrationGrid& grid) {
    std::vector<std::size_t> all(cases.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return calibrate(cases, all, folds.fold_of_case, folds.folds, grid);
}

// ---------------------------------------------------------------------------
// Subgroup summary
// ---------------------------------------------------------------------------

struct SummaryRow {
    std::string group;
    std::size_t n = 0;
    double mean_abs_delta = 0.0;
    double nochange_rmse = 0.0;
    double linear_rmse = 0.0;
    double be_rmse = 0.0;
    double gain = 0.0;  // linear minus BE
    CalibrationResult calibration;
};

struct ReplayReport {
    std::vector<PreparedCase> prepared;
    std::vector<Subgroup> labels;
    FoldAssignment folds;
    std::vector<SummaryRow> rows;  // "all" first, then each non-empty subgroup
};

struct ReplayOptions {
    ReplaySettings settings;
    CalibrationGrid grid = CalibrationGrid::replay_default();
    FoldKey key = FoldKey::group;
    int folds = 5;
    std::uint64_t seed = 42;
    double eps_weak = kDefaultWeakSignal;
};

inline SummaryRow summarise(const std::string& name, CalibrationResult cal) {
    SummaryRow row;
    row.group = name;
    row.n = cal.be_prediction.size();
    row.mean_abs_delta = cal.mean_abs_delta;
    row.nochange_rmse = cal.nochange_rmse;
    row.linear_rmse = cal.linear_rmse;
    row.be_rmse = cal.be_rmse;
    row.gain = cal.linear_rmse - cal.be_rmse;
    row.calibration = std::move(cal);
    return row;
}

// Pooled calibration plus one diagnostic calibration per subgroup. Subgroups
// reuse the pooled fold assignment.
inline ReplayReport run_replay(const std::vector<ReplayCase>& cases, const ReplayOptions& opt) {
    if (cases.empty()) throw IngestionError("no replay cases");
    ReplayReport rep;
    for (const auto& c : cases) rep.prepared.push_back(prepare_case(c, opt.settings));
    for (const auto& p : rep.prepared)
        rep.labels.push_back(classify_subgroup(p.source->delta(), p.net_evidence, opt.eps_weak));
    rep.folds = assign_folds(cases, opt.key, opt.folds, opt.seed);

    std::vector<std::size_t> all(cases.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rep.rows.push_back(summarise("all", calibrate(rep.prepared, all, rep.folds.fold_of_case, rep.folds.folds, opt.grid)));
    for (Subgroup g : {Subgroup::aligned, Subgroup::opposed, Subgroup::stable, Subgroup::weak_signal}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < cases.size(); ++i)
            if (rep.labels[i] == g) members.push_back(i);
        if (members.empty()) continue;
        rep.rows.push_back(summarise(std::string(to_string(g)),
                                     calibrate(rep.prepared, members, rep.folds.fold_of_case, rep.folds.folds, opt.grid)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

inline ReplayCase case_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr) {
    ReplayCase c;
    auto str = [&](const char* k) {
        if (!j.contains(k) || !j[k].is_string()) throw IngestionError(std::string("missing string field '") + k + "'");
        return j[k].get<std::string>();
    };
    auto stance = [&](const char* likert, const char* real, std::optional<int>& likert_out) {
        if (j.contains(likert)) {
            if (!j[likert].is_number_integer()) throw IngestionError(std::string(likert) + " must be an integer");
            likert_out = j[likert].get<int>();
            return likert_to_stance(*likert_out);
        }
        if (j.contains(real)) {
            if (!j[real].is_number()) throw IngestionError(std::string(real) + " must be a number");
            const double s = j[real].get<double>();
            if (!(s >= -1.0 && s <= 1.0)) throw IngestionError(std::string(real) + " outside [-1,1]");
            return s;
        }
        throw IngestionError(std::string("missing ") + likert + " or " + real);
    };
    c.participant = str("participant");
    c.group = str("group");
    c.topic = str("topic");
    c.initial_stance = stance("initial_likert", "initial_stance", c.initial_likert);
    c.final_stance = stance("final_likert", "final_stance", c.final_likert);

    if (j.contains("evidence")) {
        if (!j["evidence"].is_array()) throw IngestionError("evidence must be an array");
        std::optional<std::int64_t> last;
        for (const auto& it : j["evidence"]) {
            if (!it.is_object() || !it.contains("order") || !it["order"].is_number_integer())
                throw IngestionError("evidence item lacks integer 'order'");
            EvidenceItem e;
            e.order = it["order"].get<std::int64_t>();
            if (last && e.order <= *last) throw IngestionError("evidence order not strictly increasing");
            last = e.order;
            if (it.value("source", std::string("received")) == "self") {
                if (warnings) warnings->push_back("case " + c.participant + ": self-authored item dropped");
                continue;
            }
            if (it.contains("text")) {
                if (!it["text"].is_string()) throw IngestionError("evidence 'text' must be a string");
                e.text = it["text"].get<std::string>();
            } else {
                if (!it.contains("claim") || !it["claim"].is_string() || trim(it["claim"].get<std::string>()).empty())
                    throw IngestionError("evidence item needs a non-empty 'claim' or 'text'");
                e.claim = it["claim"].get<std::string>();
                if (!it.contains("polarity") || !it["polarity"].is_number_integer())
                    throw IngestionError("evidence item lacks integer 'polarity'");
                e.polarity = Polarity::from_int(it["polarity"].get<int>());
                if (it.contains("strength")) {
                    if (!it["strength"].is_number()) throw IngestionError("strength must be a number");
                    const double s = it["strength"].get<double>();
                    if (!(s >= 0.0 && s <= 1.0)) throw IngestionError("strength outside [0,1]");
                    e.strength = s;
                }
            }
            c.evidence.push_back(std::move(e));
        }
    }
    return c;
}

inline nlohmann::json case_to_json(const ReplayCase& c) {
    nlohmann::json j = {{"participant", c.participant}, {"group", c.group}, {"topic", c.topic}};
    if (c.initial_likert) j["initial_likert"] = *c.initial_likert;
    else j["initial_stance"] = c.initial_stance;
    if (c.final_likert) j["final_likert"] = *c.final_likert;
    else j["final_stance"] = c.final_stance;
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : c.evidence) {
        nlohmann::json it = {{"order", e.order}};
        if (!e.text.empty()) {
            it["text"] = e.text;
        } else {
            it["claim"] = e.claim;
            it["polarity"] = e.polarity->value();
            if (e.strength) it["strength"] = *e.strength;
        }
        ev.push_back(std::move(it));
    }
    j["evidence"] = std::move(ev);
    return j;
}

struct IngestResult {
    std::vector<ReplayCase> cases;
    std::vector<std::string> errors;    // "line N: why"
    std::vector<std::string> warnings;
};

using CaseFilter = std::function<bool(const ReplayCase&)>;

inline IngestResult read_cases_jsonl(std::istream& in, const CaseFilter& keep = {}) {
    IngestResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            ReplayCase c = case_from_json(nlohmann::json::parse(line), &out.warnings);
            if (keep && !keep(c)) {
                out.warnings.push_back("line " + std::to_string(line_no) + ": rejected by validity filter");
                continue;
            }
            out.cases.push_back(std::move(c));
        } catch (const std::exception& e) {
            out.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace belief
