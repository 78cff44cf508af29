#pragma once

// One Belief Engine agent: extract -> judge -> store -> update -> compose.
//
// The log-odds state is recomputed from the active set after every stored
// record, and every change is written to the trace with before/after values.

#include <array>
#include <cmath>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "belief/core.hpp"
#include "belief/embedding.hpp"
#include "belief/extraction.hpp"
#include "belief/judgement.hpp"
#include "belief/memory.hpp"
#include "belief/scoring.hpp"
#include "belief/trace.hpp"

namespace belief {

using BinLabels = std::array<std::string, 10>;

inline const BinLabels kDefaultBinLabels = {
    "argue strongly against", "argue against",        "argue moderately against", "lean against",
    "lean slightly against",  "lean slightly in favour", "lean in favour",        "argue moderately for",
    "argue for",              "argue strongly for",
};

struct StanceInstruction {
    int bin = 0;
    std::string text;
};

// Left-closed bins of width 0.2 over [-1, 1]; S = 1 falls into the top bin.
// The 1e-9 slack keeps exact boundaries like 0.2*j - 1 from rounding down.
inline int stance_bin(double stance) {
    const double s = std::clamp(stance, -1.0, 1.0);
    const int bin = static_cast<int>(std::floor((s + 1.0) * 5.0 + 1e-9));
    return std::clamp(bin, 0, 9);
}

inline StanceInstruction stance_to_instruction(double stance, const BinLabels& labels = kDefaultBinLabels) {
    const int bin = stance_bin(stance);
    return {bin, labels[static_cast<std::size_t>(bin)]};
}

class GeneratorPort {
public:
    virtual ~GeneratorPort() = default;
    virtual std::string generate(const StanceInstruction& instruction, const RetrievalContext& retrieved,
                                 const std::deque<Message>& history) = 0;
    virtual std::string name() const = 0;
};

// "[label] | claims:" followed by one scripted-grammar line per retrieved
// record, so the output can be re-extracted by the scripted parser.
class TemplateGenerator final : public GeneratorPort {
public:
    std::string generate(const StanceInstruction& instruction, const RetrievalContext& retrieved,
                         const std::deque<Message>& /*history*/) override {
        std::string out = "[" + instruction.text + "]";
        if (retrieved.records.empty()) return out;
        out += " | claims:";
        for (const auto& r : retrieved.records) out += "\n" + format_claim_line(r.claim, r.polarity, r.strength);
        return out;
    }
    std::string name() const override { return "template"; }
};

// Request {instruction, bin, claims:[{claim, polarity, strength}], history:[text]};
// response {text}.
class ServiceGenerator final : public GeneratorPort {
public:
    explicit ServiceGenerator(ServiceEndpoint ep) : client_("generator", std::move(ep)) {}

    std::string generate(const StanceInstruction& instruction, const RetrievalContext& retrieved,
                         const std::deque<Message>& history) override {
        json claims = json::array();
        for (const auto& r : retrieved.records)
            claims.push_back({{"claim", r.claim}, {"polarity", r.polarity.value()}, {"strength", r.strength}});
        json hist = json::array();
        for (const auto& m : history) hist.push_back(m.text);
        const auto res = client_.post(
            {{"instruction", instruction.text}, {"bin", instruction.bin}, {"claims", claims}, {"history", hist}});
        if (!res.is_object() || !res.contains("text") || !res["text"].is_string())
            throw BackendError("generator", "response lacks string 'text'");
        std::string text = res["text"].get<std::string>();
        if (trim(text).empty()) throw BackendError("generator", "empty generation");
        return text;
    }
    std::string name() const override { return "service"; }

private:
    JsonServiceClient client_;
};

struct EngineConfig {
    double theta = 0.80;
    double theta_self = 0.50;
    int k = 5;
    std::size_t history_window = 6;
    BinLabels bin_labels = kDefaultBinLabels;

    void validate() const {
        if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0,1]");
        if (!(theta_self >= 0.0 && theta_self <= 1.0)) throw ConfigError("theta_self must lie in [0,1]");
        if (k < 1) throw ConfigError("k must be >= 1");
        if (history_window < 1) throw ConfigError("history window must be >= 1");
    }
};

struct Ports {
    std::shared_ptr<ExtractorPort> extractor = std::make_shared<ScriptedExtractor>();
    std::shared_ptr<ScorerPort> scorer = std::make_shared<TableScorer>();
    std::shared_ptr<GeneratorPort> generator = std::make_shared<TemplateGenerator>();
    std::shared_ptr<Embedder> embedder = std::make_shared<TrigramEmbedder>();
};

// Sum in insertion order, then add the prior offset. Trace verification
// repeats exactly this arithmetic.
template <std::ranges::input_range R>
double belief_log_odds(double prior_offset, const R& active, const UAProfile& profile) {
    return prior_offset + compute_log_odds(active, profile);
}

class Agent {
public:
    Agent(std::string id, std::string topic, UAProfile profile, EngineConfig config, Ports ports,
          TraceSink* sink = nullptr)
        : id_(std::move(id)), topic_(std::move(topic)), profile_(profile), config_(std::move(config)),
          ports_(std::move(ports)), sink_(sink) {
        profile_.validate();
        config_.validate();
    }

    const std::string& id() const noexcept { return id_; }
    const std::string& topic() const noexcept { return topic_; }
    const UAProfile& profile() const noexcept { return profile_; }
    const EngineConfig& config() const noexcept { return config_; }
    const MemoryStore& memory() const noexcept { return memory_; }
    const BeliefState& belief() const noexcept { return belief_; }
    const std::deque<Message>& history() const noexcept { return history_; }
    double prior_offset() const noexcept { return prior_offset_; }
    std::int64_t last_order() const noexcept { return last_order_; }

    // Replay-prior mode: belief = prior offset + evidence term.
    void set_prior_offset(double prior) {
        prior_offset_ = prior;
        refresh("prior", {{"prior", prior}});
    }

    // Full five-step processing of one incoming message, minus composition.
    std::vector<TraceEvent> process_message(const Message& incoming) {
        if (incoming.order <= last_order_)
            throw ContractViolation("message order " + std::to_string(incoming.order) +
                                    " does not exceed last processed order " + std::to_string(last_order_));
        Collector c(*this);
        const Extraction ex = ports_.extractor->extract(topic_, incoming);
        json cands = json::array();
        for (const auto& cand : ex.candidates) {
            json jc = {{"claim", cand.claim}, {"polarity", cand.polarity.value()}, {"role", to_string(cand.role)}};
            if (cand.strength_hint) jc["hint"] = *cand.strength_hint;
            cands.push_back(std::move(jc));
        }
        emit(TraceKind::extracted,
             {{"order", incoming.order}, {"author_role", to_string(incoming.author_role)}, {"candidates", cands}});
        for (const auto& w : ex.warnings) emit(TraceKind::warning, {{"source", "extraction"}, {"message", w}});

        last_order_ = incoming.order;
        for (const auto& cand : ex.candidates) judge_and_store(cand, incoming.order);

        history_.push_back(incoming);
        while (history_.size() > config_.history_window) history_.pop_front();
        return c.take();
    }

    // Inserts pre-extracted candidates (seeding, replay streams) through the
    // same judgement path as process_message.
    std::vector<TraceEvent> ingest(const std::vector<CandidateArgument>& candidates, std::int64_t order) {
        Collector c(*this);
        for (const auto& cand : candidates) judge_and_store(cand, order);
        return c.take();
    }

    // Multiplies every seed strength by lambda and recomputes.
    void scale_seeds(double lambda) {
        if (!(lambda > 0.0 && lambda <= 1.0)) throw ContractViolation("seed scale must lie in (0,1]");
        memory_.scale_seed_strengths(lambda);
        refresh("seed_scale", {{"seed_scale", lambda}});
    }

    void warn(const std::string& message) { emit(TraceKind::warning, {{"source", "agent"}, {"message", message}}); }

    RetrievalContext retrieve() const { return memory_.retrieve(config_.k); }

    // Retrieval + stance instruction + generation. Does not feed the output
    // back; callers pass the returned message to process_message.
    Message compose_response(std::int64_t order) {
        const RetrievalContext ctx = retrieve();
        json ids = json::array();
        for (const auto& r : ctx.records) ids.push_back(r.id);
        emit(TraceKind::retrieved, {{"k_plus", ctx.k_plus}, {"k_minus", ctx.k_minus}, {"record_ids", ids}});
        const StanceInstruction instr = stance_to_instruction(belief_.stance(), config_.bin_labels);
        std::string text = ports_.generator->generate(instr, ctx, history_);
        if (trim(text).empty()) throw BackendError(ports_.generator->name(), "generator produced empty output");
        emit(TraceKind::composed, {{"bin", instr.bin}, {"instruction", instr.text}, {"text", text}, {"order", order}});
        return Message{std::move(text), AuthorRole::self, order};
    }

    // Composition followed by immediate self-feedback.
    Message speak(std::int64_t order) {
        Message m = compose_response(order);
        process_message(m);
        return m;
    }

private:
    struct Collector {
        Agent& a;
        std::size_t start;
        explicit Collector(Agent& agent) : a(agent), start(agent.local_.size()) {}
        std::vector<TraceEvent> take() {
            std::vector<TraceEvent> out(a.local_.begin() + static_cast<std::ptrdiff_t>(start), a.local_.end());
            return out;
        }
    };

    void emit(TraceKind kind, json payload) {
        TraceEvent e{0, id_, kind, payload};
        e.seq = sink_ ? sink_->emit(id_, kind, std::move(payload)) : local_.size();
        local_.push_back(std::move(e));
    }

    void judge_and_store(const CandidateArgument& cand, std::int64_t order) {
        const double strength = score_strength(cand, topic_, *ports_.scorer);
        emit(TraceKind::scored, {{"claim", cand.claim}, {"strength", strength}});

        ArgumentRecord rec;
        rec.claim = cand.claim;
        rec.polarity = cand.polarity;
        rec.strength = strength;
        rec.role = cand.role;
        rec.embedding = ports_.embedder->embed(cand.claim);
        rec.inserted_at = order;

        const ResolutionOutcome res = cand.role == Role::self
                                          ? resolve_self_conflict(rec, memory_, config_.theta_self)
                                          : resolve_conflict(rec, memory_, config_.theta);
        for (const auto& w : res.warnings) emit(TraceKind::warning, {{"source", "judgement"}, {"message", w}});
        json jr = {{"claim", rec.claim},
                   {"similarity", res.similarity},
                   {"threshold", cand.role == Role::self ? config_.theta_self : config_.theta},
                   {"outcome", res.archived_existing ? "replaced" : (res.new_active ? "kept" : "archived_new")}};
        jr["nearest"] = res.nearest ? json(*res.nearest) : json(nullptr);
        jr["archived_id"] = res.archived_existing ? json(*res.archived_existing)
                                                  : (res.new_active ? json(nullptr) : json(memory_.next_id()));
        emit(TraceKind::resolved, std::move(jr));

        const RecordId id = memory_.insert(std::move(rec));
        emit(TraceKind::stored, record_to_json(memory_.get(id)));
        refresh("record", {{"record_id", id}});
    }

    void refresh(const char* cause, json extra) {
        const BeliefState before = belief_;
        belief_ = BeliefState(belief_log_odds(prior_offset_, memory_.active_set(), profile_));
        json p = {{"cause", cause},
                  {"L_before", before.log_odds()},
                  {"L_after", belief_.log_odds()},
                  {"S_before", before.stance()},
                  {"S_after", belief_.stance()},
                  {"delta_L", belief_.log_odds() - before.log_odds()},
                  {"prior", prior_offset_},
                  {"u", profile_.uptake},
                  {"a", profile_.anchoring}};
        for (auto& [k, v] : extra.items()) p[k] = v;
        emit(TraceKind::updated, std::move(p));
    }

    std::string id_;
    std::string topic_;
    UAProfile profile_;
    EngineConfig config_;
    Ports ports_;
    TraceSink* sink_;
    MemoryStore memory_;
    BeliefState belief_;
    double prior_offset_ = 0.0;
    std::deque<Message> history_;
    std::int64_t last_order_ = -1;
    std::vector<TraceEvent> local_;
};

} // namespace belief
