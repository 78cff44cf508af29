#pragma once

// Strength scoring ports. A scorer maps a (topic, claim) pair to [0,1] and
// must be deterministic for that pair within a run.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "belief/embedding.hpp"
#include "belief/service.hpp"
#include "belief/types.hpp"

namespace belief {

class ScorerPort {
public:
    virtual ~ScorerPort() = default;
    virtual double score(const std::string& topic, const std::string& claim) = 0;
    // Scorers that can learn strengths from extractor hints override this.
    virtual void offer_hint(const std::string& /*topic*/, const std::string& /*claim*/, double /*hint*/) {}
    virtual std::string name() const = 0;
};

// Hash-derived pseudo-strength in [0.05, 0.95]; useful only to exercise the
// pipeline without a classifier.
class BuiltinScorer final : public ScorerPort {
public:
    double score(const std::string& topic, const std::string& claim) override {
        const std::uint64_t h = fnv1a(claim, fnv1a(topic + '\x1f'));
        const double unit = static_cast<double>(h >> 11) / static_cast<double>(1ull << 53);
        return 0.05 + 0.9 * unit;
    }
    std::string name() const override { return "builtin"; }
};

// Lookup table keyed by (topic, claim). Extractor hints fill in claims the
// table has not seen; the first value registered for a pair wins, so the
// score of a pair never changes within a run. Unknown pairs without a hint
// fall back to the builtin scorer.
class TableScorer final : public ScorerPort {
public:
    void set(const std::string& topic, const std::string& claim, double s) {
        std::lock_guard lock(mu_);
        table_[{topic, trim(claim)}] = s;
    }

    void offer_hint(const std::string& topic, const std::string& claim, double hint) override {
        std::lock_guard lock(mu_);
        table_.try_emplace({topic, trim(claim)}, hint);
    }

    double score(const std::string& topic, const std::string& claim) override {
        {
            std::lock_guard lock(mu_);
            if (auto it = table_.find({topic, trim(claim)}); it != table_.end()) return it->second;
        }
        return fallback_.score(topic, claim);
    }

    bool contains(const std::string& topic, const std::string& claim) const {
        std::lock_guard lock(mu_);
        return table_.contains({topic, trim(claim)});
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return table_.size();
    }

    std::string name() const override { return "table"; }

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, std::string>, double> table_;
    BuiltinScorer fallback_;
};

// Request {topic, claim}; response {score}.
class ServiceScorer final : public ScorerPort {
public:
    explicit ServiceScorer(ServiceEndpoint ep) : client_("scorer", std::move(ep)) {}

    double score(const std::string& topic, const std::string& claim) override {
        const auto res = client_.post({{"topic", topic}, {"claim", claim}});
        if (!res.is_object() || !res.contains("score") || !res["score"].is_number())
            throw BackendError("scorer", "response lacks numeric 'score'");
        const double s = res["score"].get<double>();
        if (!std::isfinite(s)) throw BackendError("scorer", "non-finite score");
        return s;
    }
    std::string name() const override { return "service"; }

private:
    JsonServiceClient client_;
};

// Scorer output clamped to [0,1]. NaN is a backend fault, not a strength.
inline double score_strength(const CandidateArgument& candidate, const std::string& topic, ScorerPort& scorer) {
    if (candidate.strength_hint) scorer.offer_hint(topic, candidate.claim, *candidate.strength_hint);
    const double raw = scorer.score(topic, candidate.claim);
    if (std::isnan(raw)) throw BackendError(scorer.name(), "scorer returned NaN");
    return std::clamp(raw, 0.0, 1.0);
}

} // namespace belief
