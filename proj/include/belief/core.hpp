#pragma once

// Log-odds belief state and its update rule.
//
// Every active record i contributes p_i * ln(1 + s_i * gamma_i) to the log-odds
// L, with gamma_i = a (anchoring) for seed records and gamma_i = u (uptake)
// otherwise. Stance is the bounded readout S = 2*sigmoid(L) - 1 = tanh(L/2).

#include <algorithm>
#include <cmath>
#include <ranges>

#include "belief/error.hpp"
#include "belief/types.hpp"

namespace belief {

// Replay priors at the Likert endpoints would otherwise be infinite.
inline constexpr double kDefaultStanceClip = 0.995;

struct UAProfile {
    double uptake = 0.4;
    double anchoring = 0.7;
    double confirmation_asymmetry = 0.0;  // must stay 0.0, no defined effect

    static UAProfile make(double u, double a, double b = 0.0) {
        UAProfile p{u, a, b};
        p.validate();
        return p;
    }

    void validate() const {
        if (!std::isfinite(uptake) || uptake < 0.0) throw ConfigError("uptake u must be finite and >= 0");
        if (!std::isfinite(anchoring) || anchoring < 0.0)
            throw ConfigError("anchoring a must be finite and >= 0");
        if (confirmation_asymmetry != 0.0)
            throw ConfigError("confirmation asymmetry B must be 0.0 (nonzero values are unsupported)");
    }

    double weight_for(Role r) const noexcept { return r == Role::seed ? anchoring : uptake; }

    friend bool operator==(const UAProfile&, const UAProfile&) = default;
};

inline const UAProfile kOpenMinded{0.40, 0.20, 0.0};
inline const UAProfile kStubborn{0.10, 0.80, 0.0};

inline double stance_from_log_odds(double log_odds) noexcept {
    // tanh keeps sign(S) == sign(L) exactly, including for tiny |L|.
    return std::tanh(0.5 * log_odds);
}

inline double log_odds_from_stance(double stance) {
    if (!(std::abs(stance) < 1.0)) throw ContractViolation("log_odds_from_stance requires |S| < 1");
    return std::log((1.0 + stance) / (1.0 - stance));
}

inline double clip_stance(double stance, double bound = kDefaultStanceClip) {
    return std::clamp(stance, -bound, bound);
}

class BeliefState {
public:
    BeliefState() = default;
    explicit BeliefState(double log_odds) : log_odds_(log_odds), stance_(stance_from_log_odds(log_odds)) {}

    double log_odds() const noexcept { return log_odds_; }
    double stance() const noexcept { return stance_; }

    friend bool operator==(const BeliefState&, const BeliefState&) = default;

private:
    double log_odds_ = 0.0;
    double stance_ = 0.0;
};

// Contribution of a single active record.
inline double evidence_term(const ArgumentRecord& r, const UAProfile& profile) {
    if (!(r.strength >= 0.0 && r.strength <= 1.0)) throw ContractViolation("record strength outside [0,1]");
    if (!r.active) throw ContractViolation("archived record passed to the belief update");
    return r.polarity.value() * std::log1p(r.strength * profile.weight_for(r.role));
}

// Full recompute over the active set. Each side is accumulated separately in
// the given order, so mirror-image evidence cancels to exactly 0.
template <std::ranges::input_range R>
    requires std::same_as<std::ranges::range_value_t<R>, ArgumentRecord>
double compute_log_odds(const R& active_records, const UAProfile& profile) {
    double pro = 0.0, con = 0.0;
    for (const ArgumentRecord& r : active_records) {
        const double t = evidence_term(r, profile);
        if (r.polarity.affirmative()) pro += t;
        else con -= t;
    }
    return pro - con;
}

// Scaled-logit prior used by replay: L0 = a * logit(clip(S_init)).
inline double prior_log_odds(double initial_stance, const UAProfile& profile,
                             double clip = kDefaultStanceClip) {
    return profile.anchoring * log_odds_from_stance(clip_stance(initial_stance, clip));
}

inline BeliefState init_prior_from_stance(double initial_stance, const UAProfile& profile,
                                          double clip = kDefaultStanceClip) {
    return BeliefState(prior_log_odds(initial_stance, profile, clip));
}

// Valid only while nothing has been archived since the state was last
// computed; otherwise the caller must recompute from the active set.
inline BeliefState update_incremental(const BeliefState& state, const ArgumentRecord& new_record,
                                      const UAProfile& profile, bool archival_since_last = false) {
    if (archival_since_last)
        throw ContractViolation("archival occurred since last update; use compute_log_odds");
    return BeliefState(state.log_odds() + evidence_term(new_record, profile));
}

} // namespace belief
