#pragma once

// Synthetic replay populations with known ground truth. Movers are generated
// by the replay model itself at a chosen (u, a), so calibration has an exact
// answer to recover; stable and anti-evidence participants provide contrast.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "belief/random.hpp"
#include "belief/replay.hpp"

namespace belief {

enum class MoverKind { profile, stable, anti };

inline std::string_view to_string(MoverKind k) {
    switch (k) {
        case MoverKind::profile: return "profile";
        case MoverKind::stable: return "stable";
        case MoverKind::anti: return "anti";
    }
    return "?";
}

struct SyntheticConfig {
    std::size_t cases = 400;
    std::size_t group_size = 4;
    std::size_t topics = 12;
    int min_items = 3;
    int max_items = 8;
    double duplicate_rate = 0.1;  // chance an item repeats an earlier claim of the case
    double min_strength = 0.2;
    double max_strength = 0.95;

    UAProfile profile{0.15, 0.5, 0.0};  // generator for profile movers
    double noise_sd = 0.0;              // Gaussian noise on profile-mover finals
    double profile_share = 1.0;
    double stable_share = 0.0;
    double anti_share = 0.0;
    double anti_min = 0.2;  // anti-evidence movement magnitude range
    double anti_max = 0.6;

    std::uint64_t seed = 7;

    void validate() const {
        if (cases == 0) throw ConfigError("synthetic population needs at least one case");
        if (group_size == 0 || topics == 0) throw ConfigError("group size and topic count must be positive");
        if (min_items < 0 || max_items < min_items) throw ConfigError("invalid evidence length range");
        if (!(min_strength >= 0.0 && max_strength <= 1.0 && min_strength <= max_strength))
            throw ConfigError("invalid strength range");
        if (profile_share < 0 || stable_share < 0 || anti_share < 0 ||
            profile_share + stable_share + anti_share <= 0)
            throw ConfigError("population shares must be non-negative and not all zero");
        if (noise_sd < 0) throw ConfigError("noise_sd must be >= 0");
        profile.validate();
    }
};

struct SyntheticCase {
    ReplayCase c;
    MoverKind kind = MoverKind::profile;
};

namespace detail {

inline constexpr std::array<std::string_view, 64> kWords = {
    "turnout",  "ballot",   "citizen",  "penalty",  "freedom",  "duty",      "parliament", "minority",
    "campaign", "poll",     "fine",     "liberty",  "poverty",  "trust",     "state",      "coercion",
    "habit",    "youth",    "district", "reform",   "consent",  "abstain",   "register",   "court",
    "budget",   "protest",  "policy",   "moderate", "extreme",  "candidate", "donation",   "media",
    "rural",    "urban",    "worker",   "student",  "pension",  "housing",   "climate",    "tax",
    "health",   "school",   "border",   "energy",   "privacy",  "security",  "market",     "wage",
    "council",  "mayor",    "senate",   "vote",     "referendum", "party",   "election",   "debate",
    "evidence", "survey",   "history",  "future",   "welfare",  "justice",   "equality",   "community",
};

inline std::string random_claim(Rng& rng) {
    std::string out;
    for (int i = 0; i < 6; ++i) {
        if (i) out += ' ';
        out += kWords[uniform_below(rng, kWords.size())];
    }
    return out;
}

} // namespace detail

// Shares are turned into exact counts (largest remainder), then shuffled.
inline std::vector<MoverKind> assign_kinds(const SyntheticConfig& cfg, Rng& rng) {
    const double total = cfg.profile_share + cfg.stable_share + cfg.anti_share;
    const std::array<double, 3> share = {cfg.profile_share / total, cfg.stable_share / total, cfg.anti_share / total};
    std::array<std::size_t, 3> count{};
    std::array<double, 3> rem{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = share[i] * static_cast<double>(cfg.cases);
        count[i] = static_cast<std::size_t>(std::floor(exact));
        rem[i] = exact - static_cast<double>(count[i]);
        used += count[i];
    }
    while (used < cfg.cases) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (rem[i] > rem[best]) best = i;
        ++count[best];
        rem[best] = -1.0;
        ++used;
    }
    std::vector<MoverKind> kinds;
    for (std::size_t i = 0; i < count[0]; ++i) kinds.push_back(MoverKind::profile);
    for (std::size_t i = 0; i < count[1]; ++i) kinds.push_back(MoverKind::stable);
    for (std::size_t i = 0; i < count[2]; ++i) kinds.push_back(MoverKind::anti);
    fisher_yates(kinds, rng);
    return kinds;
}

inline std::vector<SyntheticCase> generate_population(const SyntheticConfig& cfg,
                                                      const ReplaySettings& settings = {}) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto kinds = assign_kinds(cfg, rng);
    std::vector<SyntheticCase> out;
    out.reserve(cfg.cases);
    for (std::size_t i = 0; i < cfg.cases; ++i) {
        SyntheticCase sc;
        sc.kind = kinds[i];
        ReplayCase& c = sc.c;
        c.participant = "p" + std::to_string(i);
        c.group = "g" + std::to_string(i / cfg.group_size);
        c.topic = "t" + std::to_string((i / cfg.group_size) % cfg.topics);
        c.initial_likert = 1 + static_cast<int>(uniform_below(rng, 6));
        c.initial_stance = likert_to_stance(*c.initial_likert);

        // a per-case lean makes net evidence clearly signed more often than not
        const double lean = uniform(rng, 0.2, 0.8);
        const int n = cfg.min_items + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cfg.max_items - cfg.min_items + 1)));
        for (int k = 0; k < n; ++k) {
            EvidenceItem e;
            e.order = k + 1;
            if (!c.evidence.empty() && uniform01(rng) < cfg.duplicate_rate) {
                const auto& prev = c.evidence[uniform_below(rng, c.evidence.size())];
                e.claim = prev.claim;
                e.polarity = prev.polarity;
            } else {
                e.claim = detail::random_claim(rng);
                e.polarity = uniform01(rng) < lean ? Polarity::pro() : Polarity::con();
            }
            e.strength = uniform(rng, cfg.min_strength, cfg.max_strength);
            c.evidence.push_back(std::move(e));
        }

        switch (sc.kind) {
            case MoverKind::profile: {
                double s = replay_case(c, cfg.profile, settings);
                if (cfg.noise_sd > 0.0) s = std::clamp(normal(rng, s, cfg.noise_sd), -1.0, 1.0);
                c.final_stance = s;
                break;
            }
            case MoverKind::stable:
                c.final_likert = c.initial_likert;
                c.final_stance = c.initial_stance;
                break;
            case MoverKind::anti: {
                const double e = net_evidence(c, settings);
                const double dir = e > 0.0 ? -1.0 : 1.0;
                c.final_stance = std::clamp(c.initial_stance + dir * uniform(rng, cfg.anti_min, cfg.anti_max), -1.0, 1.0);
                break;
            }
        }
        out.push_back(std::move(sc));
    }
    return out;
}

inline std::vector<ReplayCase> cases_of(const std::vector<SyntheticCase>& pop) {
    std::vector<ReplayCase> out;
    out.reserve(pop.size());
    for (const auto& s : pop) out.push_back(s.c);
    return out;
}

} // namespace belief
