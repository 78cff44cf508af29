#pragma once

// Value types shared across the pipeline: polarity, source role, argument
// candidates and stored argument records.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "belief/error.hpp"

namespace belief {

using RecordId = std::int64_t;

// Proposition-relative direction of a claim. Never sentiment.
class Polarity {
public:
    constexpr Polarity() = default;

    static Polarity from_int(int v) {
        if (v != 1 && v != -1) throw ContractViolation("polarity must be -1 or +1");
        return Polarity(v);
    }
    static constexpr Polarity pro() { return Polarity(1); }
    static constexpr Polarity con() { return Polarity(-1); }

    constexpr int value() const noexcept { return value_; }
    constexpr bool affirmative() const noexcept { return value_ > 0; }
    constexpr auto operator<=>(const Polarity&) const = default;

private:
    constexpr explicit Polarity(int v) : value_(v) {}
    int value_ = 1;
};

enum class Role { seed, self, opponent };

inline std::string_view to_string(Role r) {
    switch (r) {
        case Role::seed: return "seed";
        case Role::self: return "self";
        case Role::opponent: return "opponent";
    }
    return "?";
}

inline Role role_from_string(std::string_view s) {
    if (s == "seed") return Role::seed;
    if (s == "self") return Role::self;
    if (s == "opponent") return Role::opponent;
    throw ContractViolation("unknown role: " + std::string(s));
}

inline std::string trim(std::string_view s) {
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

// One proposed claim before judgement. The strength hint is whatever the
// extractor carried along (scripted grammar); scoring decides the strength.
struct CandidateArgument {
    std::string claim;
    Polarity polarity;
    Role role = Role::opponent;
    std::optional<double> strength_hint;

    CandidateArgument(std::string c, Polarity p, Role r, std::optional<double> hint = std::nullopt)
        : claim(trim(c)), polarity(p), role(r), strength_hint(hint) {
        if (claim.empty()) throw ContractViolation("candidate claim is empty");
    }
};

struct ArgumentRecord {
    RecordId id = -1;
    std::string claim;
    Polarity polarity;
    double strength = 0.0;
    Role role = Role::opponent;
    bool active = true;  // credence_relevant
    std::vector<double> embedding;
    std::optional<RecordId> archived_by;
    std::int64_t inserted_at = 0;  // message order at insertion time
    // Scorer output before seed scaling; set only on rescaled seeds.
    std::optional<double> scored_strength;

    // Strength used when judging near-duplicates. A scaled seed is compared at
    // its scored strength, so repeating one's own seed never replaces it.
    double judged_strength() const noexcept { return scored_strength.value_or(strength); }
};

} // namespace belief
