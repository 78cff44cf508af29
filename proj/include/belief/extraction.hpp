#pragma once

// Extraction ports. An extractor proposes candidate arguments from a message;
// it never touches memory or belief state.
//
// Scripted-claim grammar, one claim per line:
//
//     CLAIM <sign><hint>: <text>
//
// <sign> is '+' or '-' (U+2212 accepted), <hint> a decimal in [0,1]. Lines
// not starting with "CLAIM" are ignored.

#include <cstdint>
#include <iomanip>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "belief/service.hpp"
#include "belief/types.hpp"

namespace belief {

enum class AuthorRole { self, opponent, seed_source };

inline Role role_for(AuthorRole a) {
    switch (a) {
        case AuthorRole::self: return Role::self;
        case AuthorRole::opponent: return Role::opponent;
        case AuthorRole::seed_source: return Role::seed;
    }
    return Role::opponent;
}

inline std::string_view to_string(AuthorRole a) {
    switch (a) {
        case AuthorRole::self: return "self";
        case AuthorRole::opponent: return "opponent";
        case AuthorRole::seed_source: return "seed_source";
    }
    return "?";
}

struct Message {
    std::string text;
    AuthorRole author_role = AuthorRole::opponent;
    std::int64_t order = 0;
};

struct Extraction {
    std::vector<CandidateArgument> candidates;
    std::vector<std::string> warnings;
};

class ExtractorPort {
public:
    virtual ~ExtractorPort() = default;
    virtual Extraction extract(const std::string& topic, const Message& message) = 0;
    virtual std::string name() const = 0;
};

namespace detail {

inline bool parse_hint(const std::string& s, double& out) {
    static const std::regex decimal(R"(^(\d+(\.\d*)?|\.\d+)$)");
    if (!std::regex_match(s, decimal)) return false;
    out = std::stod(s);
    return out >= 0.0 && out <= 1.0;
}

} // namespace detail

inline Extraction parse_scripted_message(const Message& message) {
    static const std::string kMinus = "\xE2\x88\x92";  // U+2212
    Extraction out;
    std::istringstream in(message.text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.starts_with("CLAIM")) continue;
        auto warn = [&](const std::string& why) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
        };
        if (!line.starts_with("CLAIM ")) {
            warn("expected 'CLAIM <sign><strength>: <text>'");
            continue;
        }
        std::string rest = line.substr(6);
        Polarity polarity;
        if (rest.starts_with("+")) {
            polarity = Polarity::pro();
            rest.erase(0, 1);
        } else if (rest.starts_with("-")) {
            polarity = Polarity::con();
            rest.erase(0, 1);
        } else if (rest.starts_with(kMinus)) {
            polarity = Polarity::con();
            rest.erase(0, kMinus.size());
        } else {
            warn("missing polarity sign");
            continue;
        }
        const auto colon = rest.find(": ");
        if (colon == std::string::npos) {
            warn("missing ': ' separator");
            continue;
        }
        double hint = 0.0;
        if (!detail::parse_hint(rest.substr(0, colon), hint)) {
            warn("malformed strength hint '" + rest.substr(0, colon) + "'");
            continue;
        }
        const std::string text = trim(rest.substr(colon + 2));
        if (text.empty()) {
            warn("empty claim text");
            continue;
        }
        out.candidates.emplace_back(text, polarity, role_for(message.author_role), hint);
    }
    return out;
}

// Formats one claim line in the scripted grammar (inverse of the parser).
inline std::string format_claim_line(const std::string& claim, Polarity p, double strength) {
    std::ostringstream os;
    os << "CLAIM " << (p.affirmative() ? '+' : '-') << std::fixed << std::setprecision(6) << strength << ": "
       << claim;
    return os.str();
}

class ScriptedExtractor final : public ExtractorPort {
public:
    Extraction extract(const std::string& /*topic*/, const Message& message) override {
        return parse_scripted_message(message);
    }
    std::string name() const override { return "scripted"; }
};

// Request {topic, message_text}; response: JSON array of {claim, polarity}.
class ServiceExtractor final : public ExtractorPort {
public:
    explicit ServiceExtractor(ServiceEndpoint ep) : client_("extractor", std::move(ep)) {}

    Extraction extract(const std::string& topic, const Message& message) override {
        const auto res = client_.post({{"topic", topic}, {"message_text", message.text}});
        if (!res.is_array()) throw BackendError("extractor", "malformed response: expected a JSON array");
        Extraction out;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const auto& item = res[i];
            auto drop = [&](const std::string& why) {
                out.warnings.push_back("item " + std::to_string(i) + " dropped: " + why);
            };
            if (!item.is_object() || !item.contains("claim") || !item["claim"].is_string()) {
                drop("missing string 'claim'");
                continue;
            }
            if (!item.contains("polarity") || !item["polarity"].is_number_integer()) {
                drop("missing integer 'polarity'");
                continue;
            }
            const int p = item["polarity"].get<int>();
            if (p != 1 && p != -1) {
                drop("polarity must be -1 or 1");
                continue;
            }
            const std::string claim = trim(item["claim"].get<std::string>());
            if (claim.empty()) {
                drop("empty claim");
                continue;
            }
            out.candidates.emplace_back(claim, Polarity::from_int(p), role_for(message.author_role));
        }
        return out;
    }
    std::string name() const override { return "service"; }

private:
    JsonServiceClient client_;
};

} // namespace belief
