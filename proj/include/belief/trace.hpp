#pragma once

// Audit trail. Each event is one JSON line; lines are chained with an FNV-1a
// digest over the previous digest and the raw line body so any edit,
// deletion or reordering of the file is detectable.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "belief/embedding.hpp"
#include "belief/error.hpp"

namespace belief {

using json = nlohmann::json;

enum class TraceKind { extracted, scored, resolved, stored, updated, retrieved, composed, warning };

inline std::string_view to_string(TraceKind k) {
    switch (k) {
        case TraceKind::extracted: return "extracted";
        case TraceKind::scored: return "scored";
        case TraceKind::resolved: return "resolved";
        case TraceKind::stored: return "stored";
        case TraceKind::updated: return "updated";
        case TraceKind::retrieved: return "retrieved";
        case TraceKind::composed: return "composed";
        case TraceKind::warning: return "warning";
    }
    return "?";
}

inline TraceKind trace_kind_from_string(std::string_view s) {
    for (auto k : {TraceKind::extracted, TraceKind::scored, TraceKind::resolved, TraceKind::stored,
                   TraceKind::updated, TraceKind::retrieved, TraceKind::composed, TraceKind::warning})
        if (to_string(k) == s) return k;
    throw ContractViolation("unknown trace kind: " + std::string(s));
}

struct TraceEvent {
    std::uint64_t seq = 0;
    std::string agent;
    TraceKind kind = TraceKind::warning;
    json payload = json::object();
};

inline std::string digest_hex(std::uint64_t d) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << d;
    return os.str();
}

inline constexpr std::string_view kDigestMarker = ",\"digest\":\"";

// Body is the compact JSON object without its closing brace; the digest
// field is appended last.
inline std::string event_body(const TraceEvent& e) {
    json j = {{"seq", e.seq}, {"agent", e.agent}, {"kind", std::string(to_string(e.kind))}, {"payload", e.payload}};
    std::string s = j.dump();
    s.pop_back();
    return s;
}

inline std::uint64_t chain_digest(std::uint64_t prev, std::string_view body) {
    return fnv1a(body, fnv1a(digest_hex(prev)));
}

// Receives events from any number of agents and assigns global sequence
// numbers. Optionally mirrors each event to a JSONL file, flushed per line so
// a failing run leaves its partial trace on disk.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(const std::filesystem::path& file) { open(file); }

    void open(const std::filesystem::path& file) {
        std::lock_guard lock(mu_);
        out_.open(file, std::ios::out | std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot open trace file " + file.string());
    }

    std::uint64_t emit(std::string agent, TraceKind kind, json payload) {
        std::lock_guard lock(mu_);
        TraceEvent e{next_seq_++, std::move(agent), kind, std::move(payload)};
        if (out_.is_open()) {
            const std::string body = event_body(e);
            last_digest_ = chain_digest(last_digest_, body);
            out_ << body << kDigestMarker << digest_hex(last_digest_) << "\"}\n";
            out_.flush();
        }
        events_.push_back(std::move(e));
        return events_.back().seq;
    }

    const std::vector<TraceEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }

    void close() {
        std::lock_guard lock(mu_);
        if (out_.is_open()) out_.close();
    }

private:
    std::mutex mu_;
    std::vector<TraceEvent> events_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t last_digest_ = 0;
    std::ofstream out_;
};

// Parses a trace file, checking the digest chain and sequence ordering.
inline std::vector<TraceEvent> read_trace(std::istream& in) {
    std::vector<TraceEvent> events;
    std::uint64_t prev = 0;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto pos = line.rfind(kDigestMarker);
        if (pos == std::string::npos) throw VerificationError(index, "missing digest");
        const std::string body = line.substr(0, pos);
        const std::string tail = line.substr(pos + kDigestMarker.size());
        if (tail.size() != 16 + 2 || tail.substr(16) != "\"}")
            throw VerificationError(index, "malformed digest field");
        const std::uint64_t expect = chain_digest(prev, body);
        if (tail.substr(0, 16) != digest_hex(expect)) throw VerificationError(index, "digest mismatch");
        prev = expect;

        json j;
        try {
            j = json::parse(body + "}");
        } catch (const json::exception& ex) {
            throw VerificationError(index, std::string("unparseable event: ") + ex.what());
        }
        TraceEvent e;
        try {
            e.seq = j.at("seq").get<std::uint64_t>();
            e.agent = j.at("agent").get<std::string>();
            e.kind = trace_kind_from_string(j.at("kind").get<std::string>());
            e.payload = j.at("payload");
        } catch (const std::exception& ex) {
            throw VerificationError(index, std::string("bad event fields: ") + ex.what());
        }
        if (!events.empty() && e.seq <= events.back().seq)
            throw VerificationError(index, "sequence numbers not strictly increasing");
        events.push_back(std::move(e));
        ++index;
    }
    return events;
}

inline std::vector<TraceEvent> read_trace_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open trace file " + file.string());
    return read_trace(in);
}

} // namespace belief
