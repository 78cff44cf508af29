#pragma once

// Rebuilds each agent's active set from a trace and re-derives every logged
// belief update. The first event whose logged values disagree with the
// recomputation is reported.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "belief/core.hpp"
#include "belief/memory.hpp"
#include "belief/trace.hpp"

namespace belief {

inline constexpr double kTraceTolerance = 1e-12;

struct VerifiedAgent {
    BeliefState belief;
    std::size_t records = 0;
    std::size_t updates = 0;
};

namespace detail {

struct ReplayAgent {
    std::vector<ArgumentRecord> records;
    double prior = 0.0;
    double log_odds = 0.0;
    std::optional<UAProfile> profile;
    std::size_t updates = 0;
};

} // namespace detail

inline std::map<std::string, VerifiedAgent> verify_events(const std::vector<TraceEvent>& events,
                                                          double tol = kTraceTolerance) {
    std::map<std::string, detail::ReplayAgent> agents;
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const TraceEvent& e = events[i];
        auto& ag = agents[e.agent];
        const json& p = e.payload;
        try {
            switch (e.kind) {
                case TraceKind::stored: {
                    ArgumentRecord r = record_from_json(p);
                    if (r.id != static_cast<RecordId>(ag.records.size()))
                        throw VerificationError(i, "record id out of sequence");
                    if (!(r.strength >= 0.0 && r.strength <= 1.0))
                        throw VerificationError(i, "stored strength outside [0,1]");
                    ag.records.push_back(std::move(r));
                    break;
                }
                case TraceKind::resolved: {
                    if (p.at("outcome").get<std::string>() == "replaced") {
                        const auto id = p.at("archived_id").get<RecordId>();
                        if (id < 0 || static_cast<std::size_t>(id) >= ag.records.size() ||
                            !ag.records[static_cast<std::size_t>(id)].active)
                            throw VerificationError(i, "replacement archives an unknown or inactive record");
                        ag.records[static_cast<std::size_t>(id)].active = false;
                    }
                    break;
                }
                case TraceKind::updated: {
                    const UAProfile prof{p.at("u").get<double>(), p.at("a").get<double>(), 0.0};
                    if (!ag.profile) ag.profile = prof;
                    else if (!(*ag.profile == prof)) throw VerificationError(i, "profile changed mid-trace");

                    const std::string cause = p.value("cause", std::string("record"));
                    if (cause == "prior") ag.prior = p.at("prior").get<double>();
                    else if (p.at("prior").get<double>() != ag.prior)
                        throw VerificationError(i, "prior offset changed without a prior event");
                    if (cause == "seed_scale") {
                        const double lambda = p.at("seed_scale").get<double>();
                        for (auto& r : ag.records)
                            if (r.role == Role::seed) r.strength *= lambda;
                    }

                    const double l_before = p.at("L_before").get<double>();
                    const double l_after = p.at("L_after").get<double>();
                    if (!close(l_before, ag.log_odds)) throw VerificationError(i, "L_before does not match prior state");
                    std::vector<ArgumentRecord> active;
                    for (const auto& r : ag.records)
                        if (r.active) active.push_back(r);
                    const double recomputed = ag.prior + compute_log_odds(active, prof);
                    if (!close(recomputed, l_after))
                        throw VerificationError(i, "L_after " + std::to_string(l_after) +
                                                       " differs from recomputed " + std::to_string(recomputed));
                    if (!close(p.at("delta_L").get<double>(), l_after - l_before))
                        throw VerificationError(i, "delta_L inconsistent with L_before/L_after");
                    if (!close(p.at("S_before").get<double>(), stance_from_log_odds(l_before)) ||
                        !close(p.at("S_after").get<double>(), stance_from_log_odds(l_after)))
                        throw VerificationError(i, "stance inconsistent with log-odds");
                    ag.log_odds = recomputed;
                    ++ag.updates;
                    break;
                }
                default:
                    break;
            }
        } catch (const VerificationError&) {
            throw;
        } catch (const std::exception& ex) {
            throw VerificationError(i, std::string("malformed payload: ") + ex.what());
        }
    }

    std::map<std::string, VerifiedAgent> out;
    for (const auto& [id, ag] : agents)
        out[id] = VerifiedAgent{BeliefState(ag.log_odds), ag.records.size(), ag.updates};
    return out;
}

} // namespace belief
