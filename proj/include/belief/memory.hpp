#pragma once

// Per-agent argument store. Records are never deleted; archival only clears
// the active flag, so the full history stays auditable.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "belief/error.hpp"
#include "belief/types.hpp"

namespace belief {

struct RetrievalContext {
    std::vector<ArgumentRecord> records;  // affirmative block first, then negative
    int k_plus = 0;
    int k_minus = 0;
};

struct SlotAllocation {
    int k_plus = 0;
    int k_minus = 0;
};

// k+ = round_half_up(k * n_plus / (n_plus + n_minus)); even split (extra slot
// affirmative) when both sides are empty. Integer arithmetic keeps the
// half-up tie exact.
inline SlotAllocation allocate_slots(int k, std::size_t n_plus, std::size_t n_minus) {
    if (k < 1) throw ContractViolation("retrieval requires k >= 1");
    const std::size_t total = n_plus + n_minus;
    int k_plus = 0;
    if (total == 0) {
        k_plus = (k + 1) / 2;
    } else {
        const std::size_t num = 2 * static_cast<std::size_t>(k) * n_plus + total;
        k_plus = static_cast<int>(num / (2 * total));
    }
    return {k_plus, k - k_plus};
}

class MemoryStore {
public:
    // Appends a judged record; the store assigns the id.
    RecordId insert(ArgumentRecord record) {
        record.id = next_id_++;
        if (!records_.empty() && records_.back().id >= record.id)
            throw std::logic_error("memory store id counter went backwards");
        records_.push_back(std::move(record));
        return records_.back().id;
    }

    const std::vector<ArgumentRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    RecordId next_id() const noexcept { return next_id_; }

    std::vector<ArgumentRecord> active_set() const {
        std::vector<ArgumentRecord> out;
        for (const auto& r : records_)
            if (r.active) out.push_back(r);
        return out;
    }

    std::size_t active_count() const {
        return static_cast<std::size_t>(std::ranges::count_if(records_, [](const auto& r) { return r.active; }));
    }

    const ArgumentRecord& get(RecordId id) const { return records_.at(index_of(id)); }

    void archive(RecordId id, std::optional<RecordId> superseded_by) {
        auto& r = records_.at(index_of(id));
        r.active = false;
        r.archived_by = superseded_by;
    }

    // Rescales the strengths of all seed records (used once, right after seeding).
    void scale_seed_strengths(double lambda) {
        for (auto& r : records_)
            if (r.role == Role::seed) {
                if (!r.scored_strength) r.scored_strength = r.strength;
                r.strength *= lambda;
            }
    }

    RetrievalContext retrieve(int k) const {
        std::vector<const ArgumentRecord*> pro, con;
        for (const auto& r : records_) {
            if (!r.active) continue;
            (r.polarity.affirmative() ? pro : con).push_back(&r);
        }
        const auto alloc = allocate_slots(k, pro.size(), con.size());
        // Strongest first; ties go to the older record.
        auto by_strength = [](const ArgumentRecord* x, const ArgumentRecord* y) {
            if (x->strength != y->strength) return x->strength > y->strength;
            return x->id < y->id;
        };
        std::ranges::stable_sort(pro, by_strength);
        std::ranges::stable_sort(con, by_strength);
        RetrievalContext ctx{{}, alloc.k_plus, alloc.k_minus};
        for (std::size_t i = 0; i < pro.size() && i < static_cast<std::size_t>(alloc.k_plus); ++i)
            ctx.records.push_back(*pro[i]);
        for (std::size_t i = 0; i < con.size() && i < static_cast<std::size_t>(alloc.k_minus); ++i)
            ctx.records.push_back(*con[i]);
        return ctx;
    }

    void write_jsonl(std::ostream& os) const;
    static MemoryStore read_jsonl(std::istream& is);

private:
    std::size_t index_of(RecordId id) const {
        // ids are dense and assigned in insertion order
        if (id < 0 || static_cast<std::size_t>(id) >= records_.size() || records_[id].id != id)
            throw ContractViolation("unknown record id " + std::to_string(id));
        return static_cast<std::size_t>(id);
    }

    std::vector<ArgumentRecord> records_;
    RecordId next_id_ = 0;
};

inline nlohmann::json record_to_json(const ArgumentRecord& r) {
    nlohmann::json j = {{"id", r.id},
                        {"claim", r.claim},
                        {"polarity", r.polarity.value()},
                        {"strength", r.strength},
                        {"role", std::string(to_string(r.role))},
                        {"active", r.active},
                        {"inserted_at", r.inserted_at}};
    j["archived_by"] = r.archived_by ? nlohmann::json(*r.archived_by) : nlohmann::json(nullptr);
    if (r.scored_strength) j["scored_strength"] = *r.scored_strength;
    return j;
}

inline ArgumentRecord record_from_json(const nlohmann::json& j) {
    ArgumentRecord r;
    r.id = j.at("id").get<RecordId>();
    r.claim = j.at("claim").get<std::string>();
    r.polarity = Polarity::from_int(j.at("polarity").get<int>());
    r.strength = j.at("strength").get<double>();
    r.role = role_from_string(j.at("role").get<std::string>());
    r.active = j.at("active").get<bool>();
    if (j.contains("archived_by") && !j["archived_by"].is_null()) r.archived_by = j["archived_by"].get<RecordId>();
    r.inserted_at = j.value("inserted_at", std::int64_t{0});
    if (j.contains("scored_strength")) r.scored_strength = j["scored_strength"].get<double>();
    return r;
}

inline void MemoryStore::write_jsonl(std::ostream& os) const {
    for (const auto& r : records_) os << record_to_json(r).dump() << '\n';
}

// Embeddings are not persisted; callers re-embed claims if they need them.
inline MemoryStore MemoryStore::read_jsonl(std::istream& is) {
    MemoryStore store;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        ArgumentRecord r = record_from_json(nlohmann::json::parse(line));
        if (r.id != store.next_id_) throw IngestionError("memory dump ids must be dense and ordered");
        store.records_.push_back(std::move(r));
        ++store.next_id_;
    }
    return store;
}

} // namespace belief
