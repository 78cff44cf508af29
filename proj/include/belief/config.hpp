#pragma once

// Run configuration: an INI file with sections, parsed with Boost.PropertyTree.
// Unknown sections and keys are errors. Relative paths resolve against the
// config file's directory. The fully resolved configuration is serialised to
// canonical JSON and written next to every run's outputs.
//
//   [run]      topic, seed, out
//   [engine]   theta, theta_self, k, history_window, bin_labels (10 labels, '|'-separated)
//   [sweep]    rounds, seeds, target, u_grid, a_grid, fixed_a, fixed_u, trials,
//              seed_corpus, opponent_script
//   [debate]   rounds, seeds, pro_target, con_target, trials, pro_corpus,
//              con_corpus, profiles
//   [profile.NAME]  u, a
//   [topic.NAME]    proposition, pro_corpus, con_corpus
//   [replay]   cases, u_grid, a_grid, folds, key, eps_weak, clip, theta, strict
//   [ports]    scorer, extractor, generator, timeout, retries, max_in_flight
//
// Lists are comma-separated. Comments start with ';'.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "belief/core.hpp"
#include "belief/engine.hpp"
#include "belief/error.hpp"
#include "belief/replay.hpp"

namespace belief {

namespace fs = std::filesystem;

struct PortsConfig {
    std::string scorer = "table";        // table | builtin | http(s)://...
    std::string extractor = "scripted";  // scripted | http(s)://...
    std::string generator = "template";  // template | http(s)://...
    double timeout = 10.0;
    int retries = 2;
    int max_in_flight = 4;

    ServiceEndpoint endpoint(const std::string& url) const { return {url, timeout, retries, max_in_flight}; }
};

struct EngineOverrides {
    std::optional<double> theta;
    std::optional<double> theta_self;
    std::optional<int> k;
    std::optional<std::size_t> history_window;
    std::optional<BinLabels> bin_labels;

    EngineConfig apply(EngineConfig base) const {
        if (theta) base.theta = *theta;
        if (theta_self) base.theta_self = *theta_self;
        if (k) base.k = *k;
        if (history_window) base.history_window = *history_window;
        if (bin_labels) base.bin_labels = *bin_labels;
        return base;
    }
};

struct TopicSpec {
    std::string name;
    std::string proposition;
    fs::path pro_corpus;
    fs::path con_corpus;
};

struct SweepSection {
    int rounds = 15;
    int seeds = 10;
    double target = 0.99;
    std::vector<double> u_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> a_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
    double fixed_a = 0.70;
    double fixed_u = 0.40;
    int trials = 1;
    fs::path seed_corpus;
    fs::path opponent_script;
};

struct DebateSection {
    int rounds = 15;
    int seeds = 10;
    double pro_target = 0.75;
    double con_target = -0.75;
    int trials = 3;
    fs::path pro_corpus;
    fs::path con_corpus;
    std::vector<std::string> profiles = {"Open", "Stubborn"};
};

struct ReplaySection {
    fs::path cases;
    CalibrationGrid grid = CalibrationGrid::replay_default();
    int folds = 5;
    FoldKey key = FoldKey::group;
    double eps_weak = kDefaultWeakSignal;
    double clip = kDefaultStanceClip;
    double theta = 0.85;
    bool strict = false;
};

struct RunConfig {
    fs::path source;  // the config file itself
    std::string topic = "We should introduce compulsory voting";
    std::uint64_t seed = 42;
    std::optional<fs::path> out;
    EngineOverrides engine;
    SweepSection sweep;
    DebateSection debate;
    std::map<std::string, UAProfile> profiles = {{"Open", kOpenMinded}, {"Stubborn", kStubborn}};
    std::vector<TopicSpec> topics;  // extra debate topics
    ReplaySection replay;
    PortsConfig ports;
};

namespace detail {

using boost::property_tree::ptree;

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class Section {
public:
    Section(std::string name, const ptree& tree, fs::path base)
        : name_(std::move(name)), tree_(tree), base_(std::move(base)) {}

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    std::optional<std::string> raw(const std::string& key) {
        seen_.insert(key);
        const auto it = tree_.find(key);
        if (it == tree_.not_found()) return std::nullopt;
        return trim(it->second.data());
    }

    void str(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = *v;
    }

    template <typename T>
    void num(const std::string& key, T& out) {
        if (auto v = raw(key)) out = parse<T>(key, *v);
    }

    template <typename T>
    void num(const std::string& key, std::optional<T>& out) {
        if (auto v = raw(key)) out = parse<T>(key, *v);
    }

    void list(const std::string& key, std::vector<double>& out) {
        if (auto v = raw(key)) {
            out.clear();
            for (const auto& item : split(*v, ',')) out.push_back(parse<double>(key, item));
        }
    }

    void names(const std::string& key, std::vector<std::string>& out) {
        if (auto v = raw(key)) out = split(*v, ',');
    }

    void path(const std::string& key, fs::path& out) {
        if (auto v = raw(key)) {
            if (v->empty()) throw ConfigError(where(key) + ": empty path");
            fs::path p(*v);
            out = p.is_absolute() ? p : (base_ / p).lexically_normal();
        }
    }

    void flag(const std::string& key, bool& out) {
        if (auto v = raw(key)) {
            if (*v == "true" || *v == "1" || *v == "yes") out = true;
            else if (*v == "false" || *v == "0" || *v == "no") out = false;
            else throw ConfigError(where(key) + ": expected true or false, got '" + *v + "'");
        }
    }

    void reject_unknown() const {
        for (const auto& [k, v] : tree_)
            if (!seen_.contains(k)) throw ConfigError("unknown key " + where(k));
    }

private:
    template <typename T>
    T parse(const std::string& key, const std::string& text) const {
        std::istringstream in(text);
        T value{};
        in >> value;
        if (!in || !(in >> std::ws).eof())
            throw ConfigError(where(key) + ": cannot parse '" + text + "'");
        return value;
    }

    std::string name_;
    const ptree& tree_;
    fs::path base_;
    std::set<std::string> seen_;
};

} // namespace detail

inline RunConfig parse_config(const std::string& text, const fs::path& source = {}) {
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config " + source.string() + ": line " + std::to_string(e.line()) + ": " + e.message());
    }

    RunConfig cfg;
    cfg.source = source;
    const fs::path base = source.empty() ? fs::current_path() : fs::absolute(source).parent_path();

    for (const auto& [name, body] : tree) {
        if (!body.data().empty() && body.empty()) throw ConfigError("key '" + name + "' outside any section");
        detail::Section s(name, body, base);
        if (name == "run") {
            s.str("topic", cfg.topic);
            s.num("seed", cfg.seed);
            fs::path out;
            s.path("out", out);
            if (!out.empty()) cfg.out = out;
        } else if (name == "engine") {
            s.num("theta", cfg.engine.theta);
            s.num("theta_self", cfg.engine.theta_self);
            s.num("k", cfg.engine.k);
            s.num("history_window", cfg.engine.history_window);
            if (auto v = s.raw("bin_labels")) {
                const auto labels = detail::split(*v, '|');
                if (labels.size() != 10) throw ConfigError("[engine] bin_labels needs exactly 10 labels");
                BinLabels arr;
                std::copy(labels.begin(), labels.end(), arr.begin());
                cfg.engine.bin_labels = arr;
            }
        } else if (name == "sweep") {
            auto& w = cfg.sweep;
            s.num("rounds", w.rounds);
            s.num("seeds", w.seeds);
            s.num("target", w.target);
            s.list("u_grid", w.u_grid);
            s.list("a_grid", w.a_grid);
            s.num("fixed_a", w.fixed_a);
            s.num("fixed_u", w.fixed_u);
            s.num("trials", w.trials);
            s.path("seed_corpus", w.seed_corpus);
            s.path("opponent_script", w.opponent_script);
        } else if (name == "debate") {
            auto& d = cfg.debate;
            s.num("rounds", d.rounds);
            s.num("seeds", d.seeds);
            s.num("pro_target", d.pro_target);
            s.num("con_target", d.con_target);
            s.num("trials", d.trials);
            s.path("pro_corpus", d.pro_corpus);
            s.path("con_corpus", d.con_corpus);
            s.names("profiles", d.profiles);
        } else if (name.starts_with("profile.")) {
            UAProfile p{};
            s.num("u", p.uptake);
            s.num("a", p.anchoring);
            cfg.profiles[name.substr(8)] = p;
        } else if (name.starts_with("topic.")) {
            TopicSpec t;
            t.name = name.substr(6);
            s.str("proposition", t.proposition);
            s.path("pro_corpus", t.pro_corpus);
            s.path("con_corpus", t.con_corpus);
            cfg.topics.push_back(std::move(t));
        } else if (name == "replay") {
            auto& r = cfg.replay;
            s.path("cases", r.cases);
            s.list("u_grid", r.grid.u);
            s.list("a_grid", r.grid.a);
            s.num("folds", r.folds);
            if (auto v = s.raw("key")) {
                if (*v == "group") r.key = FoldKey::group;
                else if (*v == "topic") r.key = FoldKey::topic;
                else throw ConfigError("[replay] key must be group or topic");
            }
            s.num("eps_weak", r.eps_weak);
            s.num("clip", r.clip);
            s.num("theta", r.theta);
            s.flag("strict", r.strict);
        } else if (name == "ports") {
            auto& p = cfg.ports;
            s.str("scorer", p.scorer);
            s.str("extractor", p.extractor);
            s.str("generator", p.generator);
            s.num("timeout", p.timeout);
            s.num("retries", p.retries);
            s.num("max_in_flight", p.max_in_flight);
        } else {
            throw ConfigError("unknown section [" + name + "]");
        }
        s.reject_unknown();
    }
    return cfg;
}

inline RunConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), file);
}

// Service URLs from the environment replace the configured ports.
inline void apply_environment(RunConfig& cfg) {
    const std::pair<const char*, std::string*> vars[] = {{"BELIEF_SCORER_URL", &cfg.ports.scorer},
                                                         {"BELIEF_EXTRACTOR_URL", &cfg.ports.extractor},
                                                         {"BELIEF_GENERATOR_URL", &cfg.ports.generator}};
    for (const auto& [name, target] : vars)
        if (const char* v = std::getenv(name); v && *v) *target = v;
}

inline bool is_service_url(const std::string& s) { return s.starts_with("http://") || s.starts_with("https://"); }

inline void validate_ports(const PortsConfig& p) {
    if (!(p.scorer == "table" || p.scorer == "builtin" || is_service_url(p.scorer)))
        throw ConfigError("[ports] scorer must be table, builtin or a service URL");
    if (!(p.extractor == "scripted" || is_service_url(p.extractor)))
        throw ConfigError("[ports] extractor must be scripted or a service URL");
    if (!(p.generator == "template" || is_service_url(p.generator)))
        throw ConfigError("[ports] generator must be template or a service URL");
    if (!(p.timeout > 0)) throw ConfigError("[ports] timeout must be positive");
    if (p.retries < 0) throw ConfigError("[ports] retries must be >= 0");
    if (p.max_in_flight < 1) throw ConfigError("[ports] max_in_flight must be >= 1");
    for (const auto* url : {&p.scorer, &p.extractor, &p.generator})
        if (is_service_url(*url)) parse_url(*url);
}

inline nlohmann::json grid_json(const std::vector<double>& v) { return nlohmann::json(v); }

// Canonical JSON snapshot of everything a command used.
inline nlohmann::json resolved_json(const RunConfig& cfg, const std::string& command, const EngineConfig& engine) {
    using nlohmann::json;
    json j;
    j["command"] = command;
    j["config_file"] = cfg.source.string();
    j["topic"] = cfg.topic;
    j["seed"] = cfg.seed;
    j["engine"] = {{"theta", engine.theta},
                   {"theta_self", engine.theta_self},
                   {"k", engine.k},
                   {"history_window", engine.history_window},
                   {"bin_labels", engine.bin_labels}};
    j["ports"] = {{"scorer", cfg.ports.scorer},       {"extractor", cfg.ports.extractor},
                  {"generator", cfg.ports.generator}, {"timeout", cfg.ports.timeout},
                  {"retries", cfg.ports.retries},     {"max_in_flight", cfg.ports.max_in_flight}};
    if (command == "sweep") {
        const auto& w = cfg.sweep;
        j["sweep"] = {{"rounds", w.rounds},         {"seeds", w.seeds},
                      {"target", w.target},         {"u_grid", grid_json(w.u_grid)},
                      {"a_grid", grid_json(w.a_grid)}, {"fixed_a", w.fixed_a},
                      {"fixed_u", w.fixed_u},       {"trials", w.trials},
                      {"seed_corpus", w.seed_corpus.string()}, {"opponent_script", w.opponent_script.string()}};
    } else if (command == "debate") {
        const auto& d = cfg.debate;
        j["debate"] = {{"rounds", d.rounds},         {"seeds", d.seeds},
                       {"pro_target", d.pro_target}, {"con_target", d.con_target},
                       {"trials", d.trials},         {"pro_corpus", d.pro_corpus.string()},
                       {"con_corpus", d.con_corpus.string()}, {"profiles", d.profiles}};
        json profiles = json::object();
        for (const auto& name : d.profiles)
            if (auto it = cfg.profiles.find(name); it != cfg.profiles.end())
                profiles[name] = {{"u", it->second.uptake}, {"a", it->second.anchoring}};
        j["profiles"] = profiles;
        json topics = json::array();
        for (const auto& t : cfg.topics)
            topics.push_back({{"name", t.name},
                              {"proposition", t.proposition},
                              {"pro_corpus", t.pro_corpus.string()},
                              {"con_corpus", t.con_corpus.string()}});
        j["topics"] = topics;
    } else if (command == "replay") {
        const auto& r = cfg.replay;
        j["replay"] = {{"cases", r.cases.string()},
                       {"u_grid", grid_json(r.grid.u)},
                       {"a_grid", grid_json(r.grid.a)},
                       {"folds", r.folds},
                       {"key", r.key == FoldKey::group ? "group" : "topic"},
                       {"eps_weak", r.eps_weak},
                       {"clip", r.clip},
                       {"theta", r.theta},
                       {"strict", r.strict}};
    }
    return j;
}

} // namespace belief
