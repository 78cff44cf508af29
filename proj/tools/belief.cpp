// belief: command-line front end for sweeps, debates, replay and trace checks.

#include <CLI11.hpp>

#include "belief/app.hpp"

namespace {

void add_common(CLI::App* cmd, belief::CommandOptions& opt, std::string& out) {
    cmd->add_option("--config", opt.config, "INI configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (overrides [run] out)");
    cmd->add_option("--seed", opt.seed, "master RNG seed (overrides [run] seed)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Auditable belief engine: sweeps, debates, replay and trace verification"};
    app.require_subcommand(1);

    belief::CommandOptions opt;
    std::string out;
    std::string key;

    auto* sweep = app.add_subcommand("sweep", "scripted-opponent sweeps over uptake and anchoring");
    add_common(sweep, opt, out);
    auto* debate = app.add_subcommand("debate", "two-agent debates over every profile pairing");
    add_common(debate, opt, out);
    auto* replay = app.add_subcommand("replay", "calibrate profiles against recorded stance changes");
    add_common(replay, opt, out);
    replay->add_option("--key", key, "fold key")->check(CLI::IsMember({"group", "topic"}));
    replay->add_flag("--strict", opt.strict, "treat malformed case lines as fatal");
    auto* verify = app.add_subcommand("trace-verify", "recompute a trace and check its digest chain");
    verify->add_option("trace", opt.trace, "trace file (.jsonl)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? belief::kExitOk : belief::kExitValidation;
    }

    if (!out.empty()) opt.out = out;
    if (!key.empty()) opt.key = key == "group" ? belief::FoldKey::group : belief::FoldKey::topic;

    if (sweep->parsed()) return belief::cmd_sweep(opt);
    if (debate->parsed()) return belief::cmd_debate(opt);
    if (replay->parsed()) return belief::cmd_replay(opt);
    return belief::cmd_trace_verify(opt);
}
