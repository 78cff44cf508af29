// Writes a synthetic replay population as JSONL. Movers follow the replay
// model at the given (u, a) so calibration has a known answer.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "belief/synthetic.hpp"

int main(int argc, char** argv) {
    belief::SyntheticConfig cfg;
    std::string out = "-";
    CLI::App app{"Generate a synthetic replay population"};
    app.add_option("--cases", cfg.cases);
    app.add_option("--u", cfg.profile.uptake);
    app.add_option("--a", cfg.profile.anchoring);
    app.add_option("--noise", cfg.noise_sd);
    app.add_option("--stable", cfg.stable_share, "share of participants who never move");
    app.add_option("--anti", cfg.anti_share, "share moving against the evidence");
    app.add_option("--profile", cfg.profile_share, "share following the profile");
    app.add_option("--seed", cfg.seed);
    app.add_option("--out", out, "output file, '-' for stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto pop = belief::generate_population(cfg);
        std::ofstream file;
        if (out != "-") {
            file.open(out);
            if (!file) throw std::runtime_error("cannot write " + out);
        }
        std::ostream& os = out == "-" ? std::cout : file;
        for (const auto& s : pop) os << belief::case_to_json(s.c).dump() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
