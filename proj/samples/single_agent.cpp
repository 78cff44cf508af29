// One agent hears three messages and prints its belief after each, then
// checks its own trace. Run with an optional trace path argument.

#include <cstdio>
#include <filesystem>

#include "belief/engine.hpp"
#include "belief/verify.hpp"

using namespace belief;

int main(int argc, char** argv) {
    const std::filesystem::path trace = argc > 1 ? argv[1] : "single_agent_trace.jsonl";
    TraceSink sink(trace);

    auto scorer = std::make_shared<TableScorer>();
    Ports ports;
    ports.scorer = scorer;

    Agent agent("listener", "Cities should ban cars from their centres", UAProfile{0.4, 0.7, 0.0}, EngineConfig{},
                ports, &sink);

    const char* script[] = {
        "CLAIM +0.8: Car-free streets cut roadside air pollution\n"
        "CLAIM -0.6: Delivery traffic still needs access to shops",
        "CLAIM +0.7: Pedestrian zones raise footfall for local shops",
        "CLAIM +0.8: Car-free streets cut roadside air pollution",  // repeat, judged as a duplicate
    };
    std::int64_t order = 0;
    for (const char* text : script) {
        agent.process_message(Message{text, AuthorRole::opponent, ++order});
        std::printf("after message %lld: L=%+.4f S=%+.4f records=%zu\n", static_cast<long long>(order),
                    agent.belief().log_odds(), agent.belief().stance(), agent.memory().size());
    }
    sink.close();

    const auto agents = verify_events(read_trace_file(trace));
    std::printf("trace %s verified for %zu agent(s)\n", trace.string().c_str(), agents.size());
    return 0;
}
