#include "qcons/trace.hpp"

#include <cstdio>
#include <string>

namespace qcons {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const SampledTrace& trace) {
    const std::size_t n = trace.agents();
    const bool hybrid = !trace.jump_counter.empty();
    const QuantizerSpec spec(trace.delta);

    out << 't';
    if (hybrid) out << ",j";
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",q" << i;
    out << '\n';

    for (std::size_t r = 0; r < trace.size(); ++r) {
        out << fmt17(trace.times[r]);
        if (hybrid) out << ',' << trace.jump_counter[r];
        for (double x : trace.states[r]) out << ',' << fmt17(x);
        for (const auto& q : trace.levels[r]) out << ',' << fmt17(q.value(spec));
        out << '\n';
    }
}

nlohmann::json trace_to_json(const SampledTrace& trace) {
    nlohmann::json j;
    j["delta"] = trace.delta;
    j["times"] = trace.times;
    j["states"] = trace.states;
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& q : trace.levels) levels.push_back(level_indices(q));
    j["levels"] = std::move(levels);
    if (!trace.jump_counter.empty()) j["j"] = trace.jump_counter;
    return j;
}

}  // namespace qcons
