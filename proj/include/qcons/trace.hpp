#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "qcons/quantizer.hpp"

namespace qcons {

/// Time-sampled trajectory: states x(t_k) and the discrete levels held at t_k.
/// Euler runs fill it directly; hybrid runs produce one by sampling and then also
/// carry the jump counter of each sample.
struct SampledTrace {
    double delta = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<Levels> levels;
    std::vector<std::size_t> jump_counter;  ///< empty for time-stepped traces

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
    [[nodiscard]] std::size_t agents() const noexcept {
        return states.empty() ? 0 : states.front().size();
    }
    [[nodiscard]] QuantizerSpec spec() const { return QuantizerSpec(delta); }
};

/// Header `t[,j],x1..xn,q1..qn`, one row per sample, 17 significant digits.
void write_csv(std::ostream& out, const SampledTrace& trace);

/// {"delta", "times", "states", "levels" (half-quanta), ["j"]}
nlohmann::json trace_to_json(const SampledTrace& trace);

}  // namespace qcons
