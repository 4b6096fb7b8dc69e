#pragma once

// Event-driven simulation of consensus with hysteretic quantizers.
//
//   flow:  x' = -L q,  q' = 0            while q_i - delta/2 < x_i < q_i + delta/2 for all i
//   jump:  x+ = x,     q_i+ = q_i +- delta/2 for every agent at or past a threshold
//
// Between jumps the velocity is constant, so each flow is a straight segment and the
// next jump time is the smallest root of a scalar linear equation. No time stepping.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcons/graph.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/trace.hpp"

namespace qcons {

struct HybridState {
    std::vector<double> x;
    Levels q;
    double t = 0.0;
    std::size_t j = 0;
};

/// Strict interior of every hysteresis band.
bool in_flow_set(const HybridState& z, const QuantizerSpec& spec);

/// q_i - delta/2 <= x_i < q_i + delta/2 for all i.
bool in_initial_set(std::span<const double> x, std::span<const HalfQuantum> q,
                    const QuantizerSpec& spec);

/// q = uniform_quantize(x0). If that start sits on a lower threshold, the single
/// initial jump is applied and j = 1.
HybridState hybrid_init(std::span<const double> x0, const QuantizerSpec& spec);

/// Same with explicit discrete levels; throws PreconditionViolated outside the
/// initial set.
HybridState hybrid_init(std::span<const double> x0, std::span<const HalfQuantum> q0,
                        const QuantizerSpec& spec);

struct NextEvent {
    double dt = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> triggered;

    [[nodiscard]] bool finite() const noexcept { return dt < std::numeric_limits<double>::infinity(); }
};

/// Relative tolerance for grouping threshold crossings into one jump.
inline constexpr double kSimultaneityTolerance = 1e-12;

/// Time to the next threshold crossing under the constant velocity -L q.
/// Throws StateInJumpSet if the state is not in the open flow set.
NextEvent next_event(const HybridState& z, const WeightedDigraph& g, const QuantizerSpec& spec);

struct FlowInterval {
    double t0 = 0.0;
    double t1 = 0.0;
    std::size_t j = 0;
    std::vector<double> x0;
    Levels q;
    std::vector<double> velocity;
    bool open_ended = false;  ///< no further event: the flow would continue forever

    [[nodiscard]] std::vector<double> x_at(double t) const;
    [[nodiscard]] std::vector<double> x_end() const { return x_at(t1); }
};

struct JumpEvent {
    double t = 0.0;
    std::size_t j = 0;  ///< counter before the jump; the state after it lives at j + 1
    std::vector<double> x;
    Levels q_before;
    Levels q_after;
    std::vector<std::size_t> triggered;
};

enum class HybridStatus { Completed, MaxJumpsExceeded };

struct HybridTrace {
    double delta = 1.0;
    double horizon = 0.0;
    double end_time = 0.0;
    HybridStatus status = HybridStatus::Completed;
    std::vector<FlowInterval> flows;
    std::vector<JumpEvent> jumps;

    [[nodiscard]] const Levels& initial_levels() const { return flows.front().q; }
    [[nodiscard]] const std::vector<double>& initial_state() const { return flows.front().x0; }
    [[nodiscard]] HybridState final_state() const;

    /// Samples at 0, stride, 2 stride, ... up to end_time. At a jump instant the
    /// post-jump state is reported.
    [[nodiscard]] SampledTrace sample(double stride) const;
};

inline constexpr std::size_t kDefaultMaxJumps = 1'000'000;

/// Alternates exact flows and jumps until the horizon or max_jumps jumps.
/// Errors: NotBalanced, NotConnected, InvalidArgument. Hitting max_jumps is not an
/// error: the truncated trace comes back with status MaxJumpsExceeded.
HybridTrace simulate_hybrid(std::span<const double> x0, const WeightedDigraph& g,
                            const QuantizerSpec& spec, double horizon,
                            std::size_t max_jumps = kDefaultMaxJumps);

HybridTrace simulate_hybrid(std::span<const double> x0, std::span<const HalfQuantum> q0,
                            const WeightedDigraph& g, const QuantizerSpec& spec, double horizon,
                            std::size_t max_jumps = kDefaultMaxJumps);

/// Minimum time between two consecutive jumps of one agent:
/// (delta/2) / (||L||_inf (||q0||_inf + delta/2)).
double dwell_time_bound(const WeightedDigraph& g, std::span<const HalfQuantum> q0,
                        const QuantizerSpec& spec);

/// Bits needed per transmitted level.
unsigned bits_per_level(std::span<const HalfQuantum> q0, const QuantizerSpec& spec);

/// Per-agent transmission rate bound: bits_per_level / dwell_time_bound.
double data_rate_bound(const WeightedDigraph& g, std::span<const HalfQuantum> q0,
                       const QuantizerSpec& spec);

struct CycleReport {
    bool found = false;
    double entry_time = 0.0;
    double period = 0.0;
    std::size_t entry_jump = 0;
    std::size_t jumps_per_period = 0;
    std::vector<HybridState> states;         ///< post-jump states over one period
    std::vector<std::int64_t> amplitude;     ///< per-agent max q - min q, in half-quanta
};

inline constexpr double kCycleStateTolerance = 1e-9;

/// First recurrence of a post-jump state (q equal, x within 1e-9), confirmed by one
/// further period of the trace.
CycleReport detect_limit_cycle(const HybridTrace& trace);

/// All levels equal to one k*delta or one k*delta + delta/2, x strictly inside its band.
bool in_hybrid_equilibria(const HybridState& z, const QuantizerSpec& spec);

struct CheckResult {
    bool pass = true;
    std::string witness;
};

struct DwellReport {
    double dwell_bound = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    double rate_bound = 0.0;
    double max_rate = 0.0;
    CheckResult dwell;
    CheckResult bounds;
    CheckResult data_rate;

    [[nodiscard]] bool all_pass() const { return dwell.pass && bounds.pass && data_rate.pass; }
};

/// Checks per-agent inter-jump gaps against dwell_time_bound, the level and state
/// envelopes around the initial levels, and the observed per-agent bit rate
/// (jumps - 1) * B / (last jump - first jump) against data_rate_bound.
DwellReport verify_dwell_and_bounds(const HybridTrace& trace, const WeightedDigraph& g,
                                    const QuantizerSpec& spec);

/// {"delta", "horizon", "end_time", "status", "flows": [{t0,t1,j,x0,q}],
///  "jumps": [{t,j,triggered,q_before,q_after}]}; levels in half-quanta.
nlohmann::json hybrid_trace_to_json(const HybridTrace& trace);

std::string_view to_string(HybridStatus status) noexcept;

}  // namespace qcons
