#pragma once

// Explicit Euler integration of x' = -L q(x) with the uniform quantizer, plus the
// unquantized baseline x' = -L x and diagnostics on the resulting traces.
//
// At points exactly on a discontinuity surface the step uses the floor convention of
// the quantizer, which is one particular selection from the Krasowskii set; any other
// selection gives a different discrete path but the same invariants.

#include <cstddef>
#include <span>
#include <vector>

#include "qcons/graph.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/trace.hpp"

namespace qcons {

struct EulerConfig {
    double dt = 0.005;
    double horizon = 10.0;
    std::size_t record_stride = 1;

    /// Throws InvalidArgument on dt <= 0, horizon < dt or a zero stride.
    void validate() const;
    [[nodiscard]] std::size_t steps() const;
};

using KrasowskiiTrace = SampledTrace;

/// x_{k+1} = x_k - dt L q(x_k). Records step 0, every record_stride-th step, and the
/// last step. Errors: NotBalanced, NotConnected, NonFinite, InvalidArgument.
KrasowskiiTrace simulate_euler_quantized(std::span<const double> x0, const WeightedDigraph& g,
                                         const QuantizerSpec& spec, const EulerConfig& cfg);

/// x_{k+1} = x_k - dt L x_k. Levels are still recorded (uniform quantization of x) so the
/// result can be exported like any other trace.
KrasowskiiTrace simulate_euler_linear(std::span<const double> x0, const WeightedDigraph& g,
                                      const QuantizerSpec& spec, const EulerConfig& cfg);

struct ChatterReport {
    double window = 0.0;
    std::vector<std::size_t> flip_counts;  ///< max alternations inside any window
    std::vector<bool> chattering;

    [[nodiscard]] bool any() const;
};

inline constexpr double kDefaultChatterWindowSteps = 50.0;
inline constexpr std::size_t kDefaultFlipThreshold = 10;

/// A flip is a level change of at most one quantum that returns the agent to the level
/// it held before its previous change. An agent is flagged when some window of the given
/// length holds at least flip_threshold flips. Errors: EmptyTrace, InvalidArgument when
/// the window is shorter than the sampling interval.
ChatterReport detect_chattering(const SampledTrace& trace, double window,
                                std::size_t flip_threshold = kDefaultFlipThreshold);

/// Membership in the closure of the equilibrium set: some k with
/// (k - 1/2) delta <= x_i <= (k + 1/2) delta for all i.
bool in_equilibria_closure(std::span<const double> x, const QuantizerSpec& spec);

/// Euclidean distance to that closure, scanning the cubes that can be nearest.
double dist_to_equilibria(std::span<const double> x, const QuantizerSpec& spec);

inline constexpr double kInvarianceTolerance = 1e-9;

/// True iff every recorded state is within `tolerance` of the equilibrium closure.
/// Throws StartNotInClosure when the first state is not.
bool check_strong_invariance(const SampledTrace& trace, const QuantizerSpec& spec,
                             double tolerance = kInvarianceTolerance);

}  // namespace qcons
