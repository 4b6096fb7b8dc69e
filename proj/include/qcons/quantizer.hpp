#pragma once

// Uniform quantizer, its Krasowskii regularization, and the hysteretic update.
//
// All discrete levels are exact integers k counting half-quanta (value k*delta/2).
// The uniform quantizer only produces even k; the hysteretic quantizer uses any k.
//
// For a piecewise-constant quantizer the closed convex hull of q(B(x, r)) for small r
// is the convex hull of the finitely many corner values reachable around x. Those
// corners form the Cartesian product of the per-component sets ({k} or {k, k+1}
// quanta), and the hull of a finite product is the product of the hulls. So the
// Krasowskii set of the quantizer is exactly the box below, and K(-L q(x)) is the
// image of that box under -L.

#include <cstddef>
#include <cstdint>
#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "qcons/graph.hpp"

namespace qcons {

class QuantizerSpec {
public:
    /// Throws InvalidArgument unless delta is positive and finite.
    explicit QuantizerSpec(double delta);

    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double half() const noexcept { return 0.5 * delta_; }

private:
    double delta_;
};

/// The level k*delta/2.
struct HalfQuantum {
    std::int64_t k = 0;

    [[nodiscard]] double value(const QuantizerSpec& spec) const {
        return static_cast<double>(k) * spec.half();
    }
    [[nodiscard]] bool on_uniform_grid() const noexcept { return k % 2 == 0; }

    friend auto operator<=>(const HalfQuantum&, const HalfQuantum&) = default;
};

using Levels = std::vector<HalfQuantum>;

std::vector<double> level_values(std::span<const HalfQuantum> q, const QuantizerSpec& spec);
std::vector<std::int64_t> level_indices(std::span<const HalfQuantum> q);

/// floor(x/delta + 1/2) * delta. Throws NonFinite.
HalfQuantum uniform_quantize(double x, const QuantizerSpec& spec);
Levels uniform_quantize(std::span<const double> x, const QuantizerSpec& spec);

/// -L q, evaluated from integer level differences so that identical differences give
/// bit-identical velocities.
std::vector<double> consensus_velocity(const WeightedDigraph& g, std::span<const HalfQuantum> q,
                                       const QuantizerSpec& spec);

struct LevelInterval {
    HalfQuantum lo;
    HalfQuantum hi;
    [[nodiscard]] bool degenerate() const noexcept { return lo == hi; }
    friend bool operator==(const LevelInterval&, const LevelInterval&) = default;
};

struct KrasowskiiBox {
    std::vector<LevelInterval> components;
    [[nodiscard]] std::size_t boundary_count() const;
};

/// Relative width (in units of delta) of the band treated as a cell boundary.
inline constexpr double kBoundaryTolerance = 1e-12;

KrasowskiiBox krasowskii_box(std::span<const double> x, const QuantizerSpec& spec);

inline constexpr std::size_t kMaxBoundaryComponents = 20;

/// Distinct vertices of -L * box, sorted lexicographically. Throws TooManyVertices when
/// more than 2^20 box corners would be enumerated.
std::vector<std::vector<double>> krasowskii_velocity_polytope(std::span<const double> x,
                                                              const WeightedDigraph& g,
                                                              const QuantizerSpec& spec);

enum class BlockingVerdict { SameSign, Blocking, Tangent };

struct BlockingResult {
    BlockingVerdict verdict;
    double f_plus;   ///< normal velocity component just above the surface
    double f_minus;  ///< normal velocity component just below the surface
};

/// Sign test on the discontinuity surface x_node = (k + 1/2) delta. Blocking means
/// no Caratheodory solution leaves x. Throws PreconditionViolated if x_node is not on a
/// surface or another component is, and NotBalanced for unbalanced graphs.
BlockingResult caratheodory_blocking_test(std::span<const double> x, std::size_t node,
                                          const WeightedDigraph& g, const QuantizerSpec& spec);

/// Hysteretic quantizer start: q = uniform_quantize(x).
Levels hysteresis_init(std::span<const double> x, const QuantizerSpec& spec);

/// True iff some x_i <= q_i - delta/2 or x_i >= q_i + delta/2.
bool in_jump_set(std::span<const double> x, std::span<const HalfQuantum> q,
                 const QuantizerSpec& spec);

/// Simultaneous update: every component at or beyond its upper threshold moves up by
/// half a quantum, every one at or below its lower threshold moves down. Throws
/// NotInJumpSet when nothing triggers.
Levels hysteresis_jump(std::span<const double> x, std::span<const HalfQuantum> q,
                       const QuantizerSpec& spec);

}  // namespace qcons
