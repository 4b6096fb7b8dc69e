#pragma once

// Closed-form convergence bounds for quantized consensus and their checks on traces.
//
// With y = x - mean(x) 1, both the Krasowskii and the hysteretic dynamics satisfy
// ||y(t)|| <= radius(eps) := (1/(1-eps)) (||L|| / lambda2) (delta/2) sqrt(N)
// for every t >= T(eps), where
// T(eps) = max{0, -1/(eps lambda2) ln(radius(eps) / ||y(0)||)}.

#include <cstddef>
#include <optional>
#include <span>

#include <json.hpp>

#include "qcons/graph.hpp"
#include "qcons/hybrid.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/trace.hpp"

namespace qcons {

/// ||x - mean(x) 1||.
double disagreement(std::span<const double> x);

/// ||x - c 1|| for a fixed reference average c.
double disagreement_from(std::span<const double> x, double average);

inline constexpr double kDefaultEpsilon = 0.5;

/// Bound on ||x - x_ave 1||; eps = 0 gives the asymptotic strip. Throws InvalidArgument
/// unless 0 <= eps < 1.
double strip_radius(const SpectralData& s, std::size_t n, const QuantizerSpec& spec, double eps);
double strip_radius(const WeightedDigraph& g, const QuantizerSpec& spec, double eps);

/// Per-agent form: strip_radius / sqrt(N).
double normalized_strip_radius(const WeightedDigraph& g, const QuantizerSpec& spec, double eps);

/// Requires 0 < eps < 1 and y0_norm > 0.
double convergence_time(const SpectralData& s, std::size_t n, const QuantizerSpec& spec,
                        double eps, double y0_norm);
double convergence_time(const WeightedDigraph& g, const QuantizerSpec& spec, double eps,
                        double y0_norm);

struct BoundsReport {
    std::size_t n = 0;
    double delta = 0.0;
    double epsilon = kDefaultEpsilon;
    double lambda2 = 0.0;
    double norm_L = 0.0;
    double norm_L_inf = 0.0;
    double radius_M = 0.0;
    double radius_M_eps = 0.0;
    std::optional<double> y0_norm;
    std::optional<double> T_eps;
};

BoundsReport bounds_report(const WeightedDigraph& g, const QuantizerSpec& spec,
                           double eps = kDefaultEpsilon,
                           std::optional<double> y0_norm = std::nullopt);

nlohmann::json bounds_to_json(const BoundsReport& b);

struct StripEntryReport {
    double radius = 0.0;
    double T_eps = 0.0;
    double initial_disagreement = 0.0;
    bool initially_inside = false;
    std::optional<double> first_entry;  ///< first recorded time inside the strip
    std::size_t checked = 0;            ///< samples at or after T_eps
    std::size_t violations = 0;
    std::optional<double> first_violation;
    double max_after_T = 0.0;

    [[nodiscard]] bool satisfied() const { return violations == 0; }
};

inline constexpr double kStripTolerance = 1e-6;

/// Disagreement (against the initial average) at every recorded sample with t >= T(eps)
/// must be at most radius(eps) + tolerance.
StripEntryReport check_strip_entry(const SampledTrace& trace, const WeightedDigraph& g,
                                   const QuantizerSpec& spec, double eps = kDefaultEpsilon,
                                   double tolerance = kStripTolerance);

/// Hybrid flows are straight segments and the disagreement is convex, so checking the
/// endpoints of every flow covers the whole trajectory.
StripEntryReport check_strip_entry(const HybridTrace& trace, const WeightedDigraph& g,
                                   const QuantizerSpec& spec, double eps = kDefaultEpsilon,
                                   double tolerance = kStripTolerance);

nlohmann::json strip_entry_to_json(const StripEntryReport& r);

}  // namespace qcons
