#include "qcons/metrics.hpp"

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "qcons/errors.hpp"

namespace qcons {

double disagreement_from(std::span<const double> x, double average) {
    double s = 0.0;
    for (double v : x) s += (v - average) * (v - average);
    return std::sqrt(s);
}

double disagreement(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    return disagreement_from(x, mean);
}

double strip_radius(const SpectralData& s, std::size_t n, const QuantizerSpec& spec, double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must be in [0, 1)");
    if (!(s.lambda2_sym > 0.0)) throw Error(Errc::NotConnected, "lambda2 must be positive");
    return (1.0 / (1.0 - eps)) * (s.norm_L_spectral / s.lambda2_sym) * spec.half() *
           std::sqrt(static_cast<double>(n));
}

double strip_radius(const WeightedDigraph& g, const QuantizerSpec& spec, double eps) {
    return strip_radius(spectral_data(g), g.size(), spec, eps);
}

double normalized_strip_radius(const WeightedDigraph& g, const QuantizerSpec& spec, double eps) {
    return strip_radius(g, spec, eps) / std::sqrt(static_cast<double>(g.size()));
}

double convergence_time(const SpectralData& s, std::size_t n, const QuantizerSpec& spec,
                        double eps, double y0_norm) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must be in (0, 1)");
    if (!(y0_norm > 0.0)) throw Error(Errc::InvalidArgument, "initial disagreement must be positive");
    const double ratio = strip_radius(s, n, spec, eps) / y0_norm;
    return std::max(0.0, (-1.0 / (eps * s.lambda2_sym)) * std::log(ratio));
}

double convergence_time(const WeightedDigraph& g, const QuantizerSpec& spec, double eps,
                        double y0_norm) {
    return convergence_time(spectral_data(g), g.size(), spec, eps, y0_norm);
}

BoundsReport bounds_report(const WeightedDigraph& g, const QuantizerSpec& spec, double eps,
                           std::optional<double> y0_norm) {
    const auto s = spectral_data(g);
    BoundsReport b;
    b.n = g.size();
    b.delta = spec.delta();
    b.epsilon = eps;
    b.lambda2 = s.lambda2_sym;
    b.norm_L = s.norm_L_spectral;
    b.norm_L_inf = s.norm_L_inf;
    b.radius_M = strip_radius(s, b.n, spec, 0.0);
    b.radius_M_eps = strip_radius(s, b.n, spec, eps);
    if (y0_norm && *y0_norm > 0.0) {
        b.y0_norm = y0_norm;
        b.T_eps = convergence_time(s, b.n, spec, eps, *y0_norm);
    }
    return b;
}

nlohmann::json bounds_to_json(const BoundsReport& b) {
    nlohmann::json j{{"n", b.n},
                     {"delta", b.delta},
                     {"epsilon", b.epsilon},
                     {"lambda2", b.lambda2},
                     {"norm_L", b.norm_L},
                     {"norm_L_inf", b.norm_L_inf},
                     {"radius_M", b.radius_M},
                     {"radius_M_eps", b.radius_M_eps}};
    if (b.y0_norm) j["y0_norm"] = *b.y0_norm;
    if (b.T_eps) j["T_eps"] = *b.T_eps;
    return j;
}

namespace {

StripEntryReport check_samples(const std::vector<std::pair<double, std::vector<double>>>& samples,
                               const WeightedDigraph& g, const QuantizerSpec& spec, double eps,
                               double tolerance) {
    StripEntryReport r;
    if (samples.empty()) return r;
    const auto& x0 = samples.front().second;
    const double average =
        std::accumulate(x0.begin(), x0.end(), 0.0) / static_cast<double>(x0.size());
    const auto s = spectral_data(g);
    r.radius = strip_radius(s, g.size(), spec, eps);
    r.initial_disagreement = disagreement_from(x0, average);
    r.initially_inside = r.initial_disagreement <= r.radius;
    r.T_eps = r.initial_disagreement > 0.0
                  ? convergence_time(s, g.size(), spec, eps, r.initial_disagreement)
                  : 0.0;

    for (const auto& [t, x] : samples) {
        const double d = disagreement_from(x, average);
        if (!r.first_entry && d <= r.radius) r.first_entry = t;
        if (t < r.T_eps) continue;
        ++r.checked;
        r.max_after_T = std::max(r.max_after_T, d);
        if (d > r.radius + tolerance) {
            if (!r.first_violation) r.first_violation = t;
            ++r.violations;
        }
    }
    return r;
}

}  // namespace

StripEntryReport check_strip_entry(const SampledTrace& trace, const WeightedDigraph& g,
                                   const QuantizerSpec& spec, double eps, double tolerance) {
    std::vector<std::pair<double, std::vector<double>>> samples;
    samples.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        samples.emplace_back(trace.times[k], trace.states[k]);
    return check_samples(samples, g, spec, eps, tolerance);
}

StripEntryReport check_strip_entry(const HybridTrace& trace, const WeightedDigraph& g,
                                   const QuantizerSpec& spec, double eps, double tolerance) {
    std::vector<std::pair<double, std::vector<double>>> samples;
    samples.reserve(2 * trace.flows.size());
    for (const auto& f : trace.flows) {
        samples.emplace_back(f.t0, f.x0);
        samples.emplace_back(f.t1, f.x_end());
    }
    return check_samples(samples, g, spec, eps, tolerance);
}

nlohmann::json strip_entry_to_json(const StripEntryReport& r) {
    nlohmann::json j{{"radius", r.radius},
                     {"T_eps", r.T_eps},
                     {"initial_disagreement", r.initial_disagreement},
                     {"initially_inside", r.initially_inside},
                     {"checked", r.checked},
                     {"violations", r.violations},
                     {"max_after_T", r.max_after_T},
                     {"satisfied", r.satisfied()}};
    j["first_entry"] = r.first_entry ? nlohmann::json(*r.first_entry) : nlohmann::json(nullptr);
    j["first_violation"] =
        r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json(nullptr);
    return j;
}

}  // namespace qcons
