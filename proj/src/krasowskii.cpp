#include "qcons/krasowskii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcons/errors.hpp"

namespace qcons {

void EulerConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(Errc::InvalidArgument, "time step must be positive");
    if (!(horizon >= dt) || !std::isfinite(horizon))
        throw Error(Errc::InvalidArgument, "horizon must be at least one time step");
    if (record_stride == 0) throw Error(Errc::InvalidArgument, "record stride must be positive");
}

std::size_t EulerConfig::steps() const {
    return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

namespace {

void check_inputs(std::span<const double> x0, const WeightedDigraph& g) {
    if (x0.size() != g.size())
        throw Error(Errc::InvalidArgument, "initial state has " + std::to_string(x0.size()) +
                                               " entries for " + std::to_string(g.size()) +
                                               " agents");
    if (!is_weight_balanced(g)) throw Error(Errc::NotBalanced, "graph is not weight-balanced");
    if (!is_weakly_connected(g)) throw Error(Errc::NotConnected, "graph is not weakly connected");
    for (double v : x0)
        if (!std::isfinite(v)) throw Error(Errc::NonFinite, "initial state is not finite");
}

template <typename Velocity>
KrasowskiiTrace integrate(std::span<const double> x0, const WeightedDigraph& g,
                          const QuantizerSpec& spec, const EulerConfig& cfg, Velocity velocity) {
    cfg.validate();
    check_inputs(x0, g);

    KrasowskiiTrace trace;
    trace.delta = spec.delta();
    std::vector<double> x(x0.begin(), x0.end());
    const std::size_t steps = cfg.steps();

    auto record = [&](std::size_t k) {
        trace.times.push_back(static_cast<double>(k) * cfg.dt);
        trace.states.push_back(x);
        trace.levels.push_back(uniform_quantize(x, spec));
    };

    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const auto v = velocity(x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += cfg.dt * v[i];
            if (!std::isfinite(x[i]))
                throw Error(Errc::NonFinite, "state diverged at step " + std::to_string(k));
        }
        if (k % cfg.record_stride == 0 || k == steps) record(k);
    }
    return trace;
}

}  // namespace

KrasowskiiTrace simulate_euler_quantized(std::span<const double> x0, const WeightedDigraph& g,
                                         const QuantizerSpec& spec, const EulerConfig& cfg) {
    return integrate(x0, g, spec, cfg, [&](const std::vector<double>& x) {
        return consensus_velocity(g, uniform_quantize(x, spec), spec);
    });
}

KrasowskiiTrace simulate_euler_linear(std::span<const double> x0, const WeightedDigraph& g,
                                      const QuantizerSpec& spec, const EulerConfig& cfg) {
    const Matrix& L = g.laplacian().L;
    return integrate(x0, g, spec, cfg, [&](const std::vector<double>& x) {
        auto v = L * std::span<const double>(x);
        for (double& c : v) c = -c;
        return v;
    });
}

bool ChatterReport::any() const {
    return std::any_of(chattering.begin(), chattering.end(), [](bool b) { return b; });
}

ChatterReport detect_chattering(const SampledTrace& trace, double window,
                                std::size_t flip_threshold) {
    if (trace.empty()) throw Error(Errc::EmptyTrace, "chattering needs a nonempty trace");
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r < trace.size(); ++r)
        spacing = std::min(spacing, trace.times[r] - trace.times[r - 1]);
    if (trace.size() > 1 && window < spacing * (1.0 - 1e-12))
        throw Error(Errc::InvalidArgument, "window is shorter than the sampling interval");

    const std::size_t n = trace.agents();
    ChatterReport report;
    report.window = window;
    report.flip_counts.assign(n, 0);
    report.chattering.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> flips;
        std::int64_t current = trace.levels.front()[i].k;
        std::optional<std::int64_t> before;  // level held before the last change
        for (std::size_t r = 1; r < trace.size(); ++r) {
            const std::int64_t next = trace.levels[r][i].k;
            if (next == current) continue;
            if (before && next == *before && std::abs(next - current) <= 2)
                flips.push_back(trace.times[r]);
            before = current;
            current = next;
        }
        std::size_t best = 0;
        for (std::size_t lo = 0, hi = 0; hi < flips.size(); ++hi) {
            while (flips[hi] - flips[lo] > window) ++lo;
            best = std::max(best, hi - lo + 1);
        }
        report.flip_counts[i] = best;
        report.chattering[i] = best >= flip_threshold;
    }
    return report;
}

bool in_equilibria_closure(std::span<const double> x, const QuantizerSpec& spec) {
    if (x.empty()) return true;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    // need an integer k with max/delta - 1/2 <= k <= min/delta + 1/2
    return std::ceil(*hi / spec.delta() - 0.5) <= std::floor(*lo / spec.delta() + 0.5);
}

double dist_to_equilibria(std::span<const double> x, const QuantizerSpec& spec) {
    if (x.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double d = spec.delta();
    const auto k_first = static_cast<std::int64_t>(std::floor(*lo / d)) - 1;
    const auto k_last = static_cast<std::int64_t>(std::ceil(*hi / d)) + 1;

    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t k = k_first; k <= k_last; ++k) {
        const double a = (static_cast<double>(k) - 0.5) * d;
        const double b = (static_cast<double>(k) + 0.5) * d;
        double s = 0.0;
        for (double xi : x) {
            const double c = std::clamp(xi, a, b);
            s += (xi - c) * (xi - c);
        }
        best = std::min(best, s);
    }
    return std::sqrt(best);
}

bool check_strong_invariance(const SampledTrace& trace, const QuantizerSpec& spec,
                             double tolerance) {
    if (trace.empty()) throw Error(Errc::EmptyTrace, "invariance check needs a nonempty trace");
    if (dist_to_equilibria(trace.states.front(), spec) > tolerance)
        throw Error(Errc::StartNotInClosure, "trace does not start in the equilibrium closure");
    return std::all_of(trace.states.begin(), trace.states.end(), [&](const auto& x) {
        return dist_to_equilibria(x, spec) <= tolerance;
    });
}

}  // namespace qcons
