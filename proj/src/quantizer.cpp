#include "qcons/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcons/errors.hpp"

namespace qcons {

QuantizerSpec::QuantizerSpec(double delta) : delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw Error(Errc::InvalidArgument, "quantization step must be positive and finite");
}

std::vector<double> level_values(std::span<const HalfQuantum> q, const QuantizerSpec& spec) {
    std::vector<double> out(q.size());
    std::transform(q.begin(), q.end(), out.begin(),
                   [&](HalfQuantum h) { return h.value(spec); });
    return out;
}

std::vector<std::int64_t> level_indices(std::span<const HalfQuantum> q) {
    std::vector<std::int64_t> out(q.size());
    std::transform(q.begin(), q.end(), out.begin(), [](HalfQuantum h) { return h.k; });
    return out;
}

HalfQuantum uniform_quantize(double x, const QuantizerSpec& spec) {
    if (!std::isfinite(x)) throw Error(Errc::NonFinite, "cannot quantize a non-finite value");
    const double m = std::floor(x / spec.delta() + 0.5);
    return HalfQuantum{2 * static_cast<std::int64_t>(m)};
}

Levels uniform_quantize(std::span<const double> x, const QuantizerSpec& spec) {
    Levels out(x.size());
    std::transform(x.begin(), x.end(), out.begin(),
                   [&](double v) { return uniform_quantize(v, spec); });
    return out;
}

std::vector<double> consensus_velocity(const WeightedDigraph& g, std::span<const HalfQuantum> q,
                                       const QuantizerSpec& spec) {
    const std::size_t n = g.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j : g.in_neighbors(i))
            s += g.weight(i, j) * static_cast<double>(q[j].k - q[i].k);
        v[i] = s * spec.half();
    }
    return v;
}

std::size_t KrasowskiiBox::boundary_count() const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(),
                      [](const LevelInterval& c) { return !c.degenerate(); }));
}

namespace {

// Index m with x within tolerance of (m + 1/2) delta, if any.
std::optional<std::int64_t> boundary_index(double x, const QuantizerSpec& spec) {
    const double m = std::round(x / spec.delta() - 0.5);
    const double surface = (m + 0.5) * spec.delta();
    if (std::abs(x - surface) <= kBoundaryTolerance * spec.delta())
        return static_cast<std::int64_t>(m);
    return std::nullopt;
}

}  // namespace

KrasowskiiBox krasowskii_box(std::span<const double> x, const QuantizerSpec& spec) {
    KrasowskiiBox box;
    box.components.reserve(x.size());
    for (double xi : x) {
        if (!std::isfinite(xi)) throw Error(Errc::NonFinite, "non-finite state component");
        if (auto m = boundary_index(xi, spec)) {
            box.components.push_back({HalfQuantum{2 * *m}, HalfQuantum{2 * *m + 2}});
        } else {
            const auto q = uniform_quantize(xi, spec);
            box.components.push_back({q, q});
        }
    }
    return box;
}

std::vector<std::vector<double>> krasowskii_velocity_polytope(std::span<const double> x,
                                                              const WeightedDigraph& g,
                                                              const QuantizerSpec& spec) {
    const auto box = krasowskii_box(x, spec);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < box.components.size(); ++i)
        if (!box.components[i].degenerate()) free.push_back(i);
    if (free.size() > kMaxBoundaryComponents)
        throw Error(Errc::TooManyVertices,
                    std::to_string(free.size()) + " boundary components exceed the vertex cap");

    Levels corner(box.components.size());
    for (std::size_t i = 0; i < corner.size(); ++i) corner[i] = box.components[i].lo;

    std::vector<std::vector<double>> vertices;
    const std::uint64_t count = std::uint64_t{1} << free.size();
    vertices.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (std::size_t b = 0; b < free.size(); ++b) {
            const auto& c = box.components[free[b]];
            corner[free[b]] = (mask >> b) & 1U ? c.hi : c.lo;
        }
        vertices.push_back(consensus_velocity(g, corner, spec));
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    return vertices;
}

BlockingResult caratheodory_blocking_test(std::span<const double> x, std::size_t node,
                                          const WeightedDigraph& g, const QuantizerSpec& spec) {
    if (x.size() != g.size() || node >= g.size())
        throw Error(Errc::InvalidArgument, "state size or node index does not match the graph");
    if (!is_weight_balanced(g)) throw Error(Errc::NotBalanced, "graph is not weight-balanced");
    const auto box = krasowskii_box(x, spec);
    if (box.components[node].degenerate())
        throw Error(Errc::PreconditionViolated,
                    "component " + std::to_string(node) + " is not on a discontinuity surface");
    if (box.boundary_count() != 1)
        throw Error(Errc::PreconditionViolated, "another component lies on a surface");

    // Levels just above the surface: the upper end of the node's interval.
    const std::int64_t k_node = box.components[node].hi.k;
    double f_plus_half = 0.0;
    for (std::size_t j : g.in_neighbors(node))
        f_plus_half += g.weight(node, j) * static_cast<double>(box.components[j].lo.k - k_node);
    const double d_in = g.laplacian().in_degree[node];

    BlockingResult r{};
    r.f_plus = f_plus_half * spec.half();
    r.f_minus = (f_plus_half + 2.0 * d_in) * spec.half();
    if (r.f_plus == 0.0 || r.f_minus == 0.0)
        r.verdict = BlockingVerdict::Tangent;
    else if (r.f_plus < 0.0 && r.f_minus > 0.0)
        r.verdict = BlockingVerdict::Blocking;
    else
        r.verdict = BlockingVerdict::SameSign;
    return r;
}

Levels hysteresis_init(std::span<const double> x, const QuantizerSpec& spec) {
    return uniform_quantize(x, spec);
}

bool in_jump_set(std::span<const double> x, std::span<const HalfQuantum> q,
                 const QuantizerSpec& spec) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= HalfQuantum{q[i].k + 1}.value(spec)) return true;
        if (x[i] <= HalfQuantum{q[i].k - 1}.value(spec)) return true;
    }
    return false;
}

Levels hysteresis_jump(std::span<const double> x, std::span<const HalfQuantum> q,
                       const QuantizerSpec& spec) {
    if (x.size() != q.size()) throw Error(Errc::InvalidArgument, "x and q differ in length");
    Levels next(q.begin(), q.end());
    bool fired = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= HalfQuantum{q[i].k + 1}.value(spec)) {
            next[i].k += 1;
            fired = true;
        } else if (x[i] <= HalfQuantum{q[i].k - 1}.value(spec)) {
            next[i].k -= 1;
            fired = true;
        }
    }
    if (!fired) throw Error(Errc::NotInJumpSet, "no component reached a hysteresis threshold");
    return next;
}

}  // namespace qcons
