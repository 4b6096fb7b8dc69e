#include "qcons/hybrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "qcons/errors.hpp"

namespace qcons {

namespace {

double upper_threshold(HalfQuantum q, const QuantizerSpec& spec) {
    return HalfQuantum{q.k + 1}.value(spec);
}

double lower_threshold(HalfQuantum q, const QuantizerSpec& spec) {
    return HalfQuantum{q.k - 1}.value(spec);
}

std::int64_t max_abs_level(std::span<const HalfQuantum> q) {
    std::int64_t m = 0;
    for (auto h : q) m = std::max(m, h.k < 0 ? -h.k : h.k);
    return m;
}

void check_sizes(std::span<const double> x, std::span<const HalfQuantum> q) {
    if (x.size() != q.size()) throw Error(Errc::InvalidArgument, "x and q differ in length");
    for (double v : x)
        if (!std::isfinite(v)) throw Error(Errc::NonFinite, "state is not finite");
}

// Applies the one initial jump allowed for a start on a band edge.
HybridState settle_initial(std::vector<double> x, Levels q, const QuantizerSpec& spec) {
    HybridState z{std::move(x), std::move(q), 0.0, 0};
    if (in_jump_set(z.x, z.q, spec)) {
        z.q = hysteresis_jump(z.x, z.q, spec);
        z.j = 1;
    }
    return z;
}

}  // namespace

bool in_flow_set(const HybridState& z, const QuantizerSpec& spec) {
    for (std::size_t i = 0; i < z.x.size(); ++i) {
        if (!(z.x[i] > lower_threshold(z.q[i], spec))) return false;
        if (!(z.x[i] < upper_threshold(z.q[i], spec))) return false;
    }
    return true;
}

bool in_initial_set(std::span<const double> x, std::span<const HalfQuantum> q,
                    const QuantizerSpec& spec) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower_threshold(q[i], spec))) return false;
        if (!(x[i] < upper_threshold(q[i], spec))) return false;
    }
    return true;
}

HybridState hybrid_init(std::span<const double> x0, const QuantizerSpec& spec) {
    auto q = hysteresis_init(x0, spec);
    return settle_initial({x0.begin(), x0.end()}, std::move(q), spec);
}

HybridState hybrid_init(std::span<const double> x0, std::span<const HalfQuantum> q0,
                        const QuantizerSpec& spec) {
    check_sizes(x0, q0);
    // The closed band: the initial set plus its upper edge, which one jump resolves.
    for (std::size_t i = 0; i < x0.size(); ++i) {
        if (x0[i] < lower_threshold(q0[i], spec) || x0[i] > upper_threshold(q0[i], spec))
            throw Error(Errc::PreconditionViolated,
                        "agent " + std::to_string(i) + " starts outside its hysteresis band");
    }
    return settle_initial({x0.begin(), x0.end()}, {q0.begin(), q0.end()}, spec);
}

NextEvent next_event(const HybridState& z, const WeightedDigraph& g, const QuantizerSpec& spec) {
    if (!in_flow_set(z, spec))
        throw Error(Errc::StateInJumpSet, "next_event needs a state inside the flow set");
    const auto v = consensus_velocity(g, z.q, spec);

    const std::size_t n = z.x.size();
    std::vector<double> hit(n, std::numeric_limits<double>::infinity());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > 0.0)
            hit[i] = (upper_threshold(z.q[i], spec) - z.x[i]) / v[i];
        else if (v[i] < 0.0)
            hit[i] = (lower_threshold(z.q[i], spec) - z.x[i]) / v[i];
        best = std::min(best, hit[i]);
    }

    NextEvent ev;
    ev.dt = best;
    if (!ev.finite()) return ev;
    const double slack = kSimultaneityTolerance * (1.0 + best);
    for (std::size_t i = 0; i < n; ++i)
        if (hit[i] <= best + slack) ev.triggered.push_back(i);
    return ev;
}

std::vector<double> FlowInterval::x_at(double t) const {
    std::vector<double> x = x0;
    const double dt = t - t0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += velocity[i] * dt;
    return x;
}

HybridState HybridTrace::final_state() const {
    const auto& f = flows.back();
    return HybridState{f.x_end(), f.q, f.t1, f.j};
}

SampledTrace HybridTrace::sample(double stride) const {
    if (!(stride > 0.0)) throw Error(Errc::InvalidArgument, "sampling stride must be positive");
    SampledTrace out;
    out.delta = delta;
    const auto count = static_cast<std::size_t>(std::floor(end_time / stride + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        const double t = static_cast<double>(k) * stride;
        // last flow starting at or before t; at a jump instant that is the post-jump flow
        auto it = std::upper_bound(flows.begin(), flows.end(), t,
                                   [](double value, const FlowInterval& f) { return value < f.t0; });
        const FlowInterval& f = *std::prev(it);
        out.times.push_back(t);
        out.states.push_back(f.x_at(std::min(t, f.t1)));
        out.levels.push_back(f.q);
        out.jump_counter.push_back(f.j);
    }
    return out;
}

namespace {

HybridTrace run(HybridState z, Levels q_initial, const WeightedDigraph& g,
                const QuantizerSpec& spec, double horizon, std::size_t max_jumps) {
    if (!(horizon >= 0.0)) throw Error(Errc::InvalidArgument, "horizon must be nonnegative");
    if (z.x.size() != g.size())
        throw Error(Errc::InvalidArgument, "initial state does not match the graph size");
    if (!is_weight_balanced(g)) throw Error(Errc::NotBalanced, "graph is not weight-balanced");
    if (!is_weakly_connected(g)) throw Error(Errc::NotConnected, "graph is not weakly connected");

    HybridTrace trace;
    trace.delta = spec.delta();
    trace.horizon = horizon;
    const std::size_t n = g.size();

    if (z.j == 1) {
        // degenerate I_0 = [0, 0] followed by the initial jump
        trace.flows.push_back({0.0, 0.0, 0, z.x, q_initial, std::vector<double>(n, 0.0), false});
        JumpEvent e{0.0, 0, z.x, q_initial, z.q, {}};
        for (std::size_t i = 0; i < n; ++i)
            if (q_initial[i] != z.q[i]) e.triggered.push_back(i);
        trace.jumps.push_back(std::move(e));
    }

    while (true) {
        const auto ev = next_event(z, g, spec);
        const auto v = consensus_velocity(g, z.q, spec);
        const double t_next = z.t + ev.dt;

        if (!ev.finite() || t_next >= horizon) {
            trace.flows.push_back({z.t, horizon, z.j, z.x, z.q, v, !ev.finite()});
            trace.end_time = horizon;
            return trace;
        }
        if (trace.jumps.size() >= max_jumps) {
            trace.flows.push_back({z.t, t_next, z.j, z.x, z.q, v, false});
            trace.end_time = t_next;
            trace.status = HybridStatus::MaxJumpsExceeded;
            return trace;
        }

        trace.flows.push_back({z.t, t_next, z.j, z.x, z.q, v, false});
        for (std::size_t i = 0; i < n; ++i) z.x[i] += v[i] * ev.dt;
        for (std::size_t i : ev.triggered)
            z.x[i] = v[i] > 0.0 ? upper_threshold(z.q[i], spec) : lower_threshold(z.q[i], spec);

        Levels next = hysteresis_jump(z.x, z.q, spec);
        JumpEvent e{t_next, z.j, z.x, z.q, next, {}};
        for (std::size_t i = 0; i < n; ++i)
            if (next[i] != z.q[i]) e.triggered.push_back(i);
        trace.jumps.push_back(std::move(e));

        z.q = std::move(next);
        z.t = t_next;
        ++z.j;
    }
}

}  // namespace

HybridTrace simulate_hybrid(std::span<const double> x0, const WeightedDigraph& g,
                            const QuantizerSpec& spec, double horizon, std::size_t max_jumps) {
    Levels q0 = hysteresis_init(x0, spec);
    return run(hybrid_init(x0, spec), std::move(q0), g, spec, horizon, max_jumps);
}

HybridTrace simulate_hybrid(std::span<const double> x0, std::span<const HalfQuantum> q0,
                            const WeightedDigraph& g, const QuantizerSpec& spec, double horizon,
                            std::size_t max_jumps) {
    auto z = hybrid_init(x0, q0, spec);
    return run(std::move(z), Levels(q0.begin(), q0.end()), g, spec, horizon, max_jumps);
}

double dwell_time_bound(const WeightedDigraph& g, std::span<const HalfQuantum> q0,
                        const QuantizerSpec& spec) {
    const double q_norm = HalfQuantum{max_abs_level(q0)}.value(spec);
    const double speed = g.laplacian_inf_norm() * (q_norm + spec.half());
    if (speed == 0.0) return std::numeric_limits<double>::infinity();
    return spec.half() / speed;
}

unsigned bits_per_level(std::span<const HalfQuantum> q0, const QuantizerSpec&) {
    // ceil(log2(8 ||q0|| / delta + 5)) with ||q0|| / delta = K / 2 for K half-quanta
    const auto levels = static_cast<std::uint64_t>(4 * max_abs_level(q0) + 5);
    return static_cast<unsigned>(std::bit_width(levels - 1));
}

double data_rate_bound(const WeightedDigraph& g, std::span<const HalfQuantum> q0,
                       const QuantizerSpec& spec) {
    // (2 ||q0|| / delta + 1) = K + 1
    const double span_factor = static_cast<double>(max_abs_level(q0) + 1);
    return static_cast<double>(bits_per_level(q0, spec)) * span_factor * g.laplacian_inf_norm();
}

CycleReport detect_limit_cycle(const HybridTrace& trace) {
    CycleReport report;
    const auto& jumps = trace.jumps;
    if (jumps.size() < 2) return report;

    auto same_state = [&](std::size_t a, std::size_t b) {
        if (jumps[a].q_after != jumps[b].q_after) return false;
        for (std::size_t i = 0; i < jumps[a].x.size(); ++i)
            if (std::abs(jumps[a].x[i] - jumps[b].x[i]) > kCycleStateTolerance) return false;
        return true;
    };

    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> seen;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        auto& earlier = seen[level_indices(jumps[k].q_after)];
        for (auto it = earlier.rbegin(); it != earlier.rend(); ++it) {
            const std::size_t m = *it;
            if (!same_state(m, k)) continue;
            const std::size_t len = k - m;
            if (k + len >= jumps.size() || !same_state(k, k + len)) continue;

            report.found = true;
            report.entry_jump = m;
            report.entry_time = jumps[m].t;
            report.period = jumps[k].t - jumps[m].t;
            report.jumps_per_period = len;
            const std::size_t n = jumps[m].x.size();
            std::vector<std::int64_t> lo(n, INT64_MAX), hi(n, INT64_MIN);
            for (std::size_t r = m; r < k; ++r) {
                report.states.push_back({jumps[r].x, jumps[r].q_after, jumps[r].t, jumps[r].j + 1});
                for (std::size_t i = 0; i < n; ++i) {
                    lo[i] = std::min(lo[i], jumps[r].q_after[i].k);
                    hi[i] = std::max(hi[i], jumps[r].q_after[i].k);
                }
            }
            report.amplitude.resize(n);
            for (std::size_t i = 0; i < n; ++i) report.amplitude[i] = hi[i] - lo[i];
            return report;
        }
        earlier.push_back(k);
    }
    return report;
}

bool in_hybrid_equilibria(const HybridState& z, const QuantizerSpec& spec) {
    if (z.q.empty()) return true;
    const auto k = z.q.front();
    if (!std::all_of(z.q.begin(), z.q.end(), [&](HalfQuantum h) { return h == k; })) return false;
    return in_flow_set(z, spec);
}

DwellReport verify_dwell_and_bounds(const HybridTrace& trace, const WeightedDigraph& g,
                                    const QuantizerSpec& spec) {
    if (trace.flows.empty()) throw Error(Errc::EmptyTrace, "hybrid trace has no flows");
    const Levels& q0 = trace.initial_levels();
    const std::size_t n = q0.size();

    DwellReport r;
    r.dwell_bound = dwell_time_bound(g, q0, spec);
    r.rate_bound = data_rate_bound(g, q0, spec);
    const double bits = static_cast<double>(bits_per_level(q0, spec));

    std::vector<std::vector<double>> times(n);
    for (const auto& e : trace.jumps)
        for (std::size_t i : e.triggered) times[i].push_back(e.t);

    constexpr double kRelSlack = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ti = times[i];
        for (std::size_t s = 1; s < ti.size(); ++s) {
            const double gap = ti[s] - ti[s - 1];
            r.min_gap = std::min(r.min_gap, gap);
            if (r.dwell.pass && gap < r.dwell_bound * (1.0 - kRelSlack)) {
                r.dwell.pass = false;
                std::ostringstream os;
                os << "agent " << i << " jumped at " << ti[s - 1] << " and " << ti[s] << " (gap "
                   << gap << " < " << r.dwell_bound << ")";
                r.dwell.witness = os.str();
            }
        }
        if (ti.size() >= 2) {
            const double rate = static_cast<double>(ti.size() - 1) * bits / (ti.back() - ti.front());
            r.max_rate = std::max(r.max_rate, rate);
            if (r.data_rate.pass && rate > r.rate_bound * (1.0 + kRelSlack)) {
                r.data_rate.pass = false;
                std::ostringstream os;
                os << "agent " << i << " rate " << rate << " > " << r.rate_bound;
                r.data_rate.witness = os.str();
            }
        }
    }

    const auto [qmin, qmax] = std::minmax_element(q0.begin(), q0.end());
    const std::int64_t q_lo = qmin->k - 1;
    const std::int64_t q_hi = qmax->k + 1;
    const double x_lo = HalfQuantum{qmin->k - 2}.value(spec);
    const double x_hi = HalfQuantum{qmax->k + 2}.value(spec);
    const double x_slack = 1e-12 * std::max({1.0, std::abs(x_lo), std::abs(x_hi)});
    for (const auto& f : trace.flows) {
        if (!r.bounds.pass) break;
        for (std::size_t i = 0; i < n; ++i) {
            if (f.q[i].k < q_lo || f.q[i].k > q_hi) {
                r.bounds.pass = false;
                std::ostringstream os;
                os << "agent " << i << " level " << f.q[i].k << " half-quanta outside [" << q_lo
                   << ", " << q_hi << "] at t=" << f.t0;
                r.bounds.witness = os.str();
                break;
            }
        }
        for (const auto& x : {f.x0, f.x_end()}) {
            for (std::size_t i = 0; i < n && r.bounds.pass; ++i) {
                if (x[i] < x_lo - x_slack || x[i] > x_hi + x_slack) {
                    r.bounds.pass = false;
                    std::ostringstream os;
                    os << "agent " << i << " state " << x[i] << " outside [" << x_lo << ", "
                       << x_hi << "] on flow starting at t=" << f.t0;
                    r.bounds.witness = os.str();
                }
            }
        }
    }
    return r;
}

std::string_view to_string(HybridStatus status) noexcept {
    return status == HybridStatus::Completed ? "completed" : "max_jumps_exceeded";
}

nlohmann::json hybrid_trace_to_json(const HybridTrace& trace) {
    nlohmann::json j;
    j["delta"] = trace.delta;
    j["horizon"] = trace.horizon;
    j["end_time"] = trace.end_time;
    j["status"] = std::string(to_string(trace.status));
    nlohmann::json flows = nlohmann::json::array();
    for (const auto& f : trace.flows)
        flows.push_back({{"t0", f.t0}, {"t1", f.t1}, {"j", f.j}, {"x0", f.x0},
                         {"q", level_indices(f.q)}});
    nlohmann::json jumps = nlohmann::json::array();
    for (const auto& e : trace.jumps)
        jumps.push_back({{"t", e.t}, {"j", e.j}, {"triggered", e.triggered},
                         {"q_before", level_indices(e.q_before)},
                         {"q_after", level_indices(e.q_after)}});
    j["flows"] = std::move(flows);
    j["jumps"] = std::move(jumps);
    return j;
}

}  // namespace qcons
