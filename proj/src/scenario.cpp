#include "qcons/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qcons/errors.hpp"
#include "qcons/hybrid.hpp"
#include "qcons/krasowskii.hpp"
#include "qcons/metrics.hpp"
#include "qcons/trace.hpp"

namespace qcons {

using nlohmann::json;

std::string_view to_string(Solver s) noexcept {
    switch (s) {
        case Solver::EulerKrasowskii: return "euler-krasowskii";
        case Solver::EulerLinear: return "euler-linear";
        case Solver::HybridExact: return "hybrid-exact";
    }
    return "unknown";
}

WeightedDigraph gen_path(std::size_t n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "path needs n >= 1");
    Matrix a(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
    return WeightedDigraph(std::move(a));
}

WeightedDigraph gen_complete(std::size_t n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "complete graph needs n >= 1");
    Matrix a(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 0.0;
    return WeightedDigraph(std::move(a));
}

WeightedDigraph make_graph(const GraphSource& src) {
    if (src.generator == "ring") return gen_directed_ring(src.n);
    if (src.generator == "rgg") return gen_random_geometric(src.n, src.radius, src.seed);
    if (src.generator == "path") return gen_path(src.n);
    if (src.generator == "complete") return gen_complete(src.n);
    if (src.generator == "inline") return build_graph(src.adjacency);
    if (src.generator == "file") {
        std::ifstream in(src.file);
        if (!in) throw Error(Errc::ConfigError, "cannot open graph file " + src.file);
        try {
            return graph_from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw Error(Errc::ConfigError, "graph file " + src.file + ": " + e.what());
        }
    }
    throw Error(Errc::ConfigError, "field 'graph.generator': unknown generator '" +
                                       src.generator + "'");
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw Error(Errc::ConfigError, "field '" + field + "': " + what);
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        field_error(path + key, "has the wrong type");
    }
}

GraphSource parse_graph(const json& j) {
    if (!j.is_object()) field_error("graph", "must be an object");
    GraphSource g;
    if (j.contains("adjacency")) {
        g.generator = "inline";
        try {
            g.adjacency = j.at("adjacency").get<std::vector<std::vector<double>>>();
        } catch (const json::exception&) {
            field_error("graph.adjacency", "must be a matrix of numbers");
        }
        return g;
    }
    if (j.contains("file")) {
        g.generator = "file";
        g.file = get_field<std::string>(j, "file", "graph.", "");
        return g;
    }
    g.generator = get_field<std::string>(j, "generator", "graph.", "");
    if (g.generator.empty()) field_error("graph", "needs 'generator', 'adjacency' or 'file'");
    g.n = get_field<std::size_t>(j, "n", "graph.", 0);
    if (g.n == 0) field_error("graph.n", "must be a positive integer");
    if (g.generator == "rgg") {
        g.radius = get_field<double>(j, "radius", "graph.", 0.2);
        if (!(g.radius > 0.0)) field_error("graph.radius", "must be positive");
        if (!j.contains("seed")) field_error("graph.seed", "is required for random graphs");
        g.seed = get_field<std::uint64_t>(j, "seed", "graph.", 0);
    } else if (g.generator != "ring" && g.generator != "path" && g.generator != "complete") {
        field_error("graph.generator", "unknown generator '" + g.generator + "'");
    }
    return g;
}

Solver parse_solver(const std::string& s) {
    if (s == "euler-krasowskii") return Solver::EulerKrasowskii;
    if (s == "euler-linear") return Solver::EulerLinear;
    if (s == "hybrid-exact") return Solver::HybridExact;
    field_error("solver", "unknown solver '" + s + "'");
}

json graph_source_json(const GraphSource& g) {
    json j{{"generator", g.generator}};
    if (g.generator == "rgg") {
        j["n"] = g.n;
        j["radius"] = g.radius;
        j["seed"] = g.seed;
    } else if (g.generator == "file") {
        j["file"] = g.file;
    } else if (g.generator != "inline") {
        j["n"] = g.n;
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw Error(Errc::ConfigError, "scenario must be a JSON object");
    Scenario s;
    s.name = get_field<std::string>(j, "name", "", s.name);
    if (!j.contains("graph")) field_error("graph", "is required");
    s.graph = parse_graph(j.at("graph"));

    s.delta = get_field<double>(j, "delta", "", s.delta);
    if (!(s.delta > 0.0) || !std::isfinite(s.delta)) field_error("delta", "must be positive");

    if (!j.contains("x0")) field_error("x0", "is required");
    const auto& x0 = j.at("x0");
    if (x0.is_string()) {
        if (x0.get<std::string>() != "reference")
            field_error("x0", "unknown preset '" + x0.get<std::string>() + "'");
        s.x0.assign(kReferenceInitialState.begin(), kReferenceInitialState.end());
    } else {
        s.x0 = get_field<std::vector<double>>(j, "x0", "", {});
        if (s.x0.empty()) field_error("x0", "must be a nonempty array");
    }
    if (j.contains("q0")) s.q0 = get_field<std::vector<std::int64_t>>(j, "q0", "", {});

    if (j.contains("analysis")) {
        if (get_field<std::string>(j, "analysis", "", "") != "caratheodory-blocking")
            field_error("analysis", "only 'caratheodory-blocking' is supported");
        if (!j.contains("node")) field_error("node", "is required for the blocking analysis");
        s.blocking_node = get_field<std::size_t>(j, "node", "", 0);
    } else {
        if (!j.contains("solver")) field_error("solver", "is required");
        s.solver = parse_solver(get_field<std::string>(j, "solver", "", ""));
    }

    s.dt = get_field<double>(j, "dt", "", s.dt);
    if (!(s.dt > 0.0)) field_error("dt", "must be positive");
    s.horizon = get_field<double>(j, "horizon", "", s.horizon);
    if (!(s.horizon > 0.0)) field_error("horizon", "must be positive");
    if (s.solver && *s.solver != Solver::HybridExact && s.horizon < s.dt)
        field_error("horizon", "must be at least one time step");
    s.record_stride = get_field<std::size_t>(j, "record_stride", "", s.record_stride);
    if (s.record_stride == 0) field_error("record_stride", "must be positive");
    s.max_jumps = get_field<std::size_t>(j, "max_jumps", "", s.max_jumps);
    s.sample_stride = get_field<double>(j, "sample_stride", "", s.dt);
    if (!(s.sample_stride > 0.0)) field_error("sample_stride", "must be positive");
    s.epsilon = get_field<double>(j, "epsilon", "", s.epsilon);
    if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) field_error("epsilon", "must be in (0, 1)");
    if (s.q0 && s.q0->size() != s.x0.size()) field_error("q0", "length must match x0");

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        if (!o.is_object()) field_error("outputs", "must be an object");
        for (const auto& [key, value] : o.items()) {
            if (!value.is_string()) field_error("outputs." + key, "must be a path string");
            const auto path = value.get<std::string>();
            if (key == "trace-csv") s.outputs.trace_csv = path;
            else if (key == "trace-json") s.outputs.trace_json = path;
            else if (key == "bounds-json") s.outputs.bounds_json = path;
            else if (key == "report-json") s.outputs.report_json = path;
            else field_error("outputs." + key, "unknown output kind");
        }
    }
    return s;
}

std::vector<Scenario> parse_config(const json& j) {
    std::vector<Scenario> out;
    if (j.is_object() && j.contains("scenarios")) {
        if (!j.at("scenarios").is_array()) field_error("scenarios", "must be an array");
        for (const auto& s : j.at("scenarios")) out.push_back(parse_scenario(s));
    } else {
        out.push_back(parse_scenario(j));
    }
    return out;
}

std::vector<Scenario> load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
        const auto last_nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
        const auto column = last_nl == std::string::npos ? upto : upto - last_nl - 1;
        throw Error(Errc::ConfigError, path.string() + ": syntax error at line " +
                                           std::to_string(line) + ", column " +
                                           std::to_string(column));
    }
    return parse_config(j);
}

namespace {

Scenario make_preset_scenario(std::string name, GraphSource graph, double delta,
                              std::vector<double> x0, Solver solver, double horizon) {
    Scenario s;
    s.graph = std::move(graph);
    s.delta = delta;
    s.x0 = std::move(x0);
    s.solver = solver;
    s.horizon = horizon;
    s.sample_stride = s.dt;
    s.outputs.trace_csv = name + ".csv";
    s.outputs.report_json = name + ".report.json";
    s.outputs.bounds_json = name + ".bounds.json";
    if (solver == Solver::HybridExact) s.outputs.trace_json = name + ".trace.json";
    s.name = std::move(name);
    return s;
}

std::vector<Preset> build_presets() {
    const std::vector<double> reference_x0(kReferenceInitialState.begin(), kReferenceInitialState.end());
    const GraphSource ring{"ring", 10, 0.0, 0, {}, ""};
    const GraphSource rgg{"rgg", 10, 0.2, kRgg10Seed, {}, ""};
    std::vector<Preset> out;

    {
        Scenario s;
        s.name = "example1-blocking";
        s.graph = GraphSource{"path", 3, 0.0, 0, {}, ""};
        s.delta = 1.0;
        s.x0 = {1.0, 1.5, 2.0};
        s.blocking_node = 1;
        s.outputs.report_json = "example1-blocking.report.json";
        out.push_back({"example1-blocking",
                       "3-node path, delta=1, x=(1, 1.5, 2): Caratheodory sign test at the middle node",
                       {s}});
    }
    {
        Scenario s = make_preset_scenario("limit-cycle-n2", GraphSource{"complete", 2, 0.0, 0, {}, ""},
                                          1.0, {-0.25, 0.75}, Solver::HybridExact, 10.0);
        s.q0 = std::vector<std::int64_t>{0, 2};
        s.sample_stride = 0.01;
        out.push_back({"limit-cycle-n2",
                       "2 agents, delta=1, x0=(-0.25, 0.75), q0=(0, 1): hysteretic limit cycle "
                       "with period 2",
                       {s}});
    }
    out.push_back({"rgg10",
                   "random geometric graph n=10, radius 0.2, seed " + std::to_string(kRgg10Seed) +
                       ", delta=0.05, dt=0.005, reference x(0); Euler-Krasowskii and hybrid",
                   {make_preset_scenario("rgg10-krasowskii", rgg, 0.05, reference_x0,
                                         Solver::EulerKrasowskii, 60.0),
                    make_preset_scenario("rgg10-hybrid", rgg, 0.05, reference_x0,
                                         Solver::HybridExact, 60.0)}});
    out.push_back({"ring10",
                   "directed ring n=10, delta=0.05, dt=0.005, reference x(0); Euler-Krasowskii "
                   "and hybrid (limit cycle of amplitude 2 delta)",
                   {make_preset_scenario("ring10-krasowskii", ring, 0.05, reference_x0,
                                         Solver::EulerKrasowskii, 100.0),
                    make_preset_scenario("ring10-hybrid", ring, 0.05, reference_x0,
                                         Solver::HybridExact, 100.0)}});
    out.push_back({"linear-baseline",
                   "unquantized x' = -Lx on the rgg10 graph, dt=0.005, reference x(0)",
                   {make_preset_scenario("linear-baseline", rgg, 0.05, reference_x0,
                                         Solver::EulerLinear, 60.0)}});
    return out;
}

void write_json_file(const std::filesystem::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw Error(Errc::ConfigError, "cannot write " + p.string());
    out << j.dump(2) << '\n';
}

std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& rel) {
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p : dir / p;
}

double average(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

json chatter_json(const ChatterReport& c) {
    std::vector<int> flags(c.chattering.begin(), c.chattering.end());
    return {{"window", c.window}, {"flip_counts", c.flip_counts}, {"flags", flags},
            {"any", c.any()}};
}

json cycle_json(const CycleReport& c) {
    json j{{"found", c.found}};
    if (!c.found) return j;
    j["entry_time"] = c.entry_time;
    j["period"] = c.period;
    j["entry_jump"] = c.entry_jump;
    j["jumps_per_period"] = c.jumps_per_period;
    j["amplitude_half_quanta"] = c.amplitude;
    return j;
}

json dwell_json(const DwellReport& d) {
    auto check = [](const CheckResult& c) { return json{{"pass", c.pass}, {"witness", c.witness}}; };
    return {{"dwell_bound", d.dwell_bound},
            {"min_gap", std::isfinite(d.min_gap) ? json(d.min_gap) : json(nullptr)},
            {"rate_bound", d.rate_bound},
            {"max_rate", d.max_rate},
            {"dwell", check(d.dwell)},
            {"bounds", check(d.bounds)},
            {"data_rate", check(d.data_rate)}};
}

RunResult run_blocking(const Scenario& s, const WeightedDigraph& g, const QuantizerSpec& spec) {
    const auto r = caratheodory_blocking_test(s.x0, *s.blocking_node, g, spec);
    const auto poly = krasowskii_velocity_polytope(s.x0, g, spec);
    const char* verdict = r.verdict == BlockingVerdict::Blocking  ? "Blocking"
                          : r.verdict == BlockingVerdict::Tangent ? "Tangent"
                                                                  : "SameSign";
    RunResult out;
    out.report = {{"name", s.name},
                  {"analysis", "caratheodory-blocking"},
                  {"node", *s.blocking_node},
                  {"verdict", verdict},
                  {"f_plus", r.f_plus},
                  {"f_minus", r.f_minus},
                  {"velocity_polytope", poly}};
    out.summary = s.name + ": verdict=" + verdict + " f_plus=" + format_number(r.f_plus) +
                  " f_minus=" + format_number(r.f_minus) +
                  " polytope_vertices=" + std::to_string(poly.size());
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = build_presets();
    return all;
}

const Preset* find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

RunResult run_scenario(const Scenario& s, const std::filesystem::path& output_dir) {
    const auto g = make_graph(s.graph);
    if (s.x0.size() != g.size())
        throw Error(Errc::ConfigError, "field 'x0': has " + std::to_string(s.x0.size()) +
                                           " entries for a graph with " +
                                           std::to_string(g.size()) + " nodes");
    const QuantizerSpec spec(s.delta);
    const json source = graph_source_json(s.graph);

    RunResult out;
    if (s.blocking_node) {
        out = run_blocking(s, g, spec);
    } else {
        json report{{"name", s.name},
                    {"solver", std::string(to_string(*s.solver))},
                    {"graph", source},
                    {"delta", s.delta},
                    {"x0", s.x0}};
        const double avg0 = average(s.x0);
        std::string extra;
        double final_dis = 0.0;

        if (*s.solver == Solver::HybridExact) {
            const auto trace =
                s.q0 ? simulate_hybrid(s.x0, Levels(s.q0->begin(), s.q0->end()), g, spec,
                                       s.horizon, s.max_jumps)
                     : simulate_hybrid(s.x0, g, spec, s.horizon, s.max_jumps);
            const auto final = trace.final_state();
            final_dis = disagreement(final.x);
            const auto cycle = detect_limit_cycle(trace);
            report["status"] = std::string(to_string(trace.status));
            report["jumps"] = trace.jumps.size();
            report["end_time"] = trace.end_time;
            report["final_state"] = final.x;
            report["final_levels"] = level_indices(final.q);
            report["final_in_equilibria"] = in_hybrid_equilibria(final, spec);
            report["average_drift"] = std::abs(average(final.x) - avg0);
            report["cycle"] = cycle_json(cycle);
            report["dwell"] = dwell_json(verify_dwell_and_bounds(trace, g, spec));
            const auto sampled = trace.sample(s.sample_stride);
            report["chattering"] =
                chatter_json(detect_chattering(sampled, kDefaultChatterWindowSteps * s.dt));
            if (is_weight_balanced(g) && is_weakly_connected(g) && g.size() > 1)
                report["strip_entry"] = strip_entry_to_json(check_strip_entry(trace, g, spec, s.epsilon));

            extra = " jumps=" + std::to_string(trace.jumps.size());
            extra += cycle.found ? " cycle=found period=" + format_number(cycle.period) +
                                       " amplitude_max=" +
                                       format_number(HalfQuantum{*std::max_element(
                                                         cycle.amplitude.begin(),
                                                         cycle.amplitude.end())}
                                                         .value(spec))
                                 : std::string(" cycle=none");
            if (trace.status == HybridStatus::MaxJumpsExceeded) extra += " status=max_jumps_exceeded";

            if (!s.outputs.trace_csv.empty()) {
                std::ofstream csv(resolve(output_dir, s.outputs.trace_csv));
                if (!csv) throw Error(Errc::ConfigError, "cannot write " + s.outputs.trace_csv);
                write_csv(csv, sampled);
            }
            if (!s.outputs.trace_json.empty()) {
                json tj = hybrid_trace_to_json(trace);
                tj["graph"] = source;
                write_json_file(resolve(output_dir, s.outputs.trace_json), tj);
            }
        } else {
            const EulerConfig cfg{s.dt, s.horizon, s.record_stride};
            const auto trace = *s.solver == Solver::EulerKrasowskii
                                   ? simulate_euler_quantized(s.x0, g, spec, cfg)
                                   : simulate_euler_linear(s.x0, g, spec, cfg);
            const auto& final = trace.states.back();
            final_dis = disagreement(final);
            report["steps"] = cfg.steps();
            report["final_state"] = final;
            report["average_drift"] = std::abs(average(final) - avg0);
            if (*s.solver == Solver::EulerKrasowskii) {
                const double window = kDefaultChatterWindowSteps * s.dt * s.record_stride;
                const auto chatter = detect_chattering(trace, window);
                report["chattering"] = chatter_json(chatter);
                report["final_in_equilibria_closure"] = in_equilibria_closure(final, spec);
                report["final_dist_to_equilibria"] = dist_to_equilibria(final, spec);
                if (g.size() > 1)
                    report["strip_entry"] =
                        strip_entry_to_json(check_strip_entry(trace, g, spec, s.epsilon));
                extra = std::string(" chattering=") + (chatter.any() ? "yes" : "no");
            }
            if (!s.outputs.trace_csv.empty()) {
                std::ofstream csv(resolve(output_dir, s.outputs.trace_csv));
                if (!csv) throw Error(Errc::ConfigError, "cannot write " + s.outputs.trace_csv);
                write_csv(csv, trace);
            }
            if (!s.outputs.trace_json.empty()) {
                json tj = trace_to_json(trace);
                tj["graph"] = source;
                write_json_file(resolve(output_dir, s.outputs.trace_json), tj);
            }
        }
        report["final_disagreement"] = final_dis;
        out.report = std::move(report);
        out.summary = s.name + ": solver=" + std::string(to_string(*s.solver)) +
                      " final_disagreement=" + format_number(final_dis) + extra;
    }

    if (!s.outputs.bounds_json.empty() && g.size() > 1 && is_weight_balanced(g) &&
        is_weakly_connected(g)) {
        json b = bounds_to_json(bounds_report(g, spec, s.epsilon, disagreement(s.x0)));
        b["graph"] = source;
        write_json_file(resolve(output_dir, s.outputs.bounds_json), b);
    }
    if (!s.outputs.report_json.empty())
        write_json_file(resolve(output_dir, s.outputs.report_json), out.report);
    return out;
}

json analyze_graph(const WeightedDigraph& g, double delta,
                   const std::optional<std::vector<double>>& x0) {
    const QuantizerSpec spec(delta);
    json j{{"n", g.size()},
           {"delta", delta},
           {"weight_balanced", is_weight_balanced(g)},
           {"weakly_connected", is_weakly_connected(g)},
           {"strongly_connected", is_strongly_connected(g)},
           {"symmetric", is_symmetric(g)},
           {"norm_L_inf", g.laplacian_inf_norm()}};

    const bool spectral_ok = is_weight_balanced(g) && is_weakly_connected(g) && g.size() > 1;
    if (spectral_ok) {
        const auto s = spectral_data(g);
        j["lambda2"] = s.lambda2_sym;
        j["norm_L"] = s.norm_L_spectral;
        j["strip_radius"] = {{"eps_0", strip_radius(s, g.size(), spec, 0.0)},
                             {"eps_0.5", strip_radius(s, g.size(), spec, 0.5)}};
        const double root_n = std::sqrt(static_cast<double>(g.size()));
        j["strip_radius_per_agent"] = {{"eps_0", strip_radius(s, g.size(), spec, 0.0) / root_n},
                                       {"eps_0.5", strip_radius(s, g.size(), spec, 0.5) / root_n}};
    }
    if (x0) {
        if (x0->size() != g.size())
            throw Error(Errc::InvalidArgument, "x0 length does not match the graph");
        const auto q0 = uniform_quantize(*x0, spec);
        j["q0_half_quanta"] = level_indices(q0);
        j["dwell_time_bound"] = dwell_time_bound(g, q0, spec);
        j["bits_per_level"] = bits_per_level(q0, spec);
        j["data_rate_bound"] = data_rate_bound(g, q0, spec);
        const double y0 = disagreement(*x0);
        j["initial_disagreement"] = y0;
        if (spectral_ok && y0 > 0.0) j["T_eps_0.5"] = convergence_time(g, spec, 0.5, y0);
    }
    return j;
}

}  // namespace qcons
