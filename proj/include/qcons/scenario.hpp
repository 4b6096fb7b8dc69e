#pragma once

// Scenario configs, named presets, and the runners behind the command-line tool.
//
// A config is one JSON object, or {"scenarios": [ ... ]}:
//
//   {
//     "name": "ring10-hybrid",
//     "graph": {"generator": "ring", "n": 10}
//            | {"generator": "rgg", "n": 10, "radius": 0.2, "seed": 7}
//            | {"generator": "path", "n": 3} | {"generator": "complete", "n": 2}
//            | {"adjacency": [[...]]} | {"file": "graph.json"},
//     "delta": 0.05,
//     "x0": [...] | "reference",
//     "q0": [...]                      (hybrid only, levels in half-quanta)
//     "solver": "euler-krasowskii" | "euler-linear" | "hybrid-exact",
//     "analysis": "caratheodory-blocking", "node": 1     (instead of a solver)
//     "dt": 0.005, "horizon": 50, "record_stride": 1,
//     "max_jumps": 1000000, "sample_stride": 0.005, "epsilon": 0.5,
//     "outputs": {"trace-csv": "...", "trace-json": "...", "bounds-json": "...",
//                 "report-json": "..."}
//   }

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcons/graph.hpp"
#include "qcons/quantizer.hpp"

namespace qcons {

/// Ten-agent reference initial condition used by the rgg10, ring10 and linear-baseline presets.
inline constexpr std::array<double, 10> kReferenceInitialState{
    0.91728, 0.26898, 0.76538, 0.18858, 0.28738, 0.09098, 0.57608, 0.68328, 0.54648, 0.42558};

/// Seed of the rgg10 preset; its draw is connected within the attempt cap.
inline constexpr std::uint64_t kRgg10Seed = 3;

enum class Solver { EulerKrasowskii, EulerLinear, HybridExact };

std::string_view to_string(Solver s) noexcept;

struct GraphSource {
    std::string generator;  ///< ring | rgg | path | complete | inline | file
    std::size_t n = 0;
    double radius = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> adjacency;
    std::string file;
};

WeightedDigraph make_graph(const GraphSource& source);

/// Undirected path 1 - 2 - ... - n with unit weights.
WeightedDigraph gen_path(std::size_t n);

/// Complete symmetric graph with unit weights.
WeightedDigraph gen_complete(std::size_t n);

struct OutputSpec {
    std::string trace_csv;
    std::string trace_json;
    std::string bounds_json;
    std::string report_json;
};

struct Scenario {
    std::string name = "scenario";
    GraphSource graph;
    double delta = 0.05;
    std::vector<double> x0;
    std::optional<std::vector<std::int64_t>> q0;
    std::optional<Solver> solver;
    std::optional<std::size_t> blocking_node;
    double dt = 0.005;
    double horizon = 10.0;
    std::size_t record_stride = 1;
    std::size_t max_jumps = 1'000'000;
    double sample_stride = 0.005;
    double epsilon = 0.5;
    OutputSpec outputs;
};

/// Throws Error{ConfigError} naming the offending field.
Scenario parse_scenario(const nlohmann::json& j);
std::vector<Scenario> parse_config(const nlohmann::json& j);

/// Reads and parses a config file; JSON syntax errors report line and column.
std::vector<Scenario> load_config(const std::filesystem::path& path);

struct Preset {
    std::string name;
    std::string summary;
    std::vector<Scenario> scenarios;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

struct RunResult {
    std::string summary;   ///< one line
    nlohmann::json report;
};

/// Runs one scenario and writes its declared outputs; relative output paths are
/// resolved against output_dir.
RunResult run_scenario(const Scenario& s, const std::filesystem::path& output_dir);

/// Structural verdicts, spectral data and bounds for a graph. Spectral fields are
/// omitted for graphs that are not weight-balanced and weakly connected; dwell-time
/// and data-rate bounds need x0.
nlohmann::json analyze_graph(const WeightedDigraph& g, double delta,
                             const std::optional<std::vector<double>>& x0 = std::nullopt);

}  // namespace qcons
