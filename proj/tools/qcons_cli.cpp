// qcons_cli: run quantized-consensus scenarios, analyze graphs, list presets.
//
//   qcons_cli run <config.json>... [--preset NAME]... [--jobs N] [--out DIR]
//   qcons_cli analyze <graph.json> [--x0 v1 v2 ...] [--delta D]
//   qcons_cli presets
//
// Exit status: 0 success, 2 config error, 3 solver error.
// QCONS_OUTPUT_DIR overrides the output directory when --out is not given.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcons/errors.hpp"
#include "qcons/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

bool is_config_error(qcons::Errc c) {
    return c == qcons::Errc::ConfigError;
}

struct Outcome {
    std::string line;
    int status = 0;
};

Outcome run_one(const qcons::Scenario& s, const std::filesystem::path& dir) {
    try {
        return {qcons::run_scenario(s, dir).summary, 0};
    } catch (const qcons::Error& e) {
        return {s.name + ": error: " + e.what(), is_config_error(e.code()) ? kExitConfig : kExitSolver};
    } catch (const std::exception& e) {
        return {s.name + ": error: " + e.what(), kExitSolver};
    }
}

int cmd_run(const std::vector<std::string>& configs, const std::vector<std::string>& preset_names,
            unsigned jobs, std::string out_dir) {
    std::vector<qcons::Scenario> scenarios;
    try {
        for (const auto& name : preset_names) {
            const auto* p = qcons::find_preset(name);
            if (!p) throw qcons::Error(qcons::Errc::ConfigError, "unknown preset '" + name + "'");
            scenarios.insert(scenarios.end(), p->scenarios.begin(), p->scenarios.end());
        }
        for (const auto& path : configs) {
            auto loaded = qcons::load_config(path);
            scenarios.insert(scenarios.end(), loaded.begin(), loaded.end());
        }
    } catch (const qcons::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (scenarios.empty()) {
        std::cerr << "config error: nothing to run\n";
        return kExitConfig;
    }

    if (out_dir.empty()) {
        const char* env = std::getenv("QCONS_OUTPUT_DIR");
        out_dir = env && *env ? env : ".";
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "config error: cannot create output directory " << out_dir << '\n';
        return kExitConfig;
    }

    std::vector<Outcome> outcomes(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++)
            outcomes[i] = run_one(scenarios[i], out_dir);
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, scenarios.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int status = 0;
    for (const auto& o : outcomes) {
        (o.status == 0 ? std::cout : std::cerr) << o.line << '\n';
        status = std::max(status, o.status);
    }
    return status;
}

int cmd_analyze(const std::string& graph_path, const std::vector<double>& x0, double delta) {
    nlohmann::json graph_json;
    {
        std::ifstream in(graph_path);
        if (!in) {
            std::cerr << "config error: cannot open " << graph_path << '\n';
            return kExitConfig;
        }
        try {
            graph_json = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "config error: " << graph_path << ": " << e.what() << '\n';
            return kExitConfig;
        }
    }
    try {
        const auto g = qcons::graph_from_json(graph_json);
        const auto opt_x0 = x0.empty() ? std::nullopt : std::optional<std::vector<double>>(x0);
        std::cout << qcons::analyze_graph(g, delta, opt_x0).dump(2) << '\n';
    } catch (const qcons::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << graph_path << ": " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

int cmd_presets() {
    for (const auto& p : qcons::presets()) std::cout << p.name << "  " << p.summary << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantized average consensus: Krasowskii and hysteretic simulators"};
    app.require_subcommand(1);

    std::vector<std::string> configs, preset_names;
    unsigned jobs = 1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run scenario configs or presets");
    run->add_option("configs", configs, "Config files (JSON)");
    run->add_option("--preset", preset_names, "Named preset, repeatable");
    run->add_option("-j,--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
    run->add_option("-o,--out", out_dir, "Output directory (default $QCONS_OUTPUT_DIR or .)");

    std::string graph_path;
    std::vector<double> x0;
    double delta = 0.05;
    auto* analyze = app.add_subcommand("analyze", "Spectral data and bounds for a graph file");
    analyze->add_option("graph", graph_path, "Graph JSON {n, adjacency, coords?}")->required();
    analyze->add_option("--x0", x0, "Initial state for dwell-time and data-rate bounds");
    analyze->add_option("--delta", delta, "Quantization step")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("presets", "List the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (*run) return cmd_run(configs, preset_names, jobs, out_dir);
    if (*analyze) return cmd_analyze(graph_path, x0, delta);
    if (*list) return cmd_presets();
    return 0;
}
