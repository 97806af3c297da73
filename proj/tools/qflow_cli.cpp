#include "qflow/flows.hpp"
#include "qflow/geometry.hpp"
#include "qflow/io.hpp"
#include "qflow/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using qflow::io::RunConfig;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_numeric = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    bool svg = false;
    std::string resolution;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config)
{
    auto* positional = cmd->add_option("config_file", opts.config_path, "JSON configuration file");
    auto* flag = cmd->add_option("--config", opts.config_path, "JSON configuration file");
    if (needs_config) positional->excludes(flag);
    cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
    cmd->add_flag("--svg", opts.svg, "also write an SVG plot");
    cmd->add_option("--resolution", opts.resolution, "grid resolution LAT,LON");
    cmd->add_option("--seed", opts.seed, "seed for random shapes");
}

RunConfig load_config(const CommonOptions& opts)
{
    if (opts.config_path.empty()) throw qflow::io::ConfigError("no configuration file given");
    std::ifstream in(opts.config_path);
    if (!in) throw qflow::io::ConfigError("cannot open " + opts.config_path);
    qflow::io::json j;
    try {
        j = qflow::io::json::parse(in);
    } catch (const qflow::io::json::parse_error& e) {
        throw qflow::io::ConfigError(opts.config_path + ": " + e.what());
    }
    RunConfig cfg = qflow::io::parse_config(j);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.svg) cfg.emit_svg = true;
    if (opts.seed) cfg.seed = *opts.seed;
    if (!opts.resolution.empty()) {
        const auto comma = opts.resolution.find(',');
        if (comma == std::string::npos)
            throw qflow::io::ConfigError("--resolution expects LAT,LON");
        cfg.n_lat = std::stoi(opts.resolution.substr(0, comma));
        cfg.n_lon = std::stoi(opts.resolution.substr(comma + 1));
    }
    return cfg;
}

qflow::grid::GridPtr make_grid(const RunConfig& cfg, int dim)
{
    return qflow::grid::build_grid(dim, dim == 1 ? 0 : cfg.n_lat,
                                   dim == 1 ? std::max(cfg.n_lon, 64) : cfg.n_lon);
}

int run_flow(const RunConfig& cfg)
{
    const auto grid = make_grid(cfg, cfg.flow.dim);
    const auto initial = qflow::io::build_shape(cfg.shape, grid, cfg.seed);
    const auto norms = qflow::grid::sup_norms(initial.u);
    std::printf("initial shape: C0=%.3e C1=%.3e C2=%.3e\n", norms.c0, norms.c1, norms.c2);

    const auto result = qflow::flows::run(cfg.flow, initial);

    fs::create_directories(cfg.output_dir);
    const std::string csv_path = (fs::path(cfg.output_dir) / "diagnostics.csv").string();
    if (!result.rows.empty()) {
        qflow::io::emit_csv(result.rows, csv_path);
        std::printf("wrote %zu rows to %s\n", result.rows.size(), csv_path.c_str());
        if (cfg.emit_svg) {
            const std::string svg_path = (fs::path(cfg.output_dir) / "diagnostics.svg").string();
            const std::string svg_log_path =
                (fs::path(cfg.output_dir) / "diagnostics_norms.svg").string();
            qflow::io::emit_svg(result.rows, {"I_k", "I_km1", "Vol", "S", "alpha"}, svg_path);
            qflow::io::emit_svg(result.rows, {"C0", "C1", "C2"}, svg_log_path, /*log_scale=*/true);
            std::printf("wrote %s and %s\n", svg_path.c_str(), svg_log_path.c_str());
        }
    }
    if (!result.completed) {
        std::fprintf(stderr, "run aborted: %s\n", result.abort_reason.c_str());
        return exit_numeric;
    }
    const auto& last = result.rows.back();
    std::printf("t=%.4f I_k=%.9g I_km1=%.9g Vol=%.9g C0=%.3e\n", last.t, last.quermass_k,
                last.quermass_km1, last.volume, last.c0);
    if (result.pinching_violated)
        std::printf("note: pinching ratio dropped below %.3e during the run\n",
                    result.pinching_threshold);
    return exit_ok;
}

int run_analyze(const RunConfig& cfg)
{
    const auto grid = make_grid(cfg, 2);
    const auto surface = qflow::io::build_shape(cfg.shape, grid, cfg.seed);
    const auto norms = qflow::grid::sup_norms(surface.u);
    std::printf("shape loaded: C0=%.3e C1=%.3e C2=%.3e\n", norms.c0, norms.c1, norms.c2);
    const auto report = qflow::geometry::shape_report(surface);
    const auto j = qflow::io::to_json(report);
    fs::create_directories(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / "shape_report.json").string();
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    std::printf("wrote %s\n", path.c_str());
    return exit_ok;
}

int run_verify(const std::string& suite)
{
    const auto& table = qflow::verify::suites();
    std::vector<std::string> names;
    if (suite.empty() || suite == "all") {
        for (const auto& [name, fn] : table) names.push_back(name);
    } else if (table.count(suite)) {
        names.push_back(suite);
    } else {
        std::fprintf(stderr, "unknown suite \"%s\"; available:", suite.c_str());
        for (const auto& [name, fn] : table) std::fprintf(stderr, " %s", name.c_str());
        std::fprintf(stderr, "\n");
        return exit_validation;
    }
    bool all_pass = true;
    for (const auto& name : names) {
        const auto checks = table.at(name)();
        for (const auto& check : checks) {
            all_pass = all_pass && check.pass;
            std::printf("[%s] %-52s %s  %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                        name.c_str(), check.detail.c_str());
        }
    }
    return all_pass ? exit_ok : exit_numeric;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"curvature flows of starshaped hypersurfaces over the unit sphere"};
    app.require_subcommand(1);

    CommonOptions flow_opts;
    auto* flow_cmd = app.add_subcommand("flow", "run a curvature flow");
    std::string flow_action = "run";
    flow_cmd->add_option("action", flow_action, "flow action (run)")->required();
    add_common(flow_cmd, flow_opts, true);

    CommonOptions analyze_opts;
    auto* analyze_cmd = app.add_subcommand("analyze", "static analysis of a shape");
    add_common(analyze_cmd, analyze_opts, true);

    auto* verify_cmd = app.add_subcommand("verify", "run the module invariant suites");
    std::string suite;
    verify_cmd->add_option("suite", suite, "suite name (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flow_cmd->parsed()) {
            if (flow_action != "run") {
                std::fprintf(stderr, "unknown flow action \"%s\" (expected: run)\n",
                             flow_action.c_str());
                return exit_validation;
            }
            const RunConfig cfg = load_config(flow_opts);
            if (cfg.mode != qflow::io::RunMode::flow) {
                std::fprintf(stderr, "config mode is not \"flow\"\n");
                return exit_validation;
            }
            return run_flow(cfg);
        }
        if (analyze_cmd->parsed()) {
            const RunConfig cfg = load_config(analyze_opts);
            return run_analyze(cfg);
        }
        if (verify_cmd->parsed()) {
            return run_verify(suite);
        }
    } catch (const qflow::io::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_validation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return exit_validation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numeric;
    }
    return exit_validation;
}
