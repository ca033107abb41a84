// Command-line front end: collects a flat key=value config file plus flag
// overrides (flags win), then hands a RunConfig to sps::run().
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sps/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "spsolve: radial bound states of an attractively-driven "
        "Schrodinger field coupled to its own repulsive potential.\n"
        "Modes: solve (one descent run), multiplicity (distinct-solution "
        "pipeline), minimax (level upper bounds), verify (numerical invariant "
        "suite), hydrogen (eigensolver vs closed form)."};

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file");

    // Every override is kept as text and parsed by the same code path as the
    // config file, so validation and error reporting are identical.
    std::map<std::string, std::string> overrides;
    const auto add = [&](const std::string& flag, const std::string& key,
                         const std::string& help) {
        app.add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    add("--mode", "mode", "solve | multiplicity | minimax | verify | hydrogen");
    add("--omega", "omega", "frequency parameter (theorem modes require < 0)");
    add("--potential", "potential", "coulomb | power_law | yukawa | none");
    add("--Z", "Z", "potential strength");
    add("--alpha", "alpha", "power_law exponent in (0, 2)");
    add("--mu", "mu", "yukawa screening rate");
    add("--k-max", "k_max", "levels for multiplicity/minimax/hydrogen");
    add("--grid-n", "grid_n", "number of radial nodes");
    add("--r-max", "r_max", "domain radius");
    add("--seed", "seed", "seed for randomized seeding and sampling");
    add("--out", "out_dir", "output directory for artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sps::kExitConfigError;
    }

    try {
        sps::RunConfig cfg;
        if (!config_path.empty()) sps::apply_kv(cfg, sps::parse_kv_file(config_path));
        sps::apply_kv(cfg, overrides);
        return sps::run(cfg);
    } catch (const sps::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return sps::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sps::kExitConfigError;
    }
}
