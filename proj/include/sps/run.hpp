// Run orchestration: flat key=value configuration, mode dispatch, and
// machine-readable artifacts (summary.json, per-solution CSV, hypothesis
// report).  Everything volatile (timestamps) is quarantined in a separate
// metadata file so that identical configurations reproduce summary.json
// byte for byte.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "sps/potentials.hpp"
#include "sps/radial.hpp"
#include "sps/solver.hpp"

namespace sps {

/// Raised for unparseable, unknown, or out-of-range configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Process exit codes of run().
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 2;      ///< bad keys/values/combinations
inline constexpr int kExitHypothesisError = 3;  ///< omega >= 0 in a theorem mode,
                                                ///< or the subspace construction
                                                ///< refuting a minimax run
inline constexpr int kExitNotConverged = 4;     ///< artifacts written, converged=false

/// Flat run configuration.  Field defaults are the documented defaults of the
/// key=value config format (one `key = value` per line, `#` comments).
struct RunConfig {
    std::string mode = "solve";  ///< solve | multiplicity | minimax | verify | hydrogen

    GridKind grid_kind = GridKind::uniform;
    std::size_t grid_n = 4000;
    double r_max = 80.0;
    double r_min = 0.0;  ///< used by logarithmic grids; must be > 0 there

    std::string potential = "coulomb";  ///< coulomb | power_law | yukawa | none
    double Z = 1.0;
    double alpha = 1.0;  ///< power_law exponent
    double mu = 1.0;     ///< yukawa screening rate

    double omega = -0.1;
    int k_max = 3;               ///< levels for multiplicity/minimax/hydrogen
    std::size_t samples = 5000;  ///< coefficient-sphere samples per minimax level
    double dist_tol = 1e-3;      ///< L^2 distinctness threshold of the pipeline
    double safety_factor = 0.5;  ///< common-dilation margin of the subspace build

    SolveOptions solver;  ///< keys: max_iters, grad_tol, precondition, coupling,
                          ///<       deflation_strength, seed

    std::string out_dir = "out";
    bool write_csv = true;   ///< formats key, e.g. "csv,json"
    bool write_json = true;
    int threads = 1;  ///< reserved parallelism policy; this build runs serially
};

/// Parse a flat key=value file.  Throws ConfigError on unreadable files or
/// malformed lines; key validity is checked later by apply_kv.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// Apply key=value assignments onto cfg.  Unknown keys and unparseable values
/// throw ConfigError.  Call once with file contents, then again with
/// command-line overrides: the later application wins.
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// Range/combination checks (grid sizes, tolerances, mode-specific
/// requirements).  Throws ConfigError; run() calls this first.
void validate_config(const RunConfig& cfg);

/// Instantiate the configured external potential.
Potential configured_potential(const RunConfig& cfg);

/// Rebuild a RunConfig from the `config` echo inside a summary.json text, so
/// a published summary is a complete recipe for reproducing itself.
RunConfig config_from_echo(const std::string& summary_json_text);

/// Execute the configured mode and write artifacts under cfg.out_dir:
///   summary.json       deterministic result record (config echo included)
///   hypotheses.json    structural checks of the configured potential
///   solution_<k>.csv   r, u(r), phi(r) columns at full double precision
///   run_metadata.json  timestamps/duration (the only volatile file)
/// Returns an exit code from the table above.  ConfigError propagates to the
/// caller (no artifacts); omega >= 0 in solve/multiplicity/minimax modes
/// returns kExitHypothesisError before anything is written.
int run(const RunConfig& cfg);

}  // namespace sps
