#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "sps/potentials.hpp"
#include "sps/radial.hpp"
#include "sps/run.hpp"

using namespace sps;
namespace fs = std::filesystem;

namespace {

fs::path scratch_root() {
    const fs::path p = fs::temp_directory_path() / "sps_run_tests";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

/// Minimal field scraper for the flat JSON the run module emits; enough to
/// check scalar fields without pulling a parser into the test.
std::string json_field(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\": ";
    const std::size_t at = text.find(needle);
    REQUIRE(at != std::string::npos);
    std::size_t b = at + needle.size();
    std::size_t e = b;
    while (e < text.size() && text[e] != ',' && text[e] != '\n' && text[e] != '}') ++e;
    std::string v = text.substr(b, e - b);
    if (!v.empty() && v.front() == '"') v = v.substr(1, v.size() - 2);
    return v;
}

RunConfig small_solve_config(const std::string& out) {
    RunConfig cfg;
    cfg.mode = "solve";
    cfg.grid_n = 1000;
    cfg.r_max = 40.0;
    cfg.omega = -0.1;
    cfg.solver.grad_tol = 1e-6;
    cfg.solver.max_iters = 2000;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("flat key=value files parse with comments and whitespace") {
    const fs::path dir = scratch_root();
    const fs::path file = dir / "basic.cfg";
    spill(file,
          "# a comment line\n"
          "mode = minimax   # trailing comment\n"
          "\n"
          "  omega=-0.25\n"
          "grid_kind = logarithmic\n");
    auto kv = parse_kv_file(file.string());
    CHECK(kv.size() == 3);
    CHECK(kv.at("mode") == "minimax");
    CHECK(kv.at("omega") == "-0.25");
    CHECK(kv.at("grid_kind") == "logarithmic");

    spill(file, "mode minimax\n");
    CHECK_THROWS_AS(parse_kv_file(file.string()), ConfigError);
    CHECK_THROWS_AS(parse_kv_file((dir / "does_not_exist.cfg").string()), ConfigError);
}

TEST_CASE("assignments land in the config and bad input is rejected") {
    RunConfig cfg;
    apply_kv(cfg, {{"mode", "verify"},
                   {"grid_kind", "logarithmic"},
                   {"grid_n", "2500"},
                   {"r_min", "1e-4"},
                   {"omega", "-0.3"},
                   {"precondition", "none"},
                   {"coupling", "false"},
                   {"seed", "42"},
                   {"formats", "csv"},
                   {"k_max", "2"}});
    CHECK(cfg.mode == "verify");
    CHECK(cfg.grid_kind == GridKind::logarithmic);
    CHECK(cfg.grid_n == 2500);
    CHECK(cfg.r_min == 1e-4);
    CHECK(cfg.omega == -0.3);
    CHECK(cfg.solver.precondition == Preconditioner::none);
    CHECK_FALSE(cfg.solver.coupling_enabled);
    CHECK(cfg.solver.seed == 42);
    CHECK(cfg.write_csv);
    CHECK_FALSE(cfg.write_json);
    CHECK(cfg.k_max == 2);

    RunConfig fresh;
    CHECK_THROWS_AS(apply_kv(fresh, {{"no_such_key", "1"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"omega", "fast"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"grid_n", "-5"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"grid_n", "12x"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"coupling", "maybe"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"formats", "xml"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"grid_kind", "radial"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"precondition", "ilu"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"threads", "0"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(fresh, {{"k_max", "0"}}), ConfigError);
}

TEST_CASE("config validation rejects inconsistent combinations") {
    const auto rejected = [](void (*tweak)(RunConfig&)) {
        RunConfig cfg;
        tweak(cfg);
        CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    };
    rejected([](RunConfig& c) { c.mode = "explore"; });
    rejected([](RunConfig& c) { c.potential = "hooke"; });
    rejected([](RunConfig& c) { c.grid_kind = GridKind::logarithmic; });  // r_min = 0
    rejected([](RunConfig& c) { c.r_min = 0.5; });  // uniform grid with r_min
    rejected([](RunConfig& c) { c.grid_n = 4; });
    rejected([](RunConfig& c) { c.r_max = -3.0; });
    rejected([](RunConfig& c) { c.solver.grad_tol = 0.0; });
    rejected([](RunConfig& c) { c.solver.max_iters = 0; });
    rejected([](RunConfig& c) { c.dist_tol = 0.0; });
    rejected([](RunConfig& c) { c.safety_factor = 1.0; });
    rejected([](RunConfig& c) { c.mode = "solve"; c.r_max = 2.0; });
    rejected([](RunConfig& c) { c.mode = "minimax"; c.samples = 200; c.k_max = 3; });
    rejected([](RunConfig& c) { c.mode = "hydrogen"; c.potential = "yukawa"; });

    RunConfig good;
    CHECK_NOTHROW(validate_config(good));
}

TEST_CASE("the potential catalog is wired through by name") {
    RunConfig cfg;
    cfg.potential = "coulomb";
    cfg.Z = 2.0;
    CHECK(configured_potential(cfg).eval(0.5) == doctest::Approx(4.0));

    cfg.potential = "yukawa";
    cfg.mu = 1.0;
    CHECK(configured_potential(cfg).label.find("yukawa") != std::string::npos);

    cfg.potential = "none";
    const Potential zero = configured_potential(cfg);
    CHECK(zero.eval(5.0) == 0.0);
    CHECK(zero.label == "none");
    auto grid = make_grid(GridKind::uniform, 500, 50.0);
    const HypothesisReport hr = check_hypotheses(zero, grid);
    CHECK(hr.v1_continuous_away_from_0);
    CHECK(hr.v2_finite);
    CHECK(hr.v3_vanishes_at_infinity);
    CHECK_FALSE(hr.v4_r2v_diverges);  // r^2 * 0 does not diverge

    cfg.potential = "power_law";
    cfg.alpha = 5.0;  // factory precondition violated -> config error
    CHECK_THROWS_AS(configured_potential(cfg), ConfigError);
}

TEST_CASE("solve mode writes the full artifact set and succeeds") {
    const fs::path out = scratch_root() / "solve_ok";
    fs::remove_all(out);
    RunConfig cfg = small_solve_config(out.string());
    CHECK(run(cfg) == kExitSuccess);

    const std::string summary = slurp(out / "summary.json");
    CHECK(json_field(summary, "schema_version") == "1");
    CHECK(json_field(summary, "mode") == "solve");
    CHECK(json_field(summary, "converged") == "true");
    CHECK(json_field(summary, "below_threshold") == "true");
    CHECK(json_field(summary, "threshold") == "0.05");
    CHECK(fs::exists(out / "hypotheses.json"));
    CHECK(fs::exists(out / "run_metadata.json"));

    const std::string csv = slurp(out / "solution_1.csv");
    CHECK(csv.rfind("r,u,phi\n", 0) == 0);
    // header + one row per node
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1001);
    // first column reproduces the first grid node to full precision
    auto grid = make_grid(cfg.grid_kind, cfg.grid_n, cfg.r_max, cfg.r_min);
    const std::string first_row = csv.substr(csv.find('\n') + 1);
    CHECK(std::stod(first_row) == grid->nodes[0]);
}

TEST_CASE("identical configs reproduce summary.json byte for byte") {
    const fs::path out = scratch_root() / "solve_repeat";
    fs::remove_all(out);
    RunConfig cfg = small_solve_config(out.string());
    REQUIRE(run(cfg) == kExitSuccess);
    const std::string first = slurp(out / "summary.json");
    REQUIRE(run(cfg) == kExitSuccess);
    CHECK(first == slurp(out / "summary.json"));
}

TEST_CASE("the config echo inside a summary reproduces the run") {
    const fs::path out_a = scratch_root() / "echo_a";
    const fs::path out_b = scratch_root() / "echo_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    RunConfig cfg = small_solve_config(out_a.string());
    REQUIRE(run(cfg) == kExitSuccess);
    const std::string summary_a = slurp(out_a / "summary.json");

    RunConfig echoed = config_from_echo(summary_a);
    CHECK(echoed.mode == cfg.mode);
    CHECK(echoed.grid_n == cfg.grid_n);
    CHECK(echoed.omega == cfg.omega);
    CHECK(echoed.solver.grad_tol == cfg.solver.grad_tol);

    echoed.out_dir = out_b.string();
    REQUIRE(run(echoed) == kExitSuccess);
    std::string summary_b = slurp(out_b / "summary.json");
    // The only legitimate difference is the output directory echo itself.
    const std::string a_dir = "\"out_dir\": \"" + out_a.string() + "\"";
    const std::string b_dir = "\"out_dir\": \"" + out_b.string() + "\"";
    const std::size_t at = summary_b.find(b_dir);
    REQUIRE(at != std::string::npos);
    summary_b.replace(at, b_dir.size(), a_dir);
    CHECK(summary_b == summary_a);

    CHECK_THROWS_AS(config_from_echo("not json at all"), ConfigError);
    CHECK_THROWS_AS(config_from_echo("{\"no_config\": 1}"), ConfigError);
}

TEST_CASE("nonnegative omega in a theorem mode exits 3 with no artifacts") {
    const fs::path out = scratch_root() / "omega_gate";
    fs::remove_all(out);
    for (const std::string mode : {"solve", "multiplicity", "minimax"}) {
        RunConfig cfg = small_solve_config(out.string());
        cfg.mode = mode;
        cfg.omega = 0.1;
        CHECK(run(cfg) == kExitHypothesisError);
        CHECK_FALSE(fs::exists(out));
    }
    // verify mode has no sign restriction
    RunConfig cfg;
    cfg.mode = "verify";
    cfg.omega = 0.1;
    cfg.grid_n = 2000;
    cfg.r_max = 40.0;
    cfg.out_dir = (scratch_root() / "verify_pos_omega").string();
    CHECK(run(cfg) == kExitSuccess);
}

TEST_CASE("non-convergence exits 4 but still writes flagged artifacts") {
    const fs::path out = scratch_root() / "solve_cut";
    fs::remove_all(out);
    RunConfig cfg = small_solve_config(out.string());
    cfg.solver.max_iters = 3;
    cfg.solver.grad_tol = 1e-12;
    CHECK(run(cfg) == kExitNotConverged);
    const std::string summary = slurp(out / "summary.json");
    CHECK(json_field(summary, "converged") == "false");
    CHECK(json_field(summary, "exit_code") == "4");
    CHECK(fs::exists(out / "solution_1.csv"));
}

TEST_CASE("invalid configurations are refused before any work") {
    RunConfig cfg = small_solve_config((scratch_root() / "never").string());
    cfg.mode = "imagined";
    CHECK_THROWS_AS(run(cfg), ConfigError);
    CHECK_FALSE(fs::exists(scratch_root() / "never"));
}

TEST_CASE("minimax mode turns a refuted construction into exit 3") {
    const fs::path out = scratch_root() / "minimax_yukawa";
    fs::remove_all(out);
    RunConfig cfg;
    cfg.mode = "minimax";
    cfg.potential = "yukawa";
    cfg.omega = -0.1;
    cfg.k_max = 1;
    cfg.grid_n = 1500;
    cfg.r_max = 150.0;
    cfg.out_dir = out.string();
    CHECK(run(cfg) == kExitHypothesisError);
    const std::string summary = slurp(out / "summary.json");
    CHECK(summary.find("\"error\"") != std::string::npos);
    CHECK(summary.find("hypotheses_at_failure") != std::string::npos);
    CHECK(json_field(summary, "v4_r2v_diverges") == "false");
}

TEST_CASE("multiplicity mode flags violated hypotheses without hard failure") {
    const fs::path out = scratch_root() / "multiplicity_yukawa";
    fs::remove_all(out);
    RunConfig cfg;
    cfg.mode = "multiplicity";
    cfg.potential = "yukawa";
    cfg.omega = -0.1;
    cfg.k_max = 1;
    cfg.grid_n = 1500;
    cfg.r_max = 100.0;
    cfg.solver.grad_tol = 1e-7;
    cfg.out_dir = out.string();
    CHECK(run(cfg) == kExitSuccess);  // the unconstrained fallback converged
    const std::string summary = slurp(out / "summary.json");
    CHECK(json_field(summary, "hypothesis_violated") == "true");
    CHECK(summary.find("(V4)") != std::string::npos);
}

TEST_CASE("hydrogen mode reports the analytic comparison table") {
    const fs::path out = scratch_root() / "hydrogen_table";
    fs::remove_all(out);
    RunConfig cfg;
    cfg.mode = "hydrogen";
    cfg.grid_kind = GridKind::logarithmic;
    cfg.grid_n = 2000;
    cfg.r_max = 60.0;
    cfg.r_min = 1e-4;
    cfg.k_max = 2;
    cfg.out_dir = out.string();
    CHECK(run(cfg) == kExitSuccess);
    const std::string summary = slurp(out / "summary.json");
    CHECK(json_field(summary, "analytic") == "-0.5");
    CHECK(std::stod(json_field(summary, "max_rel_error")) < 1e-3);
    CHECK(std::stod(json_field(summary, "rel_error")) < 1e-4);  // ground level
}

TEST_CASE("verify mode runs its invariant suite green") {
    const fs::path out = scratch_root() / "verify_small";
    fs::remove_all(out);
    RunConfig cfg;
    cfg.mode = "verify";
    // The brute-force field agreement is an O(h^2) statement with a fixed
    // 1e-6 budget, so verify runs need adequate resolution: h = 0.02 here.
    cfg.grid_n = 2000;
    cfg.r_max = 40.0;
    cfg.omega = -0.1;
    cfg.out_dir = out.string();
    CHECK(run(cfg) == kExitSuccess);
    const std::string summary = slurp(out / "summary.json");
    CHECK(json_field(summary, "all_passed") == "true");
}

TEST_CASE("format selection controls which artifacts appear") {
    const fs::path out = scratch_root() / "formats_csv_only";
    fs::remove_all(out);
    RunConfig cfg = small_solve_config(out.string());
    cfg.write_json = false;
    CHECK(run(cfg) == kExitSuccess);
    CHECK(fs::exists(out / "solution_1.csv"));
    CHECK_FALSE(fs::exists(out / "summary.json"));

    const fs::path out2 = scratch_root() / "formats_json_only";
    fs::remove_all(out2);
    cfg.out_dir = out2.string();
    cfg.write_json = true;
    cfg.write_csv = false;
    CHECK(run(cfg) == kExitSuccess);
    CHECK(fs::exists(out2 / "summary.json"));
    CHECK_FALSE(fs::exists(out2 / "solution_1.csv"));
}

TEST_CASE("the installed binary honors flags, config files, and exit codes") {
    const fs::path binary = fs::current_path() / "spsolve";
    REQUIRE(fs::exists(binary));
    const fs::path dir = scratch_root();
    const auto shell = [&](const std::string& args) {
        const std::string cmd = binary.string() + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    CHECK(shell("--help") == 0);
    CHECK(shell("--mode nosuch") == kExitConfigError);
    CHECK(shell("--mode solve --omega 0.5") == kExitHypothesisError);

    const fs::path cfg_file = dir / "cli.cfg";
    const fs::path out = dir / "cli_out";
    fs::remove_all(out);
    spill(cfg_file,
          "mode = hydrogen\ngrid_kind = logarithmic\ngrid_n = 1200\n"
          "r_max = 60\nr_min = 1e-4\nk_max = 1\nout_dir = " + out.string() + "\n");
    CHECK(shell("--config " + cfg_file.string()) == 0);
    CHECK(fs::exists(out / "summary.json"));
    // flags override the file: a bad mode from the flag side must win
    CHECK(shell("--config " + cfg_file.string() + " --mode nosuch") == kExitConfigError);
}
