#include "cli.hpp"

#include <vrnet/config.hpp>
#include <vrnet/esn.hpp>
#include <vrnet/game.hpp>
#include <vrnet/harness.hpp>
#include <vrnet/vrqos.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace vrnet::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string config;
    std::string policy = "esn";
    std::size_t slots = 500;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string summary;
    std::string mode;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
    RunConfig cfg = load_config(a.config);
    if (!a.mode.empty()) cfg.episode.utility_mode = parse_utility_mode(a.mode);
    const std::uint64_t seed = a.seed.value_or(cfg.scenario.seed);
    const Metrics m = run_episode(cfg.scenario, parse_policy(a.policy), a.slots, seed, cfg.episode);
    if (!a.out.empty()) write_file_atomic(a.out, trace_csv(m));
    if (!a.summary.empty()) write_file_atomic(a.summary, summary_json(m));
    out << fmt::format("policy={} seed={} slots={} total_utility={:.6f} mean_delay_s={:.6g} convergence_slot={} "
                       "serviced_fraction={:.4f}\n",
                       to_string(m.policy), m.seed, m.total_trace.size(), m.final_total_utility, m.mean_delay_s,
                       m.convergence_slot ? std::to_string(*m.convergence_slot) : std::string("none"),
                       m.serviced_fraction);
    return kExitOk;
}

struct SweepArgs {
    std::string config;
    std::string axis = "n_users";
    std::vector<std::size_t> values;
    std::size_t runs = 1;
    std::vector<std::string> policies{"esn", "qlearning", "propfair"};
    std::size_t slots = 500;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string cells;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const RunConfig cfg = load_config(a.config);
    SweepSpec spec;
    spec.axis = parse_axis(a.axis);
    spec.values = a.values;
    spec.runs_per_point = a.runs;
    spec.base = cfg.scenario;
    std::vector<Policy> policies;
    for (const auto& p : a.policies) policies.push_back(parse_policy(p));
    const SweepResult res = run_sweep(spec, policies, a.slots, a.seed.value_or(cfg.scenario.seed), cfg.episode);
    const std::string rows = sweep_csv(res.rows);
    if (!a.out.empty()) {
        write_file_atomic(a.out, rows);
    } else {
        out << rows;
    }
    if (!a.cells.empty()) write_file_atomic(a.cells, cells_csv(res.cells));
    for (const auto& c : res.cells)
        out << fmt::format("{}={} {:<10} utility {:.4f} +- {:.4f}  delay {:.4g} s  serviced {:.3f}\n", a.axis,
                           c.axis_value, c.policy, c.utility_mean, c.utility_sd, c.delay_mean, c.serviced_mean);
    return kExitOk;
}

int cmd_verify_ne(const std::string& table_path, const std::string& profile_path, double tol, std::ostream& out) {
    const GameTable table = GameTable::from_json(read_file(table_path));
    const auto profile = profile_from_json(read_file(profile_path));
    const NeCheck r = verify_mixed_ne(table, profile, tol);
    out << fmt::format("max_regret {:.17g}\n{}\n", r.max_regret, r.is_ne ? "NE" : "NOT NE");
    return r.is_ne ? kExitOk : kExitNegative;
}

int cmd_count_actions(std::size_t users, std::size_t dl, std::size_t ul, bool enumerate, std::ostream& out,
                      std::ostream& err) {
    try {
        const std::uint64_t closed = count_actions(users, dl, ul);
        if (!enumerate) {
            out << closed << "\n";
            return kExitOk;
        }
        const std::size_t oracle = enumerate_actions(users, dl, ul).size();
        const bool match = closed == oracle;
        out << closed << " " << oracle << " " << (match ? "MATCH" : "MISMATCH") << "\n";
        return match ? kExitOk : kExitNegative;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitNegative;
    }
}

int cmd_demand_rate(double w, double h, double depth, double fps, double eyes, double compression,
                    std::ostream& out) {
    const double bps = demand_rate(w, h, depth, fps, eyes, compression);
    out << fmt::format("{} Mbit/s ({} bit/s)\n", to_binary_mbit(bps), bps);
    return kExitOk;
}

struct EsnArgs {
    std::vector<std::size_t> actions;
    std::size_t n_w = 1000;
    double in_scale = 1.0;
    double res_scale = 0.5;
    std::uint64_t seed = 1;
    bool radix = false;
};

int cmd_check_esn(const EsnArgs& a, std::ostream& out) {
    Rng rng(a.seed);
    EsnState e = init_esn(a.n_w, a.actions.size(), a.actions.front(), rng, a.in_scale, a.res_scale);
    if (a.radix) e.w_in = unambiguous_input_weights(a.n_w, a.actions, rng);
    const auto grid = strategy_input_grid(a.actions);
    const auto ok = check_unambiguity(e.w_in, grid);
    const char* verdict = !ok ? "not applicable" : (*ok ? "holds" : "fails");
    out << fmt::format("inputs {}\nunambiguity condition {}\nreadout step {}\n", grid.size(), verdict,
                       ok.value_or(false) ? "constant" : "robbins-monro");
    return ok.value_or(false) ? kExitOk : kExitNegative;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wireless VR small-cell resource allocation simulator"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "run one episode and write its per-slot trace");
    run_cmd->add_option("config", ra.config, "JSON config file")->required();
    run_cmd->add_option("--policy", ra.policy, "esn | qlearning | propfair | exhaustive")->capture_default_str();
    run_cmd->add_option("--slots", ra.slots, "number of time slots")->capture_default_str();
    run_cmd->add_option("--seed", ra.seed, "run seed (default: scenario.seed)");
    run_cmd->add_option("--out", ra.out, "per-slot utility trace CSV");
    run_cmd->add_option("--summary", ra.summary, "JSON summary of the final evaluation");
    run_cmd->add_option("--utility-mode", ra.mode, "live | frozen (overrides the config)");

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and write one row per episode");
    sweep_cmd->add_option("config", sa.config, "JSON config file")->required();
    sweep_cmd->add_option("--axis", sa.axis, "n_sbs | n_users | n_blocks")->capture_default_str();
    sweep_cmd->add_option("--values", sa.values, "comma-separated axis values")->delimiter(',')->required();
    sweep_cmd->add_option("--runs", sa.runs, "runs per axis value")->capture_default_str();
    sweep_cmd->add_option("--policies", sa.policies, "comma-separated policies")->delimiter(',');
    sweep_cmd->add_option("--slots", sa.slots, "slots per episode")->capture_default_str();
    sweep_cmd->add_option("--seed", sa.seed, "master seed (default: scenario.seed)");
    sweep_cmd->add_option("--out", sa.out, "per-episode CSV (default: stdout)");
    sweep_cmd->add_option("--cells", sa.cells, "aggregated mean/sd CSV");

    std::string table_path, profile_path;
    double tol = 1e-6;
    auto* ne_cmd = app.add_subcommand("verify-ne", "check a mixed profile against a game table");
    ne_cmd->add_option("table", table_path, "game table JSON")->required();
    ne_cmd->add_option("profile", profile_path, "profile JSON")->required();
    ne_cmd->add_option("--tol", tol, "regret tolerance")->capture_default_str();

    std::size_t users = 0, dl = 0, ul = 0;
    bool enumerate = false;
    auto* count_cmd = app.add_subcommand("count-actions", "size of one SBS's action space");
    count_cmd->add_option("--users", users, "served users")->required();
    count_cmd->add_option("--dl", dl, "downlink blocks")->required();
    count_cmd->add_option("--ul", ul, "uplink blocks")->required();
    count_cmd->add_flag("--enumerate", enumerate, "also enumerate and compare");

    double width = 1920, height = 1080, depth = 16, fps = 60, eyes = 2, compression = 150;
    auto* demand_cmd = app.add_subcommand("demand-rate", "VR video rate requirement");
    demand_cmd->add_option("--width", width)->capture_default_str();
    demand_cmd->add_option("--height", height)->capture_default_str();
    demand_cmd->add_option("--depth", depth)->capture_default_str();
    demand_cmd->add_option("--fps", fps)->capture_default_str();
    demand_cmd->add_option("--eyes", eyes)->capture_default_str();
    demand_cmd->add_option("--compression", compression)->capture_default_str();

    EsnArgs ea;
    auto* esn_cmd = app.add_subcommand("check-esn", "check the input-weight unambiguity condition");
    esn_cmd->add_option("--actions", ea.actions, "comma-separated action counts, one per SBS")
        ->delimiter(',')
        ->required();
    esn_cmd->add_option("--n-w", ea.n_w, "reservoir size")->capture_default_str();
    esn_cmd->add_option("--in-scale", ea.in_scale)->capture_default_str();
    esn_cmd->add_option("--res-scale", ea.res_scale)->capture_default_str();
    esn_cmd->add_option("--seed", ea.seed)->capture_default_str();
    esn_cmd->add_flag("--radix", ea.radix, "use the constructed unambiguous input weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(ra, out);
        if (*sweep_cmd) return cmd_sweep(sa, out);
        if (*ne_cmd) return cmd_verify_ne(table_path, profile_path, tol, out);
        if (*count_cmd) return cmd_count_actions(users, dl, ul, enumerate, out, err);
        if (*demand_cmd) return cmd_demand_rate(width, height, depth, fps, eyes, compression, out);
        if (*esn_cmd) return cmd_check_esn(ea, out);
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace vrnet::cli
