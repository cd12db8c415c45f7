#include "vrnet/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace vrnet {

Policy parse_policy(const std::string& name) {
    if (name == "esn") return Policy::Esn;
    if (name == "qlearning") return Policy::QLearning;
    if (name == "propfair") return Policy::PropFair;
    if (name == "exhaustive") return Policy::Exhaustive;
    throw std::invalid_argument("unknown policy '" + name + "' (esn | qlearning | propfair | exhaustive)");
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::Esn: return "esn";
        case Policy::QLearning: return "qlearning";
        case Policy::PropFair: return "propfair";
        case Policy::Exhaustive: return "exhaustive";
    }
    return "esn";
}

UtilityMode parse_utility_mode(const std::string& name) {
    if (name == "live") return UtilityMode::Live;
    if (name == "frozen") return UtilityMode::Frozen;
    throw std::invalid_argument("unknown utility mode '" + name + "' (live | frozen)");
}

std::string to_string(UtilityMode m) { return m == UtilityMode::Live ? "live" : "frozen"; }

double standalone_utility(const QosParams& p, const NetworkState& state, std::size_t user, std::size_t sbs) {
    const double path = state.path(user, sbs);
    const double bw = state.radio.bandwidth_hz;
    const double r_dl = block_rate(state.radio.p_sbs_w * path / state.radio.noise_w, bw);
    const double r_ul = block_rate(state.radio.p_user_w * path / state.radio.noise_w, bw);
    UserLinkState s;
    s.k = 1.0;
    s.dl_rate = static_cast<double>(state.n_dl) * r_dl;
    s.dl_rate_min = r_dl;
    s.ul_rate = static_cast<double>(state.n_ul) * r_ul;
    s.processing_delay = 0.0;
    return link_utility(p, s);
}

void associate_by_utility(NetworkState& state, const ScenarioConfig& cfg, const QosParams& p) {
    associate_nearest(state, cfg, [&](std::size_t u, std::size_t b) { return standalone_utility(p, state, u, b); });
}

namespace {

std::vector<Action> joint_of(const std::vector<std::vector<Action>>& sets, const std::vector<std::size_t>& idx) {
    std::vector<Action> joint(sets.size());
    for (std::size_t j = 0; j < sets.size(); ++j) joint[j] = sets[j].at(idx[j]);
    return joint;
}

void record(Metrics& m, const std::vector<double>& u) {
    m.slot_utility.push_back(u);
    m.total_trace.push_back(std::accumulate(u.begin(), u.end(), 0.0));
}

}  // namespace

Metrics run_episode(const ScenarioConfig& cfg, Policy policy, std::size_t t_slots, std::uint64_t seed,
                    const EpisodeOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    options.learner.validate();
    const QosParams qos = QosParams::from(cfg);

    Rng scenario_rng(derive_seed(seed, "scenario"));
    NetworkState state = place_scenario(cfg, scenario_rng);
    associate_by_utility(state, cfg, qos);

    std::vector<std::vector<Action>> sets;
    for (std::size_t j = 0; j < state.n_sbs(); ++j)
        sets.push_back(action_set(state.served[j].size(), cfg.n_dl_blocks, cfg.n_ul_blocks));

    Metrics m;
    m.policy = policy;
    m.seed = seed;
    for (const auto& s : sets) m.action_counts.push_back(s.size());

    TrajectoryGenerator trajectories(cfg.n_users, derive_seed(seed, "trajectory"));
    const std::vector<TrackingVector> first_truths = trajectories.next();

    if (options.utility_mode == UtilityMode::Frozen || policy == Policy::Exhaustive)
        m.table = std::make_shared<const GameTable>(
            build_game_table(qos, state, sets, first_truths, derive_seed(seed, "table"), options.table_cap));

    Rng live_rng(derive_seed(seed, "live"));
    std::unique_ptr<UtilitySource> source;
    LiveSource* live = nullptr;
    if (options.utility_mode == UtilityMode::Frozen) {
        source = std::make_unique<FrozenTableSource>(*m.table);
    } else {
        auto ls = std::make_unique<LiveSource>(qos, state, sets, trajectories, live_rng);
        live = ls.get();
        source = std::move(ls);
    }

    Rng policy_rng(derive_seed(seed, to_string(policy)));
    if (policy == Policy::Esn || policy == Policy::QLearning) {
        std::unique_ptr<Learner> learner;
        if (policy == Policy::Esn) {
            Rng init_rng(derive_seed(seed, "esn-init"));
            learner = std::make_unique<EsnLearner>(options.learner, m.action_counts, init_rng);
        } else {
            learner = std::make_unique<QLearner>(options.learner, m.action_counts);
        }
        for (std::size_t t = 0; t < t_slots; ++t) record(m, learner->play_slot(*source, policy_rng).utilities);
        m.final_actions = learner->greedy_actions();
        m.convergence_slot = learner->convergence_slot();
    } else {
        if (policy == Policy::PropFair) {
            m.final_actions.assign(sets.size(), 0);
            for (std::size_t j = 0; j < sets.size(); ++j)
                if (!state.served[j].empty())
                    m.final_actions[j] =
                        action_index(sets[j], proportional_fair_allocate(state, j, options.demand_bps));
        } else {
            m.final_actions = exhaustive_optimal(*m.table, options.table_cap);
        }
        for (std::size_t t = 0; t < t_slots; ++t) record(m, source->evaluate(m.final_actions));
        if (t_slots > 0) m.convergence_slot = 1;
    }
    for (std::size_t j = 0; j < sets.size(); ++j)
        m.final_profile.push_back(MixedStrategy::point(sets[j].size(), m.final_actions[j]));

    // final evaluation of the highest-probability joint action
    const std::vector<Action> joint = joint_of(sets, m.final_actions);
    const auto& truths = (live != nullptr && t_slots > 0) ? live->last_truths() : first_truths;
    Rng eval_rng(derive_seed(seed, "final"));
    double evaluated_total = 0.0;
    std::size_t serviced = 0;
    for (std::size_t j = 0; j < state.n_sbs(); ++j) {
        for (std::size_t u : state.served[j]) {
            UserOutcome o{u, j, evaluate_user(qos, state, joint, u, truths[u], eval_rng)};
            evaluated_total += o.qos.total_utility;
            m.delay_samples.push_back(o.qos.d_total);
            m.final_users.push_back(o);
            ++serviced;
        }
    }
    m.final_on_table = m.table != nullptr;
    m.final_total_utility = m.final_on_table ? m.table->total_utility(m.final_actions) : evaluated_total;
    m.mean_delay_s = m.delay_samples.empty()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : std::accumulate(m.delay_samples.begin(), m.delay_samples.end(), 0.0) /
                               static_cast<double>(m.delay_samples.size());
    m.serviced_fraction =
        cfg.n_users == 0 ? 0.0 : static_cast<double>(serviced) / static_cast<double>(cfg.n_users);
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
}

Metrics run_episode(const ScenarioConfig& cfg, const std::string& policy, std::size_t t_slots, std::uint64_t seed,
                    const EpisodeOptions& options) {
    return run_episode(cfg, parse_policy(policy), t_slots, seed, options);
}

std::vector<double> delay_cdf(const std::vector<double>& samples, const std::vector<double>& grid) {
    if (samples.empty()) throw std::invalid_argument("delay CDF needs at least one sample");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(sorted.size());
    for (double g : grid) {
        const auto k = std::upper_bound(sorted.begin(), sorted.end(), g) - sorted.begin();
        out.push_back(static_cast<double>(k) / n);
    }
    return out;
}

std::vector<double> delay_cdf(const Metrics& metrics, const std::vector<double>& grid) {
    return delay_cdf(metrics.delay_samples, grid);
}

std::size_t convergence_iterations(const std::vector<double>& trace, std::size_t window, double rel_tol) {
    if (window == 0) throw std::invalid_argument("convergence window must be >= 1");
    if (trace.size() < window) throw std::invalid_argument("trace is shorter than the convergence window");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("rel_tol must be >= 0");
    const std::size_t n = trace.size() - window + 1;
    std::vector<double> prefix(trace.size() + 1, 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) prefix[i + 1] = prefix[i] + trace[i];
    auto mean = [&](std::size_t i) { return (prefix[i + window] - prefix[i]) / static_cast<double>(window); };
    const double final_mean = mean(n - 1);
    const double tol = rel_tol * std::abs(final_mean) + 1e-12;
    std::size_t first = n;
    for (std::size_t i = n; i-- > 0;) {
        if (std::abs(mean(i) - final_mean) > tol) break;
        first = i + 1;
    }
    return first;
}

std::string trace_csv(const Metrics& m) {
    std::string out = "slot";
    for (std::size_t j = 0; j < m.action_counts.size(); ++j) out += fmt::format(",sbs{}", j);
    out += ",total\n";
    for (std::size_t t = 0; t < m.slot_utility.size(); ++t) {
        out += fmt::format("{}", t + 1);
        for (double u : m.slot_utility[t]) out += fmt::format(",{:.17g}", u);
        out += fmt::format(",{:.17g}\n", m.total_trace[t]);
    }
    return out;
}

std::string summary_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["policy"] = to_string(m.policy);
    j["seed"] = m.seed;
    j["slots"] = m.total_trace.size();
    j["action_counts"] = m.action_counts;
    j["final_actions"] = m.final_actions;
    j["final_total_utility"] = m.final_total_utility;
    j["final_on_table"] = m.final_on_table;
    j["convergence_slot"] = m.convergence_slot ? nlohmann::ordered_json(*m.convergence_slot) : nlohmann::ordered_json();
    j["mean_delay_s"] = m.mean_delay_s;
    j["serviced_fraction"] = m.serviced_fraction;
    nlohmann::ordered_json users = nlohmann::ordered_json::array();
    for (const auto& u : m.final_users) {
        nlohmann::ordered_json r;
        r["user"] = u.user;
        r["sbs"] = u.sbs;
        r["tracking_accuracy"] = u.qos.k;
        r["delay_s"] = u.qos.d_total;
        r["transmission_delay_s"] = u.qos.d_transmission;
        r["processing_delay_s"] = u.qos.d_processing;
        r["max_delay_s"] = u.qos.d_max;
        r["utility"] = u.qos.total_utility;
        r["dl_rate_bps"] = u.qos.dl_rate;
        r["ul_rate_bps"] = u.qos.ul_rate;
        users.push_back(r);
    }
    j["users"] = users;
    return j.dump(2) + "\n";
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "n_sbs") return SweepAxis::NSbs;
    if (name == "n_users") return SweepAxis::NUsers;
    if (name == "n_blocks") return SweepAxis::NBlocks;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (n_sbs | n_users | n_blocks)");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::NSbs: return "n_sbs";
        case SweepAxis::NUsers: return "n_users";
        case SweepAxis::NBlocks: return "n_blocks";
    }
    return "n_users";
}

ScenarioConfig apply_axis(ScenarioConfig base, SweepAxis axis, std::size_t value) {
    switch (axis) {
        case SweepAxis::NSbs: base.n_sbs = value; break;
        case SweepAxis::NUsers: base.n_users = value; break;
        case SweepAxis::NBlocks:
            base.n_dl_blocks = value;
            base.n_ul_blocks = value;
            break;
    }
    return base;
}

void SweepSpec::validate() const {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    if (runs_per_point == 0) throw std::invalid_argument("runs_per_point must be >= 1");
    for (std::size_t v : values) apply_axis(base, axis, v).validate();
}

std::uint64_t sweep_seed(std::uint64_t master, SweepAxis axis, std::size_t value, std::size_t run) {
    return derive_seed(derive_seed(derive_seed(master, to_string(axis)), static_cast<std::uint64_t>(value)),
                       static_cast<std::uint64_t>(run));
}

SweepRow to_row(const Metrics& m, std::size_t axis_value, std::size_t run) {
    SweepRow r;
    r.axis_value = axis_value;
    r.policy = to_string(m.policy);
    r.run = run;
    r.seed = m.seed;
    r.total_utility = m.final_total_utility;
    r.mean_delay_s = m.mean_delay_s;
    r.convergence_slot = m.convergence_slot ? static_cast<long long>(*m.convergence_slot) : -1;
    r.serviced_fraction = m.serviced_fraction;
    return r;
}

SweepResult run_sweep(const SweepSpec& spec, const std::vector<Policy>& policies, std::size_t t_slots,
                      std::uint64_t master_seed, const EpisodeOptions& options) {
    spec.validate();
    if (policies.empty()) throw std::invalid_argument("sweep needs at least one policy");
    SweepResult res;
    for (std::size_t value : spec.values) {
        const ScenarioConfig cfg = apply_axis(spec.base, spec.axis, value);
        for (std::size_t run = 0; run < spec.runs_per_point; ++run) {
            const std::uint64_t seed = sweep_seed(master_seed, spec.axis, value, run);
            for (Policy p : policies) res.rows.push_back(to_row(run_episode(cfg, p, t_slots, seed, options), value, run));
        }
    }
    res.cells = aggregate(res.rows);
    return res;
}

namespace {

// Mean and sample sd over values summed in sorted order, so the result does
// not depend on the order the rows arrived in.
std::pair<double, double> mean_sd(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / n;
    if (v.size() < 2) return {mean, 0.0};
    std::vector<double> sq;
    sq.reserve(v.size());
    for (double x : v) sq.push_back((x - mean) * (x - mean));
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double x : sq) ss += x;
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

std::vector<SweepCell> aggregate(const std::vector<SweepRow>& rows) {
    std::map<std::pair<std::size_t, std::string>, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) groups[{r.axis_value, r.policy}].push_back(&r);
    std::vector<SweepCell> cells;
    for (const auto& [key, members] : groups) {
        std::vector<double> u, d, s;
        for (const SweepRow* r : members) {
            u.push_back(r->total_utility);
            d.push_back(r->mean_delay_s);
            s.push_back(r->serviced_fraction);
        }
        SweepCell c;
        c.axis_value = key.first;
        c.policy = key.second;
        c.runs = members.size();
        std::tie(c.utility_mean, c.utility_sd) = mean_sd(u);
        std::tie(c.delay_mean, c.delay_sd) = mean_sd(d);
        c.serviced_mean = mean_sd(s).first;
        cells.push_back(c);
    }
    return cells;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "axis_value,policy,run,seed,total_utility,mean_delay_s,convergence_slot,serviced_fraction\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{:.17g},{:.17g},{},{:.17g}\n", r.axis_value, r.policy, r.run, r.seed,
                           r.total_utility, r.mean_delay_s, r.convergence_slot, r.serviced_fraction);
    return out;
}

std::string cells_csv(const std::vector<SweepCell>& cells) {
    std::string out = "axis_value,policy,runs,utility_mean,utility_sd,delay_mean_s,delay_sd_s,serviced_mean\n";
    for (const auto& c : cells)
        out += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.axis_value, c.policy, c.runs,
                           c.utility_mean, c.utility_sd, c.delay_mean, c.delay_sd, c.serviced_mean);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace vrnet
