#pragma once

// Episode runner, metrics, sweeps and their CSV / JSON persistence.

#include "vrnet/learners.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vrnet {

enum class Policy { Esn, QLearning, PropFair, Exhaustive };
Policy parse_policy(const std::string& name);
std::string to_string(Policy p);

/// Live: fresh fading, trajectory sample and corruption every slot.
/// Frozen: every slot looks the sampled joint action up in one game table.
enum class UtilityMode { Live, Frozen };
UtilityMode parse_utility_mode(const std::string& name);
std::string to_string(UtilityMode m);

/// Raw stereo stream rate at the default 1920x1080, 16 bit, 60 fps, compression 150.
inline constexpr double kDefaultDemandBps = 26542080.0;

struct EpisodeOptions {
    UtilityMode utility_mode = UtilityMode::Live;
    LearnerConfig learner;
    std::uint64_t table_cap = 1'000'000;
    double demand_bps = kDefaultDemandBps;  ///< proportional-fair block demand target
};

struct UserOutcome {
    std::size_t user = 0;
    std::size_t sbs = 0;
    QosBreakdown qos;
};

struct Metrics {
    Policy policy = Policy::Esn;
    std::uint64_t seed = 0;
    std::vector<std::size_t> action_counts;
    std::vector<std::vector<double>> slot_utility;  ///< [slot][sbs]
    std::vector<double> total_trace;                ///< per slot, summed over SBSs
    std::optional<std::size_t> convergence_slot;
    std::vector<std::size_t> final_actions;         ///< highest-probability action per SBS
    std::vector<MixedStrategy> final_profile;       ///< point masses on final_actions
    double final_total_utility = 0.0;               ///< table value when a table was built
    bool final_on_table = false;
    std::vector<UserOutcome> final_users;           ///< serviced users at the final evaluation
    std::vector<double> delay_samples;              ///< d_total of each serviced user
    double mean_delay_s = 0.0;
    double serviced_fraction = 0.0;
    double wall_time_s = 0.0;                       ///< never written to CSV
    std::shared_ptr<const GameTable> table;         ///< frozen table, if one was built
};

/// Utility a user would get alone at `sbs` with every block, unit fading,
/// no interference and exact tracking.
double standalone_utility(const QosParams& p, const NetworkState& state, std::size_t user, std::size_t sbs);

/// Nearest covering SBS; an over-full SBS keeps the users of highest standalone utility.
void associate_by_utility(NetworkState& state, const ScenarioConfig& cfg, const QosParams& p);

/// Builds the scenario from `seed`, runs `policy` for t_slots and evaluates
/// the final highest-probability joint action.
Metrics run_episode(const ScenarioConfig& cfg, Policy policy, std::size_t t_slots, std::uint64_t seed,
                    const EpisodeOptions& options = {});
Metrics run_episode(const ScenarioConfig& cfg, const std::string& policy, std::size_t t_slots, std::uint64_t seed,
                    const EpisodeOptions& options = {});

/// Fraction of samples <= each grid point.
std::vector<double> delay_cdf(const std::vector<double>& samples, const std::vector<double>& grid);
std::vector<double> delay_cdf(const Metrics& metrics, const std::vector<double>& grid);

/// First slot (1-based) from which every leading window mean stays within
/// rel_tol of the last window's mean.
std::size_t convergence_iterations(const std::vector<double>& trace, std::size_t window, double rel_tol);

/// "slot,sbs0,...,total" per-slot trace.
std::string trace_csv(const Metrics& m);
/// Structured text summary of an episode.
std::string summary_json(const Metrics& m);

enum class SweepAxis { NSbs, NUsers, NBlocks };
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis a);
/// Copy of `base` with the axis set to `value` (n_blocks sets both directions).
ScenarioConfig apply_axis(ScenarioConfig base, SweepAxis axis, std::size_t value);

struct SweepSpec {
    SweepAxis axis = SweepAxis::NUsers;
    std::vector<std::size_t> values;
    std::size_t runs_per_point = 1;
    ScenarioConfig base;

    void validate() const;
};

struct SweepRow {
    std::size_t axis_value = 0;
    std::string policy;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double total_utility = 0.0;
    double mean_delay_s = 0.0;
    long long convergence_slot = -1;  ///< -1 when never declared
    double serviced_fraction = 0.0;
};

struct SweepCell {
    std::size_t axis_value = 0;
    std::string policy;
    std::size_t runs = 0;
    double utility_mean = 0.0;
    double utility_sd = 0.0;
    double delay_mean = 0.0;
    double delay_sd = 0.0;
    double serviced_mean = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepCell> cells;
};

/// Run seed from (master seed, axis, axis value, run index). Policies share
/// the scenario of a run; each derives its own learning stream from it.
std::uint64_t sweep_seed(std::uint64_t master, SweepAxis axis, std::size_t value, std::size_t run);

SweepRow to_row(const Metrics& m, std::size_t axis_value, std::size_t run);

SweepResult run_sweep(const SweepSpec& spec, const std::vector<Policy>& policies, std::size_t t_slots,
                      std::uint64_t master_seed, const EpisodeOptions& options = {});

/// Mean and sample standard deviation per (axis value, policy); independent of row order.
std::vector<SweepCell> aggregate(const std::vector<SweepRow>& rows);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string cells_csv(const std::vector<SweepCell>& cells);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vrnet
