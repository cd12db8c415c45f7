#pragma once

// Allocation policies: the ESN learner, stateless Q-learning, proportional
// fair and exhaustive search over a frozen game table.

#include "vrnet/esn.hpp"
#include "vrnet/game.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vrnet {

/// Per-SBS utilities of a joint action (given as per-SBS action indices).
class UtilitySource {
public:
    virtual ~UtilitySource() = default;
    [[nodiscard]] virtual const std::vector<std::size_t>& action_counts() const = 0;
    virtual std::vector<double> evaluate(std::span<const std::size_t> actions) = 0;
};

/// Looks utilities up in a fixed game table.
class FrozenTableSource final : public UtilitySource {
public:
    explicit FrozenTableSource(const GameTable& table) : table_(table) {}
    [[nodiscard]] const std::vector<std::size_t>& action_counts() const override { return table_.action_counts; }
    std::vector<double> evaluate(std::span<const std::size_t> actions) override;

private:
    const GameTable& table_;
};

/// Every call is a new slot: fresh fading, the next trajectory sample and a
/// fresh corruption realization.
class LiveSource final : public UtilitySource {
public:
    LiveSource(QosParams params, NetworkState& state, const std::vector<std::vector<Action>>& action_sets,
               TrajectoryGenerator& trajectories, Rng& rng);
    [[nodiscard]] const std::vector<std::size_t>& action_counts() const override { return counts_; }
    std::vector<double> evaluate(std::span<const std::size_t> actions) override;
    [[nodiscard]] const std::vector<TrackingVector>& last_truths() const { return truths_; }

private:
    QosParams params_;
    NetworkState& state_;
    const std::vector<std::vector<Action>>& sets_;
    TrajectoryGenerator& trajectories_;
    Rng& rng_;
    std::vector<std::size_t> counts_;
    std::vector<TrackingVector> truths_;
};

enum class EsnStepRule {
    Auto,          ///< check the unambiguity condition on W_in; Robbins-Monro if it fails
    Unambiguous,   ///< radix W_in that meets the condition, constant step
    RobbinsMonro,  ///< lambda0 / n per readout row
    Constant,      ///< constant step with random W_in
};

EsnStepRule parse_step_rule(const std::string& name);
std::string to_string(EsnStepRule rule);

struct LearnerConfig {
    double epsilon = 0.1;
    double epsilon_decay = 0.0;  ///< eps_t = eps / (1 + decay * (t - 1)); 0 keeps eps constant
    std::size_t n_w = 1000;
    double in_scale = 1.0;
    double res_scale = 0.5;
    double bias_scale = 1.0;  ///< fixed reservoir bias; gives the readout an intercept
    EsnStepRule step_rule = EsnStepRule::Auto;
    double lambda0 = 1.0;         ///< Robbins-Monro numerator
    double lambda_const = 0.1;    ///< constant-step rate
    bool normalized_step = true;  ///< divide the step by |concat(mu, x)|^2
    double q_alpha = 0.1;
    std::size_t convergence_window = 10;

    void validate() const;
};

struct SlotResult {
    std::vector<std::size_t> actions;
    std::vector<double> utilities;
    std::vector<std::size_t> strategy_indices;  ///< 0 uniform, a + 1 epsilon-greedy on a
    std::vector<double> predicted;              ///< estimate of the played action before playing
    std::vector<MixedStrategy> strategies;
};

class Learner {
public:
    virtual ~Learner() = default;

    virtual SlotResult play_slot(UtilitySource& source, Rng& rng) = 0;
    /// Highest-probability action per SBS for the next slot.
    [[nodiscard]] virtual std::vector<std::size_t> greedy_actions() const = 0;
    /// Current per-SBS value estimates for every action.
    [[nodiscard]] virtual std::vector<std::vector<double>> estimates() const = 0;

    /// First slot (1-based) at which every SBS's strategy index had been
    /// unchanged for `convergence_window` consecutive slots.
    [[nodiscard]] std::optional<std::size_t> convergence_slot() const { return converged_at_; }
    [[nodiscard]] std::size_t slot() const { return slot_; }

protected:
    explicit Learner(LearnerConfig cfg, std::vector<std::size_t> counts);
    [[nodiscard]] double epsilon_now() const;
    void record_indices(const std::vector<std::size_t>& indices);

    LearnerConfig cfg_;
    std::vector<std::size_t> counts_;
    std::size_t slot_ = 0;

private:
    std::vector<std::size_t> last_indices_;
    std::size_t streak_ = 0;
    std::optional<std::size_t> converged_at_;
};

/// One ESN per SBS following the slot order: predict, choose the strategy,
/// broadcast indices, play, observe, update the reservoir, train the played row.
class EsnLearner final : public Learner {
public:
    EsnLearner(const LearnerConfig& cfg, const std::vector<std::size_t>& action_counts, Rng& init_rng);

    SlotResult play_slot(UtilitySource& source, Rng& rng) override;
    [[nodiscard]] std::vector<std::size_t> greedy_actions() const override;
    [[nodiscard]] std::vector<std::vector<double>> estimates() const override;

    /// True when the readout uses a constant step (condition (i) holds).
    [[nodiscard]] bool constant_step() const { return constant_step_; }
    /// Result of the unambiguity check per SBS (nullopt: not applicable).
    [[nodiscard]] const std::optional<bool>& unambiguous() const { return unambiguous_; }
    [[nodiscard]] const std::vector<EsnState>& networks() const { return esn_; }

private:
    std::vector<EsnState> esn_;
    std::vector<std::vector<std::size_t>> row_updates_;
    Eigen::VectorXd x_;
    bool constant_step_ = false;
    std::optional<bool> unambiguous_;
};

/// Stateless (bandit) Q-learning per SBS: Q[a] += alpha (u - Q[a]), zero init.
class QLearner final : public Learner {
public:
    QLearner(const LearnerConfig& cfg, const std::vector<std::size_t>& action_counts);

    SlotResult play_slot(UtilitySource& source, Rng& rng) override;
    [[nodiscard]] std::vector<std::size_t> greedy_actions() const override;
    [[nodiscard]] std::vector<std::vector<double>> estimates() const override { return q_; }

private:
    std::vector<std::vector<double>> q_;
};

/// Downlink blocks a user needs on its own to reach `demand_bps`, using its
/// noise-limited per-block SINR at unit fading; at least 1.
std::size_t block_demand(const NetworkState& state, std::size_t user, std::size_t sbs, double demand_bps);

/// Largest-remainder split of `blocks` proportional to `demands`, each part >= 1.
std::vector<int> proportional_counts(std::span<const std::size_t> demands, std::size_t blocks);

/// Proportional-fair action of one SBS: dl and ul counts proportional to
/// block demand, uplink blocks handed out contiguously in descending demand.
Action proportional_fair_allocate(const NetworkState& state, std::size_t sbs, double demand_bps);

/// Index of `action` in `set`; throws if absent.
std::size_t action_index(const std::vector<Action>& set, const Action& action);

/// Joint action maximizing the summed utility of the table; ties go to the
/// lowest joint index. Refuses tables larger than `cap`.
std::vector<std::size_t> exhaustive_optimal(const GameTable& table, std::uint64_t cap = 1'000'000);

}  // namespace vrnet
