#pragma once

// Per-SBS action spaces, the frozen utility table of the allocation game,
// mixed strategies and a brute-force mixed Nash equilibrium check.

#include "vrnet/action.hpp"
#include "vrnet/channel.hpp"
#include "vrnet/vrqos.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrnet {

/// More users than blocks in one direction.
class InfeasibleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every (dl count composition) x (surjective ul owner map) pair, dl-major,
/// both parts in lexicographic order.
std::vector<Action> enumerate_actions(std::size_t v, std::size_t s_d, std::size_t s_u);

/// Action set of an SBS with `v` served users; the single idle action when v = 0.
std::vector<Action> action_set(std::size_t v, std::size_t s_d, std::size_t s_u);

/// Closed form: C(S^d-1, V-1) * sum over compositions n of S^u into V parts of
/// prod_{i<V} C(S^u - n_1 - ... - n_{i-1}, n_i).
std::uint64_t count_actions(std::size_t v, std::size_t s_d, std::size_t s_u);

/// The printed formula taken literally: outer binomial over |N(V)| - 1, sum over
/// downlink compositions, inner binomials with upper index n_i. Reporting only.
std::uint64_t count_actions_literal(std::size_t v, std::size_t s_d, std::size_t s_u);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct MixedStrategy {
    std::vector<double> probs;

    static MixedStrategy uniform(std::size_t n);
    static MixedStrategy point(std::size_t n, std::size_t action);

    [[nodiscard]] std::size_t size() const { return probs.size(); }
    /// Index of the largest probability, lowest index on ties.
    [[nodiscard]] std::size_t mode() const;
    /// Throws std::invalid_argument unless entries lie in [0,1] and sum to 1 within 1e-12.
    void validate() const;
    std::size_t sample(Rng& rng) const;
};

/// Argmax gets 1 - eps + eps/n, every other action eps/n; ties go to the lowest index.
MixedStrategy epsilon_greedy(std::span<const double> values, double epsilon);
std::size_t argmax(std::span<const double> values);

/// Utilities of every SBS for every joint action, stored joint-major.
/// Joint indices are mixed radix with SBS 0 as the most significant digit.
struct GameTable {
    std::vector<std::size_t> action_counts;
    std::vector<double> utilities;  ///< [joint * n_sbs + sbs]

    [[nodiscard]] std::size_t n_sbs() const { return action_counts.size(); }
    [[nodiscard]] std::size_t n_joint() const;
    [[nodiscard]] std::size_t joint_index(std::span<const std::size_t> actions) const;
    [[nodiscard]] std::vector<std::size_t> decode(std::size_t joint) const;
    [[nodiscard]] double utility(std::size_t joint, std::size_t sbs) const {
        return utilities[joint * n_sbs() + sbs];
    }
    [[nodiscard]] double utility(std::span<const std::size_t> actions, std::size_t sbs) const {
        return utility(joint_index(actions), sbs);
    }
    [[nodiscard]] double total_utility(std::span<const std::size_t> actions) const;

    /// Shape and finiteness checks; throws std::invalid_argument.
    void validate() const;

    [[nodiscard]] std::string to_json() const;
    static GameTable from_json(const std::string& text);
};

std::string profile_to_json(const std::vector<MixedStrategy>& profile);
std::vector<MixedStrategy> profile_from_json(const std::string& text);

/// Product of per-SBS action counts, saturating at UINT64_MAX.
std::uint64_t joint_space_size(std::span<const std::size_t> action_counts);

/// Sum of total_utility over the SBS's served users under `joint`, one
/// corruption realization drawn from `rng` per user.
double sbs_utility(const QosParams& p, const NetworkState& state, std::size_t sbs,
                   std::span<const Action> joint, std::span<const TrackingVector> truths, Rng& rng);

/// Frozen table over the current fading of `state`. Each joint action draws
/// its corruption from a stream seeded by (seed, joint index), so entries do
/// not depend on evaluation order. Throws if the joint space exceeds `cap`.
GameTable build_game_table(const QosParams& p, const NetworkState& state,
                           const std::vector<std::vector<Action>>& action_sets,
                           std::span<const TrackingVector> truths, std::uint64_t seed,
                           std::uint64_t cap = 1'000'000);

/// Expected utility of `sbs` playing pure `action` against the other SBSs' mixed strategies.
double expected_utility(const GameTable& table, const std::vector<MixedStrategy>& profile,
                        std::size_t sbs, std::size_t action);
/// Expected utility of `sbs` under the full profile.
double average_utility(const GameTable& table, const std::vector<MixedStrategy>& profile,
                       std::size_t sbs);

struct NeCheck {
    bool is_ne = false;
    double max_regret = 0.0;
};

/// Largest gain any SBS obtains from a pure unilateral deviation.
NeCheck verify_mixed_ne(const GameTable& table, const std::vector<MixedStrategy>& profile,
                        double tol = 1e-6);

/// prod_j (1 - eps/|A_j|)^(|A_j| - 1).
double worst_case_probability(double epsilon, std::span<const std::size_t> action_counts);

}  // namespace vrnet
