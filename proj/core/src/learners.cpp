#include "vrnet/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vrnet {

std::vector<double> FrozenTableSource::evaluate(std::span<const std::size_t> actions) {
    const std::size_t joint = table_.joint_index(actions);
    std::vector<double> u(table_.n_sbs());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = table_.utility(joint, j);
    return u;
}

LiveSource::LiveSource(QosParams params, NetworkState& state, const std::vector<std::vector<Action>>& action_sets,
                       TrajectoryGenerator& trajectories, Rng& rng)
    : params_(params), state_(state), sets_(action_sets), trajectories_(trajectories), rng_(rng) {
    for (const auto& s : sets_) counts_.push_back(s.size());
}

std::vector<double> LiveSource::evaluate(std::span<const std::size_t> actions) {
    redraw_fading(state_, rng_);
    truths_ = trajectories_.next();
    std::vector<Action> joint(actions.size());
    for (std::size_t j = 0; j < actions.size(); ++j) joint[j] = sets_[j].at(actions[j]);
    std::vector<double> u(actions.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = sbs_utility(params_, state_, j, joint, truths_, rng_);
    return u;
}

EsnStepRule parse_step_rule(const std::string& name) {
    if (name == "auto") return EsnStepRule::Auto;
    if (name == "unambiguous") return EsnStepRule::Unambiguous;
    if (name == "robbins-monro") return EsnStepRule::RobbinsMonro;
    if (name == "constant") return EsnStepRule::Constant;
    throw std::invalid_argument("unknown ESN step rule '" + name + "'");
}

std::string to_string(EsnStepRule rule) {
    switch (rule) {
        case EsnStepRule::Auto: return "auto";
        case EsnStepRule::Unambiguous: return "unambiguous";
        case EsnStepRule::RobbinsMonro: return "robbins-monro";
        case EsnStepRule::Constant: return "constant";
    }
    return "auto";
}

void LearnerConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(epsilon_decay >= 0.0)) throw std::invalid_argument("epsilon_decay must be >= 0");
    if (n_w == 0) throw std::invalid_argument("n_w must be >= 1");
    if (!(res_scale >= 0.0 && res_scale < 1.0)) throw std::invalid_argument("res_scale must lie in [0, 1)");
    if (!(in_scale >= 0.0)) throw std::invalid_argument("in_scale must be >= 0");
    if (!(bias_scale >= 0.0)) throw std::invalid_argument("bias_scale must be >= 0");
    if (!(lambda0 > 0.0) || !(lambda_const > 0.0)) throw std::invalid_argument("learning rates must be > 0");
    if (!(q_alpha > 0.0 && q_alpha <= 1.0)) throw std::invalid_argument("q_alpha must lie in (0, 1]");
    if (convergence_window == 0) throw std::invalid_argument("convergence_window must be >= 1");
}

Learner::Learner(LearnerConfig cfg, std::vector<std::size_t> counts) : cfg_(cfg), counts_(std::move(counts)) {
    cfg_.validate();
    if (counts_.empty()) throw std::invalid_argument("learner needs at least one SBS");
    for (std::size_t c : counts_)
        if (c == 0) throw std::invalid_argument("every SBS needs at least one action");
}

double Learner::epsilon_now() const {
    const double t = static_cast<double>(slot_ == 0 ? 0 : slot_ - 1);
    return cfg_.epsilon / (1.0 + cfg_.epsilon_decay * t);
}

void Learner::record_indices(const std::vector<std::size_t>& indices) {
    if (indices == last_indices_) {
        ++streak_;
    } else {
        last_indices_ = indices;
        streak_ = 1;
    }
    if (!converged_at_ && streak_ >= cfg_.convergence_window) converged_at_ = slot_;
}

namespace {

Eigen::VectorXd to_input(const std::vector<std::size_t>& indices, const std::vector<std::size_t>& counts) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j)
        x(static_cast<Eigen::Index>(j)) = static_cast<double>(indices[j]) / static_cast<double>(counts[j]);
    return x;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

EsnLearner::EsnLearner(const LearnerConfig& cfg, const std::vector<std::size_t>& action_counts, Rng& init_rng)
    : Learner(cfg, action_counts), row_updates_(action_counts.size()) {
    const std::size_t b = counts_.size();
    const std::size_t n_w = std::max(cfg_.n_w, b + 1);
    for (std::size_t j = 0; j < b; ++j) {
        Rng rng(derive_seed(init_rng(), static_cast<std::uint64_t>(j)));
        esn_.push_back(init_esn(n_w, b, counts_[j], rng, cfg_.in_scale, cfg_.res_scale, cfg_.bias_scale));
        if (cfg_.step_rule == EsnStepRule::Unambiguous) esn_.back().w_in = unambiguous_input_weights(n_w, counts_, rng);
        row_updates_[j].assign(counts_[j], 0);
    }
    x_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b));

    switch (cfg_.step_rule) {
        case EsnStepRule::Constant: constant_step_ = true; break;
        case EsnStepRule::RobbinsMonro: constant_step_ = false; break;
        case EsnStepRule::Unambiguous:
        case EsnStepRule::Auto: {
            const auto grid = strategy_input_grid(counts_);
            std::optional<bool> all = true;
            for (const auto& e : esn_) {
                const auto ok = check_unambiguity(e.w_in, grid);
                if (!ok) {
                    all = std::nullopt;
                    break;
                }
                if (!*ok) {
                    all = false;
                    break;
                }
            }
            unambiguous_ = all;
            constant_step_ = all.value_or(false);
            break;
        }
    }
}

SlotResult EsnLearner::play_slot(UtilitySource& source, Rng& rng) {
    ++slot_;
    const std::size_t b = counts_.size();
    const double eps = epsilon_now();
    SlotResult r;
    r.actions.resize(b);
    r.strategy_indices.resize(b);
    r.predicted.resize(b);
    std::vector<Eigen::VectorXd> y(b);
    for (std::size_t j = 0; j < b; ++j) {
        y[j] = predict(esn_[j]);
        if (slot_ == 1) {
            r.strategies.push_back(MixedStrategy::uniform(counts_[j]));
            r.strategy_indices[j] = 0;
        } else {
            const auto v = to_std(y[j]);
            r.strategies.push_back(epsilon_greedy(v, eps));
            r.strategy_indices[j] = argmax(v) + 1;
        }
    }
    x_ = to_input(r.strategy_indices, counts_);
    for (std::size_t j = 0; j < b; ++j) {
        r.actions[j] = r.strategies[j].sample(rng);
        r.predicted[j] = y[j](static_cast<Eigen::Index>(r.actions[j]));
    }
    r.utilities = source.evaluate(r.actions);

    for (std::size_t j = 0; j < b; ++j) {
        EsnState& e = esn_[j];
        update_reservoir(e, x_);
        const std::size_t a = r.actions[j];
        const std::size_t n = ++row_updates_[j][a];
        double lambda = constant_step_ ? cfg_.lambda_const : robbins_monro_schedule(n, cfg_.lambda0);
        if (cfg_.normalized_step) {
            const double energy = e.mu.squaredNorm() + e.x.squaredNorm();
            if (energy > 0.0) lambda /= energy;
        }
        train_step(e, a, r.utilities[j], lambda);
    }
    record_indices(r.strategy_indices);
    return r;
}

std::vector<std::size_t> EsnLearner::greedy_actions() const {
    std::vector<std::size_t> a(esn_.size());
    for (std::size_t j = 0; j < esn_.size(); ++j) a[j] = argmax(to_std(predict(esn_[j])));
    return a;
}

std::vector<std::vector<double>> EsnLearner::estimates() const {
    std::vector<std::vector<double>> out;
    for (const auto& e : esn_) out.push_back(to_std(predict(e)));
    return out;
}

QLearner::QLearner(const LearnerConfig& cfg, const std::vector<std::size_t>& action_counts)
    : Learner(cfg, action_counts) {
    for (std::size_t c : counts_) q_.emplace_back(c, 0.0);
}

SlotResult QLearner::play_slot(UtilitySource& source, Rng& rng) {
    ++slot_;
    const std::size_t b = counts_.size();
    const double eps = epsilon_now();
    SlotResult r;
    r.actions.resize(b);
    r.strategy_indices.resize(b);
    r.predicted.resize(b);
    for (std::size_t j = 0; j < b; ++j) {
        r.strategies.push_back(epsilon_greedy(q_[j], eps));
        r.strategy_indices[j] = argmax(q_[j]) + 1;
    }
    for (std::size_t j = 0; j < b; ++j) {
        r.actions[j] = r.strategies[j].sample(rng);
        r.predicted[j] = q_[j][r.actions[j]];
    }
    r.utilities = source.evaluate(r.actions);
    for (std::size_t j = 0; j < b; ++j) {
        double& q = q_[j][r.actions[j]];
        q += cfg_.q_alpha * (r.utilities[j] - q);
    }
    record_indices(r.strategy_indices);
    return r;
}

std::vector<std::size_t> QLearner::greedy_actions() const {
    std::vector<std::size_t> a(q_.size());
    for (std::size_t j = 0; j < q_.size(); ++j) a[j] = argmax(q_[j]);
    return a;
}

std::size_t block_demand(const NetworkState& state, std::size_t user, std::size_t sbs, double demand_bps) {
    const double sinr = state.radio.p_sbs_w * state.path(user, sbs) / state.radio.noise_w;
    const double per_block = block_rate(sinr, state.radio.bandwidth_hz);
    if (!(per_block > 0.0)) return state.n_dl;
    const double need = std::ceil(demand_bps / per_block);
    return static_cast<std::size_t>(std::clamp(need, 1.0, static_cast<double>(state.n_dl)));
}

std::vector<int> proportional_counts(std::span<const std::size_t> demands, std::size_t blocks) {
    const std::size_t v = demands.size();
    if (v == 0) return {};
    if (v > blocks) throw InfeasibleError("more users than blocks");
    const double total = static_cast<double>(std::accumulate(demands.begin(), demands.end(), std::size_t{0}));
    std::vector<double> quota(v);
    std::vector<int> c(v);
    for (std::size_t i = 0; i < v; ++i) {
        quota[i] = total > 0.0 ? static_cast<double>(blocks) * static_cast<double>(demands[i]) / total
                               : static_cast<double>(blocks) / static_cast<double>(v);
        c[i] = std::max(1, static_cast<int>(std::floor(quota[i])));
    }
    auto sum = [&] { return std::accumulate(c.begin(), c.end(), 0); };
    const int target = static_cast<int>(blocks);
    while (sum() > target) {
        // take back from the most over-served user that can spare a block
        std::size_t pick = v;
        for (std::size_t i = 0; i < v; ++i)
            if (c[i] > 1 && (pick == v || c[i] - quota[i] > c[pick] - quota[pick])) pick = i;
        --c[pick];
    }
    while (sum() < target) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < v; ++i)
            if (quota[i] - c[i] > quota[pick] - c[pick]) pick = i;
        ++c[pick];
    }
    return c;
}

Action proportional_fair_allocate(const NetworkState& state, std::size_t sbs, double demand_bps) {
    const auto& served = state.served.at(sbs);
    if (served.empty()) throw std::invalid_argument("proportional fair needs at least one served user");
    std::vector<std::size_t> demand;
    for (std::size_t u : served) demand.push_back(block_demand(state, u, sbs, demand_bps));

    Action a;
    a.dl_counts = proportional_counts(demand, state.n_dl);
    const auto ul_counts = proportional_counts(demand, state.n_ul);
    std::vector<std::size_t> order(served.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return demand[l] > demand[r]; });
    for (std::size_t i : order)
        for (int k = 0; k < ul_counts[i]; ++k) a.ul_owner.push_back(static_cast<int>(i));
    return a;
}

std::size_t action_index(const std::vector<Action>& set, const Action& action) {
    const auto it = std::find(set.begin(), set.end(), action);
    if (it == set.end()) throw std::invalid_argument("action is not in the action set");
    return static_cast<std::size_t>(it - set.begin());
}

std::vector<std::size_t> exhaustive_optimal(const GameTable& table, std::uint64_t cap) {
    const std::uint64_t size = joint_space_size(table.action_counts);
    if (size > cap)
        throw std::length_error(fmt::format("exhaustive search over {} joint actions exceeds the cap {}", size, cap));
    std::size_t best = 0;
    double best_u = -std::numeric_limits<double>::infinity();
    const std::size_t b = table.n_sbs();
    for (std::size_t k = 0; k < size; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < b; ++j) s += table.utility(k, j);
        if (s > best_u) {
            best_u = s;
            best = k;
        }
    }
    return table.decode(best);
}

}  // namespace vrnet
