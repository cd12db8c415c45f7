#include "vrnet/game.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

namespace vrnet {

namespace {

void check_feasible(std::size_t v, std::size_t s_d, std::size_t s_u) {
    if (v == 0) throw std::invalid_argument("action space needs at least one user");
    if (v > s_d || v > s_u)
        throw InfeasibleError(fmt::format("{} users cannot each get a block from {} downlink / {} uplink blocks",
                                          v, s_d, s_u));
}

// Positive compositions of `total` into `parts`, lexicographic.
void compositions(std::size_t total, std::size_t parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(static_cast<int>(total));
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t first = 1; first + (parts - 1) <= total; ++first) {
        cur.push_back(static_cast<int>(first));
        compositions(total - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> compositions(std::size_t total, std::size_t parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions(total, parts, cur, out);
    return out;
}

// Owner maps blocks -> users hitting every user, lexicographic.
std::vector<std::vector<int>> surjections(std::size_t blocks, std::size_t users) {
    std::vector<std::vector<int>> out;
    std::vector<int> owner(blocks, 0);
    std::vector<int> hits(users, 0);
    while (true) {
        std::fill(hits.begin(), hits.end(), 0);
        for (int o : owner) hits[static_cast<std::size_t>(o)] = 1;
        if (std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; })) out.push_back(owner);
        std::size_t pos = blocks;
        while (pos > 0) {
            --pos;
            if (static_cast<std::size_t>(++owner[pos]) < users) break;
            owner[pos] = 0;
            if (pos == 0) return out;
        }
        if (blocks == 0) return out;
    }
}

// x (x-1) ... (x-y+1) / y!, zero for y < 0 or y > x >= 0.
std::uint64_t falling_binomial(long long x, long long y) {
    if (y < 0) return 0;
    if (x < 0) return 0;
    if (y > x) return 0;
    return binomial(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y));
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

std::vector<Action> enumerate_actions(std::size_t v, std::size_t s_d, std::size_t s_u) {
    check_feasible(v, s_d, s_u);
    const auto dl = compositions(s_d, v);
    const auto ul = surjections(s_u, v);
    std::vector<Action> out;
    out.reserve(dl.size() * ul.size());
    for (const auto& d : dl)
        for (const auto& u : ul) out.push_back(Action{d, u});
    return out;
}

std::vector<Action> action_set(std::size_t v, std::size_t s_d, std::size_t s_u) {
    if (v == 0) return {Action{}};
    return enumerate_actions(v, s_d, s_u);
}

std::uint64_t count_actions(std::size_t v, std::size_t s_d, std::size_t s_u) {
    check_feasible(v, s_d, s_u);
    std::uint64_t ul = 0;
    for (const auto& n : compositions(s_u, v)) {
        std::uint64_t prod = 1;
        std::size_t used = 0;
        for (std::size_t i = 0; i + 1 < v; ++i) {
            prod *= binomial(s_u - used, static_cast<std::uint64_t>(n[i]));
            used += static_cast<std::size_t>(n[i]);
        }
        ul += prod;
    }
    return binomial(s_d - 1, v - 1) * ul;
}

std::uint64_t count_actions_literal(std::size_t v, std::size_t s_d, std::size_t s_u) {
    check_feasible(v, s_d, s_u);
    const auto comps = compositions(s_d, v);
    const auto n_size = static_cast<long long>(comps.size());
    const std::uint64_t outer = falling_binomial(static_cast<long long>(s_d) - 1, n_size - 1);
    std::uint64_t sum = 0;
    for (const auto& n : comps) {
        std::uint64_t prod = 1;
        long long used = 0;
        for (std::size_t i = 0; i + 1 < v; ++i) {
            prod *= falling_binomial(n[i], static_cast<long long>(s_u) - used);
            used += n[i];
        }
        sum += prod;
    }
    return outer * sum;
}

MixedStrategy MixedStrategy::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("strategy over an empty action set");
    return MixedStrategy{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

MixedStrategy MixedStrategy::point(std::size_t n, std::size_t action) {
    if (action >= n) throw std::invalid_argument("point strategy action out of range");
    MixedStrategy s{std::vector<double>(n, 0.0)};
    s.probs[action] = 1.0;
    return s;
}

std::size_t MixedStrategy::mode() const { return argmax(probs); }

void MixedStrategy::validate() const {
    if (probs.empty()) throw std::invalid_argument("empty mixed strategy");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument(fmt::format("probabilities sum to {}", sum));
}

std::size_t MixedStrategy::sample(Rng& rng) const {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    // rounding left u above the running sum: last action with mass
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return probs.size() - 1;
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

MixedStrategy epsilon_greedy(std::span<const double> values, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    const std::size_t n = values.size();
    const std::size_t best = argmax(values);
    const double floor = epsilon / static_cast<double>(n);
    MixedStrategy s{std::vector<double>(n, floor)};
    s.probs[best] = 1.0 - epsilon + floor;
    return s;
}

std::size_t GameTable::n_joint() const {
    std::size_t n = 1;
    for (std::size_t c : action_counts) n *= c;
    return n;
}

std::size_t GameTable::joint_index(std::span<const std::size_t> actions) const {
    if (actions.size() != n_sbs()) throw std::invalid_argument("joint action has the wrong number of SBSs");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < actions.size(); ++j) {
        if (actions[j] >= action_counts[j]) throw std::out_of_range("action index out of range");
        idx = idx * action_counts[j] + actions[j];
    }
    return idx;
}

std::vector<std::size_t> GameTable::decode(std::size_t joint) const {
    std::vector<std::size_t> a(n_sbs());
    for (std::size_t j = n_sbs(); j-- > 0;) {
        a[j] = joint % action_counts[j];
        joint /= action_counts[j];
    }
    return a;
}

double GameTable::total_utility(std::span<const std::size_t> actions) const {
    const std::size_t joint = joint_index(actions);
    double s = 0.0;
    for (std::size_t j = 0; j < n_sbs(); ++j) s += utility(joint, j);
    return s;
}

void GameTable::validate() const {
    if (action_counts.empty()) throw std::invalid_argument("game table without SBSs");
    for (std::size_t c : action_counts)
        if (c == 0) throw std::invalid_argument("game table SBS with no actions");
    if (utilities.size() != n_joint() * n_sbs())
        throw std::invalid_argument(fmt::format("game table holds {} utilities, expected {}", utilities.size(),
                                                n_joint() * n_sbs()));
    for (double u : utilities)
        if (!std::isfinite(u)) throw std::invalid_argument("game table utility is not finite");
}

std::string GameTable::to_json() const {
    nlohmann::json j;
    j["action_counts"] = action_counts;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < n_joint(); ++k)
        rows.push_back(std::vector<double>(utilities.begin() + static_cast<std::ptrdiff_t>(k * n_sbs()),
                                           utilities.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_sbs())));
    j["utilities"] = rows;
    return j.dump(1);
}

GameTable GameTable::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        GameTable t;
        t.action_counts = j.at("action_counts").get<std::vector<std::size_t>>();
        for (const auto& row : j.at("utilities")) {
            const auto r = row.get<std::vector<double>>();
            if (r.size() != t.action_counts.size())
                throw std::invalid_argument("game table row width differs from the SBS count");
            t.utilities.insert(t.utilities.end(), r.begin(), r.end());
        }
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed game table: ") + e.what());
    }
}

std::string profile_to_json(const std::vector<MixedStrategy>& profile) {
    nlohmann::json j;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : profile) rows.push_back(s.probs);
    j["strategies"] = rows;
    return j.dump(1);
}

std::vector<MixedStrategy> profile_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        std::vector<MixedStrategy> out;
        for (const auto& row : j.at("strategies")) {
            out.push_back(MixedStrategy{row.get<std::vector<double>>()});
            out.back().validate();
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed profile: ") + e.what());
    }
}

std::uint64_t joint_space_size(std::span<const std::size_t> action_counts) {
    std::uint64_t n = 1;
    for (std::size_t c : action_counts) {
        if (c != 0 && n > std::numeric_limits<std::uint64_t>::max() / c) return std::numeric_limits<std::uint64_t>::max();
        n *= c;
    }
    return n;
}

double sbs_utility(const QosParams& p, const NetworkState& state, std::size_t sbs,
                   std::span<const Action> joint, std::span<const TrackingVector> truths, Rng& rng) {
    double total = 0.0;
    for (std::size_t user : state.served.at(sbs))
        total += evaluate_user(p, state, joint, user, truths[user], rng).total_utility;
    return total;
}

GameTable build_game_table(const QosParams& p, const NetworkState& state,
                           const std::vector<std::vector<Action>>& action_sets,
                           std::span<const TrackingVector> truths, std::uint64_t seed, std::uint64_t cap) {
    GameTable t;
    for (const auto& s : action_sets) t.action_counts.push_back(s.size());
    const std::uint64_t size = joint_space_size(t.action_counts);
    if (size > cap)
        throw std::length_error(fmt::format("joint action space {} exceeds the cap {}", size, cap));
    const std::size_t b = t.n_sbs();
    t.utilities.assign(size * b, 0.0);
    std::vector<Action> joint(b);
    for (std::size_t k = 0; k < size; ++k) {
        const auto idx = t.decode(k);
        for (std::size_t j = 0; j < b; ++j) joint[j] = action_sets[j][idx[j]];
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        for (std::size_t j = 0; j < b; ++j) t.utilities[k * b + j] = sbs_utility(p, state, j, joint, truths, rng);
    }
    return t;
}

namespace {

// Sum over joint actions of weight * u_sbs, with `fixed` pinned for SBS `pinned`
// and every other SBS weighted by its strategy; zero-mass branches are skipped.
double weighted_sum(const GameTable& t, const std::vector<MixedStrategy>& profile, std::size_t sbs,
                    std::size_t pinned, std::size_t fixed, std::size_t level, std::size_t idx, double w) {
    if (level == t.n_sbs()) return w * t.utility(idx, sbs);
    const std::size_t n = t.action_counts[level];
    if (level == pinned) return weighted_sum(t, profile, sbs, pinned, fixed, level + 1, idx * n + fixed, w);
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double p = profile[level].probs[a];
        if (p == 0.0) continue;
        s += weighted_sum(t, profile, sbs, pinned, fixed, level + 1, idx * n + a, w * p);
    }
    return s;
}

void check_profile(const GameTable& t, const std::vector<MixedStrategy>& profile) {
    if (profile.size() != t.n_sbs()) throw std::invalid_argument("profile and table disagree on the SBS count");
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (profile[j].size() != t.action_counts[j])
            throw std::invalid_argument(fmt::format("strategy of SBS {} has the wrong length", j));
        profile[j].validate();
    }
}

}  // namespace

double expected_utility(const GameTable& table, const std::vector<MixedStrategy>& profile, std::size_t sbs,
                        std::size_t action) {
    check_profile(table, profile);
    if (action >= table.action_counts.at(sbs)) throw std::out_of_range("action index out of range");
    return weighted_sum(table, profile, sbs, sbs, action, 0, 0, 1.0);
}

double average_utility(const GameTable& table, const std::vector<MixedStrategy>& profile, std::size_t sbs) {
    check_profile(table, profile);
    double s = 0.0;
    for (std::size_t a = 0; a < table.action_counts.at(sbs); ++a) {
        const double p = profile[sbs].probs[a];
        if (p != 0.0) s += p * weighted_sum(table, profile, sbs, sbs, a, 0, 0, 1.0);
    }
    return s;
}

NeCheck verify_mixed_ne(const GameTable& table, const std::vector<MixedStrategy>& profile, double tol) {
    check_profile(table, profile);
    NeCheck out;
    out.max_regret = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < table.n_sbs(); ++j) {
        std::vector<double> u(table.action_counts[j]);
        double avg = 0.0;
        for (std::size_t a = 0; a < u.size(); ++a) {
            u[a] = weighted_sum(table, profile, j, j, a, 0, 0, 1.0);
            avg += profile[j].probs[a] * u[a];
        }
        for (double ua : u) out.max_regret = std::max(out.max_regret, ua - avg);
    }
    out.is_ne = out.max_regret <= tol;
    return out;
}

double worst_case_probability(double epsilon, std::span<const std::size_t> action_counts) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    double p = 1.0;
    for (std::size_t n : action_counts) {
        if (n == 0) throw std::invalid_argument("action count must be >= 1");
        const double nd = static_cast<double>(n);
        p *= std::pow(1.0 - epsilon / nd, nd - 1.0);
    }
    return p;
}

}  // namespace vrnet
