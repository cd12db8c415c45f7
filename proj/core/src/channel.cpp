#include "vrnet/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace vrnet {

int Action::dl_first_block(std::size_t local_user) const {
    int first = 0;
    for (std::size_t i = 0; i < local_user; ++i) first += dl_counts[i];
    return first;
}

int Action::dl_used() const {
    return std::accumulate(dl_counts.begin(), dl_counts.end(), 0);
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
}

}  // namespace

void ScenarioConfig::validate() const {
    require(n_sbs >= 1, "n_sbs must be >= 1");
    require(n_dl_blocks >= 1, "n_dl_blocks must be >= 1");
    require(n_ul_blocks >= 1, "n_ul_blocks must be >= 1");
    require(area_radius_m > 0.0, "area_radius_m must be > 0");
    require(sbs_coverage_m > 0.0, "sbs_coverage_m must be > 0");
    require(sbs_coverage_m <= area_radius_m, "sbs_coverage_m must not exceed area_radius_m");
    require(block_bandwidth_hz > 0.0, "block_bandwidth_hz must be > 0");
    require(std::isfinite(p_sbs_dbm) && std::isfinite(p_user_dbm) && std::isfinite(noise_dbm),
            "powers must be finite");
    require(pathloss_exp > 0.0, "pathloss_exp must be > 0");
    require(image_bits > 0.0, "image_bits must be > 0");
    require(tracking_bits > 0.0, "tracking_bits must be > 0");
    require(compute_bits > 0.0, "compute_bits must be > 0");
    require(gamma_d_s > 0.0, "gamma_d_s must be > 0");
    require(min_distance_m > 0.0, "min_distance_m must be > 0");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double channel_gain(double distance_m, double beta, double g, double min_distance_m) {
    const double d = std::max(distance_m, min_distance_m);
    return g * std::pow(d, -beta);
}

double draw_fading(Rng& rng) { return exponential1(rng); }

RadioParams RadioParams::from(const ScenarioConfig& cfg) {
    RadioParams r;
    r.p_sbs_w = dbm_to_watts(cfg.p_sbs_dbm);
    r.p_user_w = dbm_to_watts(cfg.p_user_dbm);
    r.noise_w = dbm_to_watts(cfg.noise_dbm);
    r.beta = cfg.pathloss_exp;
    r.bandwidth_hz = cfg.block_bandwidth_hz;
    r.min_distance_m = cfg.min_distance_m;
    return r;
}

NetworkState make_state(const ScenarioConfig& cfg, std::vector<Vec2> sbs_positions,
                        std::vector<Vec2> user_positions) {
    NetworkState s;
    s.n_dl = cfg.n_dl_blocks;
    s.n_ul = cfg.n_ul_blocks;
    s.radio = RadioParams::from(cfg);
    s.sbs_positions = std::move(sbs_positions);
    s.user_positions = std::move(user_positions);
    const std::size_t nb = s.n_sbs();
    const std::size_t nu = s.n_users();
    s.pathloss.resize(nu * nb);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t b = 0; b < nb; ++b)
            s.pathloss[u * nb + b] = channel_gain(distance(s.user_positions[u], s.sbs_positions[b]),
                                                  s.radio.beta, 1.0, s.radio.min_distance_m);
    s.dl_fading.assign(nu * nb * s.n_dl, 1.0);
    s.ul_fading.assign(nu * nb * s.n_ul, 1.0);
    s.association.assign(nu, kUnserved);
    s.local_index.assign(nu, -1);
    s.served.assign(nb, {});
    s.allocations.assign(nb, Action{});
    return s;
}

Vec2 uniform_on_disc(Rng& rng, double r) {
    const double rho = r * std::sqrt(uniform01(rng));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    return {rho * std::cos(phi), rho * std::sin(phi)};
}

void redraw_fading(NetworkState& state, Rng& rng) {
    for (double& g : state.dl_fading) g = draw_fading(rng);
    for (double& g : state.ul_fading) g = draw_fading(rng);
}

void set_association(NetworkState& state, const std::vector<int>& association) {
    if (association.size() != state.n_users())
        throw std::invalid_argument("association size must equal the number of users");
    state.association = association;
    state.served.assign(state.n_sbs(), {});
    state.local_index.assign(state.n_users(), -1);
    for (std::size_t u = 0; u < state.n_users(); ++u) {
        const int b = association[u];
        if (b == kUnserved) continue;
        if (b < 0 || static_cast<std::size_t>(b) >= state.n_sbs())
            throw std::invalid_argument("association refers to an unknown SBS");
        state.local_index[u] = static_cast<int>(state.served[static_cast<std::size_t>(b)].size());
        state.served[static_cast<std::size_t>(b)].push_back(u);
    }
    state.allocations.assign(state.n_sbs(), Action{});
}

void associate_nearest(NetworkState& state, const ScenarioConfig& cfg) {
    associate_nearest(state, cfg, [&](std::size_t u, std::size_t b) {
        return -distance(state.user_positions[u], state.sbs_positions[b]);
    });
}

void associate_nearest(NetworkState& state, const ScenarioConfig& cfg,
                       const std::function<double(std::size_t, std::size_t)>& priority) {
    const std::size_t nb = state.n_sbs();
    const std::size_t cap = std::min(cfg.n_dl_blocks, cfg.n_ul_blocks);
    // (-priority, distance, user): ascending sort keeps the highest priority first
    std::vector<std::vector<std::tuple<double, double, std::size_t>>> candidates(nb);
    for (std::size_t u = 0; u < state.n_users(); ++u) {
        int best = kUnserved;
        double best_d = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const double d = distance(state.user_positions[u], state.sbs_positions[b]);
            if (d <= cfg.sbs_coverage_m && (best == kUnserved || d < best_d)) {
                best = static_cast<int>(b);
                best_d = d;
            }
        }
        if (best != kUnserved) {
            const auto b = static_cast<std::size_t>(best);
            candidates[b].emplace_back(-priority(u, b), best_d, u);
        }
    }
    std::vector<int> assoc(state.n_users(), kUnserved);
    for (std::size_t b = 0; b < nb; ++b) {
        auto& c = candidates[b];
        std::sort(c.begin(), c.end());
        if (c.size() > cap) c.resize(cap);
        std::vector<std::size_t> keep;
        for (const auto& [p, d, u] : c) keep.push_back(u);
        std::sort(keep.begin(), keep.end());
        for (std::size_t u : keep) assoc[u] = static_cast<int>(b);
    }
    set_association(state, assoc);
}

NetworkState place_scenario(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<Vec2> sbs(cfg.n_sbs);
    for (auto& p : sbs) p = uniform_on_disc(rng, cfg.area_radius_m);
    std::vector<Vec2> users(cfg.n_users);
    for (auto& p : users) p = uniform_on_disc(rng, cfg.area_radius_m);
    NetworkState state = make_state(cfg, std::move(sbs), std::move(users));
    redraw_fading(state, rng);
    associate_nearest(state, cfg);
    return state;
}

double uplink_sinr(const NetworkState& state, std::span<const Action> joint, std::size_t user,
                   std::size_t sbs, std::size_t block) {
    const double signal = state.radio.p_user_w * state.h_ul(user, sbs, block);
    double interference = 0.0;
    for (std::size_t m = 0; m < joint.size(); ++m) {
        const int local = joint[m].ul_user(static_cast<int>(block));
        if (local < 0) continue;
        const std::size_t other = state.served[m][static_cast<std::size_t>(local)];
        if (other == user) continue;
        interference += state.radio.p_user_w * state.h_ul(other, sbs, block);
    }
    return signal / (state.radio.noise_w + interference);
}

double uplink_sinr(const NetworkState& state, std::size_t user, std::size_t sbs, std::size_t block) {
    return uplink_sinr(state, state.allocations, user, sbs, block);
}

double downlink_sinr(const NetworkState& state, std::span<const Action> joint, std::size_t user,
                     std::size_t sbs, std::size_t block) {
    const double signal = state.radio.p_sbs_w * state.h_dl(user, sbs, block);
    double interference = 0.0;
    for (std::size_t m = 0; m < joint.size(); ++m) {
        if (m == sbs || !joint[m].uses_dl_block(static_cast<int>(block))) continue;
        interference += state.radio.p_sbs_w * state.h_dl(user, m, block);
    }
    return signal / (state.radio.noise_w + interference);
}

double downlink_sinr(const NetworkState& state, std::size_t user, std::size_t sbs, std::size_t block) {
    return downlink_sinr(state, state.allocations, user, sbs, block);
}

double block_rate(double sinr, double bandwidth_hz) {
    return bandwidth_hz * std::log2(1.0 + sinr);
}

double link_rate(std::span<const int> assigned, std::span<const double> sinrs, double bandwidth_hz) {
    if (assigned.size() != sinrs.size())
        throw std::invalid_argument("link_rate: assignment and SINR vectors differ in length");
    double c = 0.0;
    for (std::size_t k = 0; k < assigned.size(); ++k)
        if (assigned[k] != 0) c += block_rate(sinrs[k], bandwidth_hz);
    return c;
}

}  // namespace vrnet
