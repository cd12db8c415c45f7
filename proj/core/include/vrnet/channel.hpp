#pragma once

// Network geometry, path loss, Rayleigh fading, SINR and Shannon rates for the
// uplink and downlink resource blocks of a small-cell network.

#include "vrnet/action.hpp"
#include "vrnet/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vrnet {

struct ScenarioConfig {
    double area_radius_m = 100.0;
    double sbs_coverage_m = 25.0;
    std::size_t n_sbs = 4;
    std::size_t n_users = 25;
    double p_sbs_dbm = 20.0;
    double p_user_dbm = 20.0;  // not given in the literature; assumption
    double noise_dbm = -95.0;
    double pathloss_exp = 3.0;  // urban small cell; assumption
    std::size_t n_dl_blocks = 5;
    std::size_t n_ul_blocks = 5;
    double block_bandwidth_hz = 1.8e6;
    double image_bits = 442368.0;     // one 1920x1080x16 bit stereo frame, compression 150
    double tracking_bits = 819200.0;  // 100 kB
    double compute_bits = 1.0e9;      // per-SBS processing budget (bit/s); assumption
    double gamma_d_s = 0.020;
    double min_distance_m = 1.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

/// h = g * d^-beta with d clamped to `min_distance_m`.
double channel_gain(double distance_m, double beta, double g, double min_distance_m = 1.0);

/// Unit-mean exponential power gain (squared magnitude of a Rayleigh amplitude).
double draw_fading(Rng& rng);

inline constexpr int kUnserved = -1;

/// Linear-unit radio parameters derived once from a ScenarioConfig.
struct RadioParams {
    double p_sbs_w = 0.0;
    double p_user_w = 0.0;
    double noise_w = 0.0;
    double beta = 3.0;
    double bandwidth_hz = 0.0;
    double min_distance_m = 1.0;

    static RadioParams from(const ScenarioConfig& cfg);
};

/// Geometry, association, fading and allocations of the whole network in one slot.
struct NetworkState {
    std::size_t n_dl = 0;
    std::size_t n_ul = 0;
    RadioParams radio;
    std::vector<Vec2> sbs_positions;
    std::vector<Vec2> user_positions;
    std::vector<int> association;                  ///< serving SBS per user or kUnserved
    std::vector<std::vector<std::size_t>> served;  ///< per SBS, served users in local order
    std::vector<int> local_index;                  ///< user -> index within its SBS, or -1
    std::vector<double> pathloss;                  ///< d^-beta per (user, sbs)
    std::vector<double> dl_fading;                 ///< g per (user, sbs, dl block)
    std::vector<double> ul_fading;                 ///< g per (user, sbs, ul block)
    std::vector<Action> allocations;               ///< per SBS

    [[nodiscard]] std::size_t n_sbs() const { return sbs_positions.size(); }
    [[nodiscard]] std::size_t n_users() const { return user_positions.size(); }

    [[nodiscard]] double dl_g(std::size_t user, std::size_t sbs, std::size_t block) const {
        return dl_fading[(user * n_sbs() + sbs) * n_dl + block];
    }
    [[nodiscard]] double ul_g(std::size_t user, std::size_t sbs, std::size_t block) const {
        return ul_fading[(user * n_sbs() + sbs) * n_ul + block];
    }
    double& dl_g(std::size_t user, std::size_t sbs, std::size_t block) {
        return dl_fading[(user * n_sbs() + sbs) * n_dl + block];
    }
    double& ul_g(std::size_t user, std::size_t sbs, std::size_t block) {
        return ul_fading[(user * n_sbs() + sbs) * n_ul + block];
    }
    [[nodiscard]] double path(std::size_t user, std::size_t sbs) const {
        return pathloss[user * n_sbs() + sbs];
    }
    /// Downlink channel gain h (fading times path loss).
    [[nodiscard]] double h_dl(std::size_t user, std::size_t sbs, std::size_t block) const {
        return dl_g(user, sbs, block) * path(user, sbs);
    }
    [[nodiscard]] double h_ul(std::size_t user, std::size_t sbs, std::size_t block) const {
        return ul_g(user, sbs, block) * path(user, sbs);
    }
};

/// Builds a state from explicit positions: path losses, unit fading, no
/// association and idle allocations. Used by fixtures and by place_scenario.
NetworkState make_state(const ScenarioConfig& cfg, std::vector<Vec2> sbs_positions,
                        std::vector<Vec2> user_positions);

/// Uniform point on the disc of radius r centred at the origin.
Vec2 uniform_on_disc(Rng& rng, double r);

/// Random scenario: i.i.d. uniform positions, fresh fading, users associated
/// to their nearest covering SBS with capacity min(S^d, S^u) (closest users
/// kept; standalone utility is non-increasing in distance), idle allocations.
NetworkState place_scenario(const ScenarioConfig& cfg, Rng& rng);

/// Redraws every fading gain independently.
void redraw_fading(NetworkState& state, Rng& rng);

/// Nearest-covering association with capacity cap; overwrites association,
/// served, local_index and resets allocations to idle.
void associate_nearest(NetworkState& state, const ScenarioConfig& cfg);
/// Same coverage rule, but an over-full SBS keeps the candidates with the
/// highest `priority(user, sbs)`; ties go to the nearer user.
void associate_nearest(NetworkState& state, const ScenarioConfig& cfg,
                       const std::function<double(std::size_t, std::size_t)>& priority);

/// Replace the association with an explicit one (kUnserved allowed).
void set_association(NetworkState& state, const std::vector<int>& association);

/// Uplink SINR of `user` at `sbs` on `block`; interferers are all users
/// transmitting on that uplink block under `joint`.
double uplink_sinr(const NetworkState& state, std::span<const Action> joint, std::size_t user,
                   std::size_t sbs, std::size_t block);
double uplink_sinr(const NetworkState& state, std::size_t user, std::size_t sbs, std::size_t block);

/// Downlink SINR of `user` from `sbs` on `block`; interferers are the other
/// SBSs using that downlink block under `joint`.
double downlink_sinr(const NetworkState& state, std::span<const Action> joint, std::size_t user,
                     std::size_t sbs, std::size_t block);
double downlink_sinr(const NetworkState& state, std::size_t user, std::size_t sbs, std::size_t block);

/// Shannon sum over the assigned blocks: sum_k s_k * B_R * log2(1 + sinr_k).
double link_rate(std::span<const int> assigned, std::span<const double> sinrs, double bandwidth_hz);

/// Rate of a single block.
double block_rate(double sinr, double bandwidth_hz);

}  // namespace vrnet
