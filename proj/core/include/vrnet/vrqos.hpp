#pragma once

// Per-user VR quality of service: tracking accuracy under uplink bit errors,
// transmission and processing delay, and the multiplicative delay x tracking
// utility.

#include "vrnet/channel.hpp"
#include "vrnet/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace vrnet {

inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

/// Position in metres (x, y, z) followed by orientation in radians.
struct TrackingVector {
    std::array<double, 6> c{};

    /// Wraps the three orientation components into [-pi, pi].
    [[nodiscard]] TrackingVector wrapped() const;
    friend bool operator==(const TrackingVector&, const TrackingVector&) = default;
};

double tracking_distance(const TrackingVector& a, const TrackingVector& b);

/// Fixed-point encoding of a tracking vector.
struct TrackingEncoding {
    int bits_per_component = 16;
    std::array<double, 6> lo{-2.0, -2.0, -2.0, -3.14159265358979323846, -3.14159265358979323846,
                             -3.14159265358979323846};
    std::array<double, 6> hi{2.0, 2.0, 2.0, 3.14159265358979323846, 3.14159265358979323846,
                             3.14159265358979323846};

    void validate() const;
    [[nodiscard]] std::size_t total_bits() const { return 6 * static_cast<std::size_t>(bits_per_component); }
    [[nodiscard]] double step(std::size_t component) const;
};

using Bitstring = std::vector<std::uint8_t>;

/// Clamps, quantizes to the nearest code and concatenates MSB-first per component.
Bitstring encode_tracking(const TrackingVector& v, const TrackingEncoding& enc);
TrackingVector decode_tracking(const Bitstring& bits, const TrackingEncoding& enc);

/// p_e(sinr) = exp(-sinr / 2) / 2.
double bit_error_probability(double sinr);

/// Sends the encoded truth over the given uplink blocks (bits striped
/// round-robin), flipping each bit with p_e of its block's SINR, and decodes.
/// With no blocks the worst decodable vector is returned.
TrackingVector corrupt_tracking(const TrackingVector& truth, std::span<const double> block_sinrs,
                                const TrackingEncoding& enc, Rng& rng);

/// Per component, the quantization endpoint farther from the reference.
TrackingVector worst_case_vector(const TrackingVector& reference, const TrackingEncoding& enc);
double worst_case_error(const TrackingVector& reference, const TrackingEncoding& enc);

/// K = 1 - |received - reference| / worst_error, clamped to [0, 1].
double tracking_accuracy(const TrackingVector& received, const TrackingVector& reference,
                         double worst_error);

/// Bits the SBS must correct in the rendered frame; linear in the normalized
/// tracking error and saturating at L.
double correction_bits(const TrackingVector& received, const TrackingVector& reference,
                       double worst_error, double image_bits);

/// L / dl_rate + A / ul_rate; +inf when either rate is zero.
double transmission_delay(double image_bits, double tracking_bits, double dl_rate, double ul_rate);
/// correction / (M / n_assoc).
double processing_delay(double correction, double compute_bits, std::size_t n_assoc);
double total_delay(double d_tx, double d_proc);
/// 1 below gamma_d, linear down to 0 at d_max; a step at gamma_d when d_max <= gamma_d.
double delay_utility(double d, double d_max, double gamma_d);
/// delay_util * k; both must lie in [0, 1].
double total_utility(double delay_util, double k);

/// Raw video rate px_w * px_h * depth * fps * eyes / compression in bit/s.
double demand_rate(double px_w, double px_h, double bit_depth, double fps, double eyes,
                   double compression);
/// bit/s expressed in binary megabits (divided by 1024^2).
inline double to_binary_mbit(double bits) { return bits / (1024.0 * 1024.0); }

/// Constants entering the QoS of every user.
struct QosParams {
    double image_bits = 442368.0;
    double tracking_bits = 819200.0;
    double compute_bits = 1.0e9;
    double gamma_d = 0.020;
    TrackingEncoding enc;

    static QosParams from(const ScenarioConfig& cfg);
};

/// Rates, tracking accuracy and processing delay of one user under one allocation.
/// `dl_rate_min` is the rate of the user's worst single downlink block.
struct UserLinkState {
    double k = 1.0;
    double dl_rate = 0.0;
    double dl_rate_min = 0.0;
    double ul_rate = 0.0;
    double processing_delay = 0.0;
};

double link_delay(const QosParams& p, const UserLinkState& s);
double link_max_delay(const QosParams& p, const UserLinkState& s);
double link_utility(const QosParams& p, const UserLinkState& s);

struct QosBreakdown {
    double k = 0.0;
    double d_transmission = 0.0;
    double d_processing = 0.0;
    double d_total = 0.0;
    double d_max = 0.0;
    double delay_utility = 0.0;
    double total_utility = 0.0;
    double dl_rate = 0.0;
    double ul_rate = 0.0;
    double d_downlink = 0.0;  ///< L / dl_rate, the downlink share of d_transmission
};

/// Maximum delay of a served user over its feasible downlink assignments with
/// the uplink held fixed: the delay when it is left with its minimum-rate
/// single downlink block.
double max_delay(const QosParams& p, const NetworkState& state, std::span<const Action> joint,
                 std::size_t user, double processing_delay);

/// Rates of a served user under `joint` (uplink interference from the joint action).
struct UserRates {
    double dl_rate = 0.0;
    double dl_rate_min = 0.0;
    double ul_rate = 0.0;
    std::vector<double> ul_sinrs;  ///< SINR per assigned uplink block, in block order
};
UserRates user_rates(const NetworkState& state, std::span<const Action> joint, std::size_t user);

/// Full QoS of a served user for one corruption realization.
QosBreakdown evaluate_user(const QosParams& p, const NetworkState& state, std::span<const Action> joint,
                           std::size_t user, const TrackingVector& truth, Rng& rng);

/// Utility change from altering the uplink allocation (dl allocation fixed):
/// each state contributes K (L/c_min - L/c_dl) / (max_sd D^T + D^P - gamma_d)
/// in the linear branch and K below gamma_d.
double gain_uplink(const QosParams& p, const UserLinkState& before, const UserLinkState& after);

/// Exact gain from adding downlink rate `delta_rate` with the uplink fixed:
/// (K L / (D_max - gamma_d)) * c_delta / (c^2 + c c_delta). Valid while the
/// delay stays at or above gamma_d.
double gain_downlink(const QosParams& p, const UserLinkState& s, double delta_rate);
/// c_delta >> c limit: K L / ((D_max - gamma_d) c).
double gain_downlink_large_delta(const QosParams& p, const UserLinkState& s);
/// c_delta << c limit: K L c_delta / ((D_max - gamma_d) c^2).
double gain_downlink_small_delta(const QosParams& p, const UserLinkState& s, double delta_rate);
/// Picks the large/small branch when c_delta/c is beyond `ratio` or below
/// 1/ratio, the exact form otherwise.
double gain_downlink_approx(const QosParams& p, const UserLinkState& s, double delta_rate,
                            double ratio = 10.0);

/// Synthetic head-mounted-display trajectories: a bounded random walk of the
/// position inside a 2 m cube plus sinusoidal head orientation.
class TrajectoryGenerator {
public:
    TrajectoryGenerator(std::size_t n_users, std::uint64_t seed, double slot_s = 1.0 / 60.0);

    /// Pose of every user at the current slot, then advances one slot.
    std::vector<TrackingVector> next();
    [[nodiscard]] std::size_t slot() const { return slot_; }

private:
    struct Motion {
        std::array<double, 3> pos{};
        std::array<double, 3> amp{};
        std::array<double, 3> freq{};
        std::array<double, 3> phase{};
    };
    Rng rng_;
    std::vector<Motion> users_;
    double slot_s_;
    std::size_t slot_ = 0;
};

}  // namespace vrnet
