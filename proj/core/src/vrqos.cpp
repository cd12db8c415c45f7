#include "vrnet/vrqos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vrnet {

TrackingVector TrackingVector::wrapped() const {
    TrackingVector out = *this;
    for (std::size_t i = 3; i < 6; ++i) out.c[i] = std::remainder(out.c[i], 2.0 * std::numbers::pi);
    return out;
}

double tracking_distance(const TrackingVector& a, const TrackingVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const double d = a.c[i] - b.c[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void TrackingEncoding::validate() const {
    if (bits_per_component < 2 || bits_per_component > 32)
        throw std::invalid_argument("tracking encoding needs 2..32 bits per component");
    for (std::size_t i = 0; i < 6; ++i)
        if (!(lo[i] < hi[i])) throw std::invalid_argument("tracking encoding range must have lo < hi");
}

double TrackingEncoding::step(std::size_t component) const {
    const double levels = std::ldexp(1.0, bits_per_component) - 1.0;
    return (hi[component] - lo[component]) / levels;
}

Bitstring encode_tracking(const TrackingVector& v, const TrackingEncoding& enc) {
    enc.validate();
    const auto nbits = static_cast<std::size_t>(enc.bits_per_component);
    const double levels = std::ldexp(1.0, enc.bits_per_component) - 1.0;
    Bitstring bits;
    bits.reserve(enc.total_bits());
    for (std::size_t i = 0; i < 6; ++i) {
        const double x = std::clamp(v.c[i], enc.lo[i], enc.hi[i]);
        const double q = std::round((x - enc.lo[i]) / (enc.hi[i] - enc.lo[i]) * levels);
        const auto code = static_cast<std::uint64_t>(std::clamp(q, 0.0, levels));
        for (std::size_t b = nbits; b-- > 0;) bits.push_back(static_cast<std::uint8_t>((code >> b) & 1U));
    }
    return bits;
}

TrackingVector decode_tracking(const Bitstring& bits, const TrackingEncoding& enc) {
    enc.validate();
    if (bits.size() != enc.total_bits()) throw std::invalid_argument("bitstring length does not match encoding");
    const auto nbits = static_cast<std::size_t>(enc.bits_per_component);
    TrackingVector v;
    for (std::size_t i = 0; i < 6; ++i) {
        std::uint64_t code = 0;
        for (std::size_t b = 0; b < nbits; ++b) code = (code << 1) | (bits[i * nbits + b] & 1U);
        v.c[i] = enc.lo[i] + static_cast<double>(code) * enc.step(i);
    }
    return v;
}

double bit_error_probability(double sinr) {
    if (sinr == std::numeric_limits<double>::infinity()) return 0.0;
    return 0.5 * std::exp(-0.5 * std::max(sinr, 0.0));
}

TrackingVector corrupt_tracking(const TrackingVector& truth, std::span<const double> block_sinrs,
                                const TrackingEncoding& enc, Rng& rng) {
    if (block_sinrs.empty()) return worst_case_vector(truth, enc);
    Bitstring bits = encode_tracking(truth, enc);
    std::vector<double> pe(block_sinrs.size());
    std::transform(block_sinrs.begin(), block_sinrs.end(), pe.begin(), bit_error_probability);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bernoulli(rng, pe[i % pe.size()])) bits[i] ^= 1U;
    return decode_tracking(bits, enc);
}

TrackingVector worst_case_vector(const TrackingVector& reference, const TrackingEncoding& enc) {
    TrackingVector w;
    for (std::size_t i = 0; i < 6; ++i) {
        const double r = std::clamp(reference.c[i], enc.lo[i], enc.hi[i]);
        w.c[i] = (r - enc.lo[i] >= enc.hi[i] - r) ? enc.lo[i] : enc.hi[i];
    }
    return w;
}

double worst_case_error(const TrackingVector& reference, const TrackingEncoding& enc) {
    return tracking_distance(worst_case_vector(reference, enc), reference);
}

double tracking_accuracy(const TrackingVector& received, const TrackingVector& reference,
                         double worst_error) {
    if (!(worst_error > 0.0)) throw std::invalid_argument("tracking_accuracy: worst_error must be > 0");
    return std::clamp(1.0 - tracking_distance(received, reference) / worst_error, 0.0, 1.0);
}

double correction_bits(const TrackingVector& received, const TrackingVector& reference,
                       double worst_error, double image_bits) {
    if (!(image_bits > 0.0)) throw std::invalid_argument("correction_bits: L must be > 0");
    if (!(worst_error > 0.0)) throw std::invalid_argument("correction_bits: worst_error must be > 0");
    const double frac = std::min(1.0, tracking_distance(received, reference) / worst_error);
    return std::round(image_bits * frac);
}

double transmission_delay(double image_bits, double tracking_bits, double dl_rate, double ul_rate) {
    if (!(dl_rate > 0.0) || !(ul_rate > 0.0)) return kInfiniteDelay;
    return image_bits / dl_rate + tracking_bits / ul_rate;
}

double processing_delay(double correction, double compute_bits, std::size_t n_assoc) {
    if (n_assoc == 0) throw std::invalid_argument("processing_delay: no associated users");
    if (!(compute_bits > 0.0)) throw std::invalid_argument("processing_delay: M must be > 0");
    return correction / (compute_bits / static_cast<double>(n_assoc));
}

double total_delay(double d_tx, double d_proc) { return d_tx + d_proc; }

double delay_utility(double d, double d_max, double gamma_d) {
    if (std::isnan(d) || std::isnan(d_max)) throw std::invalid_argument("delay_utility: NaN delay");
    if (d_max <= gamma_d) return d <= gamma_d ? 1.0 : 0.0;
    if (d < gamma_d) return 1.0;
    if (std::isinf(d)) return 0.0;
    if (std::isinf(d_max)) return 1.0;
    return std::clamp((d_max - d) / (d_max - gamma_d), 0.0, 1.0);
}

double total_utility(double delay_util, double k) {
    if (!(delay_util >= 0.0 && delay_util <= 1.0) || !(k >= 0.0 && k <= 1.0))
        throw std::invalid_argument("total_utility: factors must lie in [0, 1]");
    return delay_util * k;
}

double demand_rate(double px_w, double px_h, double bit_depth, double fps, double eyes,
                   double compression) {
    if (!(px_w > 0 && px_h > 0 && bit_depth > 0 && fps > 0 && eyes > 0 && compression > 0))
        throw std::invalid_argument("demand_rate: all arguments must be > 0");
    return px_w * px_h * bit_depth * fps * eyes / compression;
}

QosParams QosParams::from(const ScenarioConfig& cfg) {
    QosParams p;
    p.image_bits = cfg.image_bits;
    p.tracking_bits = cfg.tracking_bits;
    p.compute_bits = cfg.compute_bits;
    p.gamma_d = cfg.gamma_d_s;
    return p;
}

double link_delay(const QosParams& p, const UserLinkState& s) {
    return total_delay(transmission_delay(p.image_bits, p.tracking_bits, s.dl_rate, s.ul_rate),
                       s.processing_delay);
}

double link_max_delay(const QosParams& p, const UserLinkState& s) {
    return total_delay(transmission_delay(p.image_bits, p.tracking_bits, s.dl_rate_min, s.ul_rate),
                       s.processing_delay);
}

double link_utility(const QosParams& p, const UserLinkState& s) {
    return total_utility(delay_utility(link_delay(p, s), link_max_delay(p, s), p.gamma_d), s.k);
}

UserRates user_rates(const NetworkState& state, std::span<const Action> joint, std::size_t user) {
    const int b = state.association.at(user);
    if (b == kUnserved) throw std::invalid_argument("user_rates: user is not served");
    const auto sbs = static_cast<std::size_t>(b);
    const Action& a = joint[sbs];
    const auto local = static_cast<std::size_t>(state.local_index[user]);
    if (local >= a.n_users()) throw std::invalid_argument("user_rates: action does not cover the user");
    const double bw = state.radio.bandwidth_hz;

    UserRates r;
    const int first = a.dl_first_block(local);
    const int last = first + a.dl_counts[local];
    r.dl_rate_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < state.n_dl; ++k) {
        const double c = block_rate(downlink_sinr(state, joint, user, sbs, k), bw);
        r.dl_rate_min = std::min(r.dl_rate_min, c);
        if (static_cast<int>(k) >= first && static_cast<int>(k) < last) r.dl_rate += c;
    }
    for (std::size_t k = 0; k < state.n_ul; ++k) {
        if (a.ul_user(static_cast<int>(k)) != static_cast<int>(local)) continue;
        const double g = uplink_sinr(state, joint, user, sbs, k);
        r.ul_sinrs.push_back(g);
        r.ul_rate += block_rate(g, bw);
    }
    return r;
}

double max_delay(const QosParams& p, const NetworkState& state, std::span<const Action> joint,
                 std::size_t user, double processing_delay) {
    const UserRates r = user_rates(state, joint, user);
    return total_delay(transmission_delay(p.image_bits, p.tracking_bits, r.dl_rate_min, r.ul_rate),
                       processing_delay);
}

QosBreakdown evaluate_user(const QosParams& p, const NetworkState& state, std::span<const Action> joint,
                           std::size_t user, const TrackingVector& truth, Rng& rng) {
    const UserRates r = user_rates(state, joint, user);
    const auto sbs = static_cast<std::size_t>(state.association[user]);

    const TrackingVector received = corrupt_tracking(truth, r.ul_sinrs, p.enc, rng);
    const double worst = worst_case_error(truth, p.enc);

    QosBreakdown q;
    q.k = tracking_accuracy(received, truth, worst);
    q.dl_rate = r.dl_rate;
    q.ul_rate = r.ul_rate;
    q.d_downlink = r.dl_rate > 0.0 ? p.image_bits / r.dl_rate : kInfiniteDelay;
    q.d_transmission = transmission_delay(p.image_bits, p.tracking_bits, r.dl_rate, r.ul_rate);
    q.d_processing = processing_delay(correction_bits(received, truth, worst, p.image_bits),
                                      p.compute_bits, state.served[sbs].size());
    q.d_total = total_delay(q.d_transmission, q.d_processing);
    q.d_max = total_delay(transmission_delay(p.image_bits, p.tracking_bits, r.dl_rate_min, r.ul_rate),
                          q.d_processing);
    q.delay_utility = delay_utility(q.d_total, q.d_max, p.gamma_d);
    q.total_utility = total_utility(q.delay_utility, q.k);
    return q;
}

namespace {

// One side of the uplink gain: the utility written through the rate terms.
double uplink_gain_term(const QosParams& p, const UserLinkState& s) {
    const double d = link_delay(p, s);
    const double d_max_tx = p.image_bits / s.dl_rate_min + p.tracking_bits / s.ul_rate;
    const double denom = d_max_tx + s.processing_delay - p.gamma_d;
    if (denom <= 0.0) return d <= p.gamma_d ? s.k : 0.0;
    if (d < p.gamma_d) return s.k;
    return (p.image_bits / s.dl_rate_min - p.image_bits / s.dl_rate) * s.k / denom;
}

double downlink_scale(const QosParams& p, const UserLinkState& s) {
    return s.k * p.image_bits / (link_max_delay(p, s) - p.gamma_d);
}

}  // namespace

double gain_uplink(const QosParams& p, const UserLinkState& before, const UserLinkState& after) {
    return uplink_gain_term(p, after) - uplink_gain_term(p, before);
}

double gain_downlink(const QosParams& p, const UserLinkState& s, double delta_rate) {
    if (delta_rate == 0.0) return 0.0;
    const double c = s.dl_rate;
    return downlink_scale(p, s) * delta_rate / (c * c + c * delta_rate);
}

double gain_downlink_large_delta(const QosParams& p, const UserLinkState& s) {
    return downlink_scale(p, s) / s.dl_rate;
}

double gain_downlink_small_delta(const QosParams& p, const UserLinkState& s, double delta_rate) {
    return downlink_scale(p, s) * delta_rate / (s.dl_rate * s.dl_rate);
}

double gain_downlink_approx(const QosParams& p, const UserLinkState& s, double delta_rate, double ratio) {
    const double r = delta_rate / s.dl_rate;
    if (r >= ratio) return gain_downlink_large_delta(p, s);
    if (r <= 1.0 / ratio) return gain_downlink_small_delta(p, s, delta_rate);
    return gain_downlink(p, s, delta_rate);
}

TrajectoryGenerator::TrajectoryGenerator(std::size_t n_users, std::uint64_t seed, double slot_s)
    : rng_(seed), users_(n_users), slot_s_(slot_s) {
    constexpr double pi = std::numbers::pi;
    for (auto& m : users_) {
        for (std::size_t i = 0; i < 3; ++i) m.pos[i] = uniform(rng_, -1.0, 1.0);
        m.amp = {uniform(rng_, 0.3, 0.9) * pi, uniform(rng_, 0.1, 0.4) * pi, uniform(rng_, 0.05, 0.2) * pi};
        for (std::size_t i = 0; i < 3; ++i) {
            m.freq[i] = uniform(rng_, 0.05, 0.5);
            m.phase[i] = uniform(rng_, 0.0, 2.0 * pi);
        }
    }
}

std::vector<TrackingVector> TrajectoryGenerator::next() {
    const double t = static_cast<double>(slot_) * slot_s_;
    std::vector<TrackingVector> out(users_.size());
    for (std::size_t u = 0; u < users_.size(); ++u) {
        Motion& m = users_[u];
        for (std::size_t i = 0; i < 3; ++i) {
            out[u].c[i] = m.pos[i];
            out[u].c[3 + i] = m.amp[i] * std::sin(2.0 * std::numbers::pi * m.freq[i] * t + m.phase[i]);
        }
        // reflected random walk inside [-1, 1]^3
        for (std::size_t i = 0; i < 3; ++i) {
            double x = m.pos[i] + uniform(rng_, -0.01, 0.01);
            if (x > 1.0) x = 2.0 - x;
            if (x < -1.0) x = -2.0 - x;
            m.pos[i] = x;
        }
    }
    ++slot_;
    return out;
}

}  // namespace vrnet
