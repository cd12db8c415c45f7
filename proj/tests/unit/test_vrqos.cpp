#include <doctest.h>

#include "test_support.hpp"

#include <vrnet/vrqos.hpp>

#include <cmath>
#include <limits>
#include <numbers>

using namespace vrnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TrackingEncoding unit_encoding() {
    TrackingEncoding e;
    e.lo.fill(-1.0);
    e.hi.fill(1.0);
    return e;
}

TrackingVector random_vector(Rng& rng, const TrackingEncoding& e) {
    TrackingVector v;
    for (std::size_t i = 0; i < 6; ++i) v.c[i] = uniform(rng, e.lo[i], e.hi[i]);
    return v;
}

int differing_bits(const Bitstring& a, const Bitstring& b) {
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("encoding length and midpoint codes") {
    const TrackingEncoding enc;
    const Bitstring bits = encode_tracking(TrackingVector{}, enc);
    REQUIRE(bits.size() == 96);
    for (std::size_t c = 0; c < 6; ++c) {
        CHECK(bits[c * 16] == 1);
        for (std::size_t b = 1; b < 16; ++b) CHECK(bits[c * 16 + b] == 0);
    }
}

TEST_CASE("encode/decode round trip is within half a step") {
    const TrackingEncoding enc;
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const TrackingVector v = random_vector(rng, enc);
        const TrackingVector d = decode_tracking(encode_tracking(v, enc), enc);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(d.c[i] - v.c[i]) <= 0.5 * enc.step(i) + 1e-15);
    }
    TrackingEncoding bad;
    bad.bits_per_component = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("out-of-range components are clamped") {
    const TrackingEncoding enc;
    TrackingVector v;
    v.c[0] = 10.0;
    v.c[3] = -10.0;
    const TrackingVector d = decode_tracking(encode_tracking(v, enc), enc);
    CHECK(d.c[0] == doctest::Approx(2.0));
    CHECK(d.c[3] == doctest::Approx(-std::numbers::pi));
}

TEST_CASE("bit error probability") {
    CHECK(bit_error_probability(0.0) == doctest::Approx(0.5));
    CHECK(bit_error_probability(kInf) == 0.0);
    CHECK(bit_error_probability(2.0) == doctest::Approx(0.5 * std::exp(-1.0)));
}

TEST_CASE("corruption at infinite SINR returns the quantized truth") {
    const TrackingEncoding enc;
    Rng rng(4);
    const TrackingVector v = random_vector(rng, enc);
    const std::vector<double> sinr{kInf, kInf};
    const TrackingVector got = corrupt_tracking(v, sinr, enc, rng);
    const TrackingVector q = decode_tracking(encode_tracking(v, enc), enc);
    for (std::size_t i = 0; i < 6; ++i) CHECK(got.c[i] == q.c[i]);
}

TEST_CASE("corruption at SINR 0 flips half of the bits") {
    const TrackingEncoding enc;
    Rng rng(5);
    const TrackingVector v{};
    const Bitstring ref = encode_tracking(v, enc);
    const std::vector<double> sinr{0.0};
    long flipped = 0, total = 0;
    while (total < 100000) {
        flipped += differing_bits(ref, encode_tracking(corrupt_tracking(v, sinr, enc, rng), enc));
        total += static_cast<long>(ref.size());
    }
    CHECK(std::abs(flipped / double(total) - 0.5) < 0.01);
}

TEST_CASE("bits are striped round-robin over the blocks") {
    const TrackingEncoding enc;
    Rng rng(6);
    const TrackingVector v{};
    const Bitstring ref = encode_tracking(v, enc);
    // block 0 perfect, block 1 at p_e = 0.5: only odd bits may flip
    const std::vector<double> sinr{kInf, 0.0};
    int odd = 0;
    for (int t = 0; t < 200; ++t) {
        const Bitstring got = encode_tracking(corrupt_tracking(v, sinr, enc, rng), enc);
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (i % 2 == 0) REQUIRE(got[i] == ref[i]);
            else odd += got[i] != ref[i] ? 1 : 0;
        }
    }
    CHECK(odd > 0);
}

TEST_CASE("corruption is reproducible and worst-case without blocks") {
    const TrackingEncoding enc;
    Rng a(8), b(8);
    TrackingVector v;
    v.c = {0.3, -0.2, 1.0, 0.1, -1.5, 2.0};
    const std::vector<double> sinr{1.0, 2.0};
    const TrackingVector x = corrupt_tracking(v, sinr, enc, a);
    const TrackingVector y = corrupt_tracking(v, sinr, enc, b);
    for (std::size_t i = 0; i < 6; ++i) CHECK(x.c[i] == y.c[i]);
    const TrackingVector lost = corrupt_tracking(v, {}, enc, a);
    CHECK(tracking_distance(lost, v) == doctest::Approx(worst_case_error(v, enc)));
}

TEST_CASE("tracking accuracy") {
    TrackingVector a, b;
    CHECK(tracking_accuracy(a, a, 2.0) == 1.0);
    b.c[0] = 2.0;
    CHECK(tracking_accuracy(b, a, 2.0) == doctest::Approx(0.0));
    b.c[0] = 1.0;
    CHECK(tracking_accuracy(b, a, 2.0) == doctest::Approx(0.5));
    b.c[0] = 5.0;
    CHECK(tracking_accuracy(b, a, 2.0) == 0.0);
    CHECK_THROWS_AS(tracking_accuracy(a, a, 0.0), std::invalid_argument);
}

TEST_CASE("worst-case error geometry") {
    const TrackingEncoding enc = unit_encoding();
    CHECK(worst_case_error(TrackingVector{}, enc) == doctest::Approx(std::sqrt(6.0)));
    TrackingVector corner;
    corner.c.fill(1.0);
    CHECK(worst_case_error(corner, enc) == doctest::Approx(std::sqrt(6.0 * 4.0)));
}

TEST_CASE("worst-case error dominates random corruptions") {
    const TrackingEncoding enc;
    Rng rng(12);
    const TrackingVector ref = random_vector(rng, enc);
    const double worst = worst_case_error(ref, enc);
    const std::vector<double> sinr{0.0, 0.5};
    for (int t = 0; t < 10000; ++t) REQUIRE(tracking_distance(corrupt_tracking(ref, sinr, enc, rng), ref) <= worst + 1e-12);
}

TEST_CASE("delays") {
    CHECK(transmission_delay(100, 50, 100, 50) == doctest::Approx(2.0));
    CHECK(transmission_delay(100, 50, kInf, kInf) == 0.0);
    CHECK(std::isinf(transmission_delay(100, 50, 0.0, 50)));
    const double l = demand_rate(1920, 1080, 16, 60, 2, 150) / 60.0;
    CHECK(transmission_delay(l, 0.0, demand_rate(1920, 1080, 16, 60, 2, 150), kInf) == doctest::Approx(1.0 / 60.0));

    CHECK(processing_delay(10, 100, 2) == doctest::Approx(0.2));
    CHECK(processing_delay(0, 1e9, 3) == 0.0);
    CHECK(processing_delay(442368, 1e9, 1) == doctest::Approx(442368 / 1e9));
    CHECK_THROWS_AS(processing_delay(1, 1, 0), std::invalid_argument);
    CHECK(processing_delay(20, 100, 3) >= processing_delay(10, 100, 3));
    CHECK(processing_delay(10, 100, 3) >= processing_delay(10, 100, 2));

    CHECK(total_delay(1, 2) == 3);
    CHECK(total_delay(0, 0) == 0);
    CHECK(std::isinf(total_delay(kInf, 1)));
}

TEST_CASE("correction bits") {
    TrackingVector a, b;
    CHECK(correction_bits(a, a, 2.0, 1000) == 0.0);
    b.c[1] = 2.0;
    CHECK(correction_bits(b, a, 2.0, 1000) == 1000.0);
    b.c[1] = 0.5;
    CHECK(correction_bits(b, a, 2.0, 1000) == 250.0);
    b.c[1] = 10.0;
    CHECK(correction_bits(b, a, 2.0, 1000) == 1000.0);
}

TEST_CASE("delay utility") {
    CHECK(delay_utility(0.01, 0.05, 0.02) == 1.0);
    CHECK(delay_utility(0.05, 0.05, 0.02) == 0.0);
    CHECK(delay_utility(1.5, 2.0, 1.0) == doctest::Approx(0.5));
    CHECK(delay_utility(0.01, 0.015, 0.02) == 1.0);
    CHECK(delay_utility(0.03, 0.015, 0.02) == 0.0);
    CHECK(delay_utility(kInf, kInf, 0.02) == 0.0);
}

TEST_CASE("total utility") {
    CHECK(total_utility(1, 1) == 1.0);
    CHECK(total_utility(0.5, 0.8) == doctest::Approx(0.4));
    CHECK(total_utility(0.7, 0.0) == 0.0);
    CHECK_THROWS_AS(total_utility(1.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(total_utility(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("demand rate") {
    CHECK(to_binary_mbit(demand_rate(1920, 1080, 16, 60, 2, 150)) == 25.3125);
    CHECK(to_binary_mbit(demand_rate(1920, 1080, 16, 60, 2, 1)) == 3796.875);
    CHECK(demand_rate(1, 1, 1, 1, 1, 1) == 1.0);
    CHECK(demand_rate(1920, 1080, 16, 120, 2, 150) == 2.0 * demand_rate(1920, 1080, 16, 60, 2, 150));
    CHECK_THROWS_AS(demand_rate(0, 1, 1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("max_delay equals the brute-force worst downlink block set") {
    // one SBS, two users, S^d = 3: every surjective block-to-user map
    ScenarioConfig c = test::small_config(1, 2, 3);
    NetworkState s = make_state(c, {{0.0, 0.0}}, {{12.0, 0.0}, {-7.0, 9.0}});
    Rng rng(31);
    redraw_fading(s, rng);
    set_association(s, {0, 0});
    const QosParams p = QosParams::from(c);
    const std::vector<Action> joint{Action{{2, 1}, {0, 1, 1}}};
    const UserRates r = user_rates(s, joint, 0);
    const double dp = 1e-4;
    double brute = 0.0;
    for (int mask = 1; mask < 7; ++mask) {  // blocks of user 0; user 1 keeps the rest (non-empty)
        double c_dl = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            if (mask & (1 << k)) c_dl += block_rate(downlink_sinr(s, joint, 0, 0, k), s.radio.bandwidth_hz);
        brute = std::max(brute, transmission_delay(p.image_bits, p.tracking_bits, c_dl, r.ul_rate) + dp);
    }
    CHECK(max_delay(p, s, joint, 0, dp) == doctest::Approx(brute).epsilon(1e-12));
    CHECK(max_delay(p, s, joint, 0, dp) >=
          transmission_delay(p.image_bits, p.tracking_bits, r.dl_rate, r.ul_rate) + dp);

    // single downlink block: the only assignment
    ScenarioConfig c1 = test::small_config(1, 1, 1);
    NetworkState s1 = make_state(c1, {{0.0, 0.0}}, {{12.0, 0.0}});
    set_association(s1, {0});
    const std::vector<Action> j1{Action{{1}, {0}}};
    const UserRates r1 = user_rates(s1, j1, 0);
    CHECK(max_delay(p, s1, j1, 0, dp) ==
          doctest::Approx(transmission_delay(p.image_bits, p.tracking_bits, r1.dl_rate, r1.ul_rate) + dp));
}

TEST_CASE("evaluate_user keeps the breakdown consistent") {
    NetworkState s = test::two_cell_state(2, 3, 77);
    const QosParams p = QosParams::from(test::small_config(2, 4, 3));
    const std::vector<Action> joint{Action{{1, 2}, {0, 1, 0}}, Action{{2, 1}, {1, 1, 0}}};
    Rng rng(1);
    TrajectoryGenerator traj(4, 3);
    const auto truths = traj.next();
    for (std::size_t u = 0; u < 4; ++u) {
        const QosBreakdown q = evaluate_user(p, s, joint, u, truths[u], rng);
        CHECK(q.d_total == doctest::Approx(q.d_transmission + q.d_processing));
        CHECK(q.total_utility == doctest::Approx(q.delay_utility * q.k).epsilon(1e-12));
        CHECK(q.k >= 0.0);
        CHECK(q.k <= 1.0);
        CHECK(q.d_max >= q.d_total);
        CHECK(q.delay_utility >= 0.0);
        CHECK(q.delay_utility <= 1.0);
    }
    CHECK_THROWS(evaluate_user(p, s, std::vector<Action>{Action{}, Action{}}, 0, truths[0], rng));
}

TEST_CASE("trajectory generator stays in range and is reproducible") {
    TrajectoryGenerator a(5, 42), b(5, 42);
    for (int t = 0; t < 600; ++t) {
        const auto x = a.next();
        const auto y = b.next();
        for (std::size_t u = 0; u < 5; ++u) {
            for (std::size_t i = 0; i < 6; ++i) REQUIRE(x[u].c[i] == y[u].c[i]);
            for (std::size_t i = 0; i < 3; ++i) REQUIRE(std::abs(x[u].c[i]) <= 1.0);
            for (std::size_t i = 3; i < 6; ++i) REQUIRE(std::abs(x[u].c[i]) <= std::numbers::pi);
        }
    }
    CHECK(a.slot() == 600);
}

namespace {

UserLinkState random_link(Rng& rng) {
    UserLinkState s;
    s.k = uniform(rng, 0.05, 1.0);
    s.dl_rate_min = uniform(rng, 2e6, 2e7);
    s.dl_rate = s.dl_rate_min * uniform(rng, 1.0, 5.0);
    s.ul_rate = uniform(rng, 2e6, 5e7);
    s.processing_delay = uniform(rng, 0.0, 5e-4);
    return s;
}

}  // namespace

TEST_CASE("uplink gain equals the direct utility difference") {
    QosParams p;
    Rng rng(101);
    for (int t = 0; t < 1000; ++t) {
        const UserLinkState before = random_link(rng);
        UserLinkState after = before;
        after.k = uniform(rng, 0.05, 1.0);
        after.ul_rate = uniform(rng, 2e6, 5e7);
        after.processing_delay = uniform(rng, 0.0, 5e-4);
        const double direct = link_utility(p, after) - link_utility(p, before);
        CHECK(std::abs(gain_uplink(p, before, after) - direct) <= 1e-9);
    }
    const UserLinkState s = random_link(rng);
    CHECK(gain_uplink(p, s, s) == 0.0);
    UserLinkState perfect = s;
    perfect.k = 1.0;
    perfect.ul_rate = 1e15;
    perfect.dl_rate = 1e15;
    perfect.processing_delay = 0.0;
    CHECK(gain_uplink(p, s, perfect) == doctest::Approx(1.0 - link_utility(p, s)));
}

TEST_CASE("downlink gain equals the direct utility difference") {
    QosParams p;
    Rng rng(202);
    int checked = 0;
    for (int t = 0; t < 5000 && checked < 1000; ++t) {
        const UserLinkState before = random_link(rng);
        UserLinkState after = before;
        const double delta = before.dl_rate * uniform(rng, 0.001, 2.0);
        after.dl_rate += delta;
        if (link_delay(p, after) < p.gamma_d || link_delay(p, before) < p.gamma_d) continue;
        ++checked;
        const double direct = link_utility(p, after) - link_utility(p, before);
        CHECK(std::abs(gain_downlink(p, before, delta) - direct) <= 1e-9);
    }
    CHECK(checked == 1000);
    CHECK(gain_downlink(p, random_link(rng), 0.0) == 0.0);
}

TEST_CASE("downlink gain asymptotic branches") {
    QosParams p;
    Rng rng(303);
    for (int t = 0; t < 200; ++t) {
        const UserLinkState s = random_link(rng);
        const double c = s.dl_rate;
        const double big = gain_downlink(p, s, 100.0 * c);
        CHECK(std::abs(gain_downlink_large_delta(p, s) - big) <= 0.02 * std::abs(big));
        const double small = gain_downlink(p, s, 0.01 * c);
        CHECK(std::abs(gain_downlink_small_delta(p, s, 0.01 * c) - small) <= 0.05 * std::abs(small));
        CHECK(gain_downlink_approx(p, s, 100.0 * c, 10.0) == gain_downlink_large_delta(p, s));
        CHECK(gain_downlink_approx(p, s, c, 10.0) == gain_downlink(p, s, c));
    }
}
