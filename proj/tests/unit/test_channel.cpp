#include <doctest.h>

#include "test_support.hpp"

#include <vrnet/channel.hpp>

#include <cmath>

using namespace vrnet;

TEST_CASE("channel_gain follows the power law and clamps short distances") {
    CHECK(channel_gain(1.0, 2.0, 1.0) == doctest::Approx(1.0));
    CHECK(channel_gain(10.0, 2.0, 1.0) == doctest::Approx(0.01));
    CHECK(channel_gain(2.0, 3.0, 0.5) == doctest::Approx(0.0625));
    CHECK(channel_gain(0.0, 3.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(channel_gain(0.5, 3.0, 1.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("dBm conversions round trip") {
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1));
    for (double dbm : {-120.0, -95.0, 0.0, 20.0, 43.0}) {
        const double back = watts_to_dbm(dbm_to_watts(dbm));
        CHECK(std::abs(back - dbm) <= 1e-12 * std::max(1.0, std::abs(dbm)));
    }
}

TEST_CASE("draw_fading is a unit-mean exponential") {
    Rng rng(2024);
    const int n = 1000000;
    double s = 0.0;
    int below_median = 0;
    for (int i = 0; i < n; ++i) {
        const double g = draw_fading(rng);
        REQUIRE(g > 0.0);
        s += g;
        below_median += g < std::log(2.0) ? 1 : 0;
    }
    CHECK(std::abs(s / n - 1.0) < 0.01);
    CHECK(std::abs(below_median / double(n) - 0.5) < 0.005);
    Rng a(9), b(9);
    for (int i = 0; i < 10; ++i) CHECK(draw_fading(a) == draw_fading(b));
}

TEST_CASE("place_scenario is reproducible and stays inside the area") {
    ScenarioConfig c;
    Rng a(17), b(17);
    const NetworkState s1 = place_scenario(c, a);
    const NetworkState s2 = place_scenario(c, b);
    CHECK(s1.dl_fading == s2.dl_fading);
    CHECK(s1.ul_fading == s2.ul_fading);
    CHECK(s1.association == s2.association);
    REQUIRE(s1.n_users() == 25);
    REQUIRE(s1.n_sbs() == 4);
    for (const auto& p : s1.user_positions) CHECK(std::hypot(p.x, p.y) <= 100.0);
    for (const auto& p : s1.sbs_positions) CHECK(std::hypot(p.x, p.y) <= 100.0);
    for (std::size_t u = 0; u < s1.n_users(); ++u) {
        const int b = s1.association[u];
        if (b == kUnserved) continue;
        CHECK(distance(s1.user_positions[u], s1.sbs_positions[static_cast<std::size_t>(b)]) <= c.sbs_coverage_m);
    }
    for (const auto& served : s1.served) CHECK(served.size() <= 5);
}

TEST_CASE("place_scenario with no users") {
    ScenarioConfig c;
    c.n_users = 0;
    Rng rng(1);
    const NetworkState s = place_scenario(c, rng);
    CHECK(s.n_users() == 0);
    CHECK(s.association.empty());
    for (const auto& served : s.served) CHECK(served.empty());
}

TEST_CASE("invalid scenarios are rejected") {
    ScenarioConfig c;
    c.sbs_coverage_m = 200.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ScenarioConfig{};
    c.n_sbs = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ScenarioConfig{};
    c.gamma_d_s = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("association caps each SBS at min(S^d, S^u) users, nearest first") {
    ScenarioConfig c = test::small_config(1, 4, 2);
    NetworkState s = make_state(c, {{0.0, 0.0}}, {{5.0, 0.0}, {1.0, 0.0}, {30.0, 0.0}, {3.0, 0.0}});
    associate_nearest(s, c);
    CHECK(s.association == std::vector<int>{kUnserved, 0, kUnserved, 0});
    CHECK(s.served[0] == std::vector<std::size_t>{1, 3});
    CHECK(s.local_index[3] == 1);
}

namespace {

// One SBS per user, each user co-located with "its" SBS pattern controlled by fading.
NetworkState three_user_state() {
    ScenarioConfig c = test::small_config(2, 3, 2);
    NetworkState s = make_state(c, {{0.0, 0.0}, {50.0, 0.0}}, {{10.0, 0.0}, {20.0, 5.0}, {45.0, -3.0}});
    Rng rng(99);
    redraw_fading(s, rng);
    set_association(s, {0, 0, 1});
    return s;
}

}  // namespace

TEST_CASE("uplink SINR matches a direct evaluation of the formula") {
    NetworkState s = three_user_state();
    // SBS 0: user 0 on ul block 0, user 1 on block 1; SBS 1: user 2 on block 0.
    const std::vector<Action> joint{Action{{1, 1}, {0, 1}}, Action{{2}, {0, 0}}};
    const auto& r = s.radio;
    const double sig = r.p_user_w * s.ul_g(0, 0, 0) * std::pow(10.0, -3.0);
    const double intf = r.p_user_w * s.ul_g(2, 0, 0) * std::pow(std::hypot(45.0, -3.0), -3.0);
    CHECK(uplink_sinr(s, joint, 0, 0, 0) == doctest::Approx(sig / (r.noise_w + intf)).epsilon(1e-12));
    // block 1: user 1 at SBS 0 and user 2 (who owns both SBS-1 blocks)
    const double sig1 = r.p_user_w * s.ul_g(1, 0, 1) * std::pow(std::hypot(20.0, 5.0), -3.0);
    const double intf1 = r.p_user_w * s.ul_g(2, 0, 1) * std::pow(std::hypot(45.0, -3.0), -3.0);
    CHECK(uplink_sinr(s, joint, 1, 0, 1) == doctest::Approx(sig1 / (r.noise_w + intf1)).epsilon(1e-12));
}

TEST_CASE("uplink SINR limits") {
    ScenarioConfig c = test::small_config(1, 2, 1);
    NetworkState s = make_state(c, {{0.0, 0.0}}, {{10.0, 0.0}, {10.0, 0.0}});
    set_association(s, {0, kUnserved});
    const double path = std::pow(10.0, -3.0);
    s.ul_g(0, 0, 0) = s.radio.noise_w / (s.radio.p_user_w * path);
    const std::vector<Action> alone{Action{{1}, {0}}};
    CHECK(uplink_sinr(s, alone, 0, 0, 0) == doctest::Approx(1.0));

    // two co-block users with equal received power, negligible noise
    ScenarioConfig c2 = test::small_config(2, 2, 1);
    c2.noise_dbm = -250.0;
    NetworkState t = make_state(c2, {{0.0, 0.0}, {100.0, 0.0}}, {{10.0, 0.0}, {110.0, 0.0}});
    set_association(t, {0, 1});
    t.ul_g(0, 0, 0) = 1.0;
    t.ul_g(1, 0, 0) = std::pow(110.0 / 10.0, 3.0);  // same received power at SBS 0
    const std::vector<Action> both{Action{{1}, {0}}, Action{{1}, {0}}};
    CHECK(uplink_sinr(t, both, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("downlink SINR counts only other SBSs transmitting on the block") {
    NetworkState s = three_user_state();
    const auto& r = s.radio;
    const std::vector<Action> joint{Action{{1, 1}, {0, 1}}, Action{{2}, {0, 0}}};
    const double sig = r.p_sbs_w * s.dl_g(0, 0, 1) * std::pow(10.0, -3.0);
    const double intf = r.p_sbs_w * s.dl_g(0, 1, 1) * std::pow(40.0, -3.0);
    CHECK(downlink_sinr(s, joint, 0, 0, 1) == doctest::Approx(sig / (r.noise_w + intf)).epsilon(1e-12));

    // an idle neighbour does not interfere
    const std::vector<Action> quiet{Action{{1, 1}, {0, 1}}, Action{}};
    CHECK(downlink_sinr(s, quiet, 0, 0, 1) == doctest::Approx(sig / r.noise_w).epsilon(1e-12));

    ScenarioConfig c = test::small_config(1, 1, 1);
    NetworkState one = make_state(c, {{0.0, 0.0}}, {{10.0, 0.0}});
    set_association(one, {0});
    one.dl_g(0, 0, 0) = one.radio.noise_w / (one.radio.p_sbs_w * std::pow(10.0, -3.0));
    const std::vector<Action> j1{Action{{1}, {0}}};
    CHECK(downlink_sinr(one, j1, 0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("SINR is strictly decreasing in an interferer's gain") {
    NetworkState s = three_user_state();
    const std::vector<Action> joint{Action{{1, 1}, {0, 1}}, Action{{2}, {0, 0}}};
    double prev = uplink_sinr(s, joint, 0, 0, 0);
    for (int i = 0; i < 5; ++i) {
        s.ul_g(2, 0, 0) *= 2.0;
        const double now = uplink_sinr(s, joint, 0, 0, 0);
        CHECK(now < prev);
        CHECK(now >= 0.0);
        prev = now;
    }
}

TEST_CASE("link_rate sums Shannon rates of assigned blocks") {
    const std::vector<int> one{1};
    const std::vector<double> s1{1.0};
    CHECK(link_rate(one, s1, 1.0) == doctest::Approx(1.0));
    CHECK(link_rate(std::vector<int>{}, std::vector<double>{}, 1.0) == 0.0);
    const std::vector<int> two{1, 1};
    const std::vector<double> s2{3.0, 15.0};
    CHECK(link_rate(two, s2, 1.0) == doctest::Approx(6.0));
    const std::vector<int> partial{1, 0};
    CHECK(link_rate(partial, s2, 1.0) == doctest::Approx(2.0));
    CHECK(link_rate(two, s2, 1.0) >= link_rate(partial, s2, 1.0));
    CHECK_THROWS_AS(link_rate(one, s2, 1.0), std::invalid_argument);
}
