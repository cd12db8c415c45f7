#include <benchmark/benchmark.h>

#include <vrnet/harness.hpp>

using namespace vrnet;

static void BM_EnumerateActions(benchmark::State& state) {
    const auto v = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_actions(v, 5, 5));
}
BENCHMARK(BM_EnumerateActions)->DenseRange(1, 4);

static void BM_EsnSlot(benchmark::State& state) {
    Rng rng(1);
    EsnState e = init_esn(static_cast<std::size_t>(state.range(0)), 4, 30, rng);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.5);
    for (auto _ : state) {
        update_reservoir(e, x);
        train_step(e, 3, 0.7, 0.01);
        benchmark::DoNotOptimize(predict(e));
    }
}
BENCHMARK(BM_EsnSlot)->Arg(100)->Arg(1000);

static void BM_GameTable(benchmark::State& state) {
    ScenarioConfig c;
    c.n_sbs = 2;
    c.n_users = 6;
    c.n_dl_blocks = 3;
    c.n_ul_blocks = 3;
    c.area_radius_m = 40.0;
    Rng rng(2);
    NetworkState s = place_scenario(c, rng);
    const QosParams p = QosParams::from(c);
    associate_by_utility(s, c, p);
    std::vector<std::vector<Action>> sets;
    for (const auto& served : s.served) sets.push_back(action_set(served.size(), 3, 3));
    TrajectoryGenerator traj(c.n_users, 3);
    const auto truths = traj.next();
    for (auto _ : state) benchmark::DoNotOptimize(build_game_table(p, s, sets, truths, 4));
}
BENCHMARK(BM_GameTable);

static void BM_Episode(benchmark::State& state) {
    ScenarioConfig c;
    c.n_sbs = 4;
    c.n_users = 12;
    c.n_dl_blocks = 3;
    c.n_ul_blocks = 3;
    EpisodeOptions o;
    o.learner.n_w = 100;
    for (auto _ : state) benchmark::DoNotOptimize(run_episode(c, Policy::Esn, 200, 5, o));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
