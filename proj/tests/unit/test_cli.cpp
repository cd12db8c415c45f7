#include <doctest.h>

#include "test_support.hpp"

#include <cli.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "vrnet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = vrnet::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

using vrnet::test::fixture_path;

TEST_CASE("count-actions") {
    CHECK(call({"count-actions", "--users", "1", "--dl", "2", "--ul", "2"}).out == "1\n");
    const Result r = call({"count-actions", "--users", "2", "--dl", "3", "--ul", "2", "--enumerate"});
    CHECK(r.code == 0);
    CHECK(r.out == "4 4 MATCH\n");
    CHECK(call({"count-actions", "--users", "3", "--dl", "2", "--ul", "5"}).code == 1);
    CHECK(call({"count-actions", "--users", "x", "--dl", "2", "--ul", "5"}).code == 2);
}

TEST_CASE("demand-rate") {
    const Result r = call({"demand-rate"});
    CHECK(r.code == 0);
    CHECK(r.out == "25.3125 Mbit/s (26542080 bit/s)\n");
}

TEST_CASE("verify-ne") {
    const Result ok = call({"verify-ne", fixture_path("coordination_table.json"), fixture_path("coordination_ne_profile.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("\nNE\n") != std::string::npos);
    const Result bad = call({"verify-ne", fixture_path("coordination_table.json"),
                             fixture_path("coordination_miscoordinated_profile.json")});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("NOT NE") != std::string::npos);
    CHECK(call({"verify-ne", fixture_path("coordination_table.json"), fixture_path("nope.json")}).code == 2);
}

TEST_CASE("usage errors") {
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"run", fixture_path("missing.json")}).code == 2);
    CHECK(call({"run", fixture_path("bad_key_config.json")}).code == 2);
    CHECK(call({"run", fixture_path("tiny_config.json"), "--policy", "greedy"}).code == 2);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("run writes a trace and summary") {
    const auto dir = std::filesystem::temp_directory_path() / "vrnet_cli_test";
    std::filesystem::create_directories(dir);
    const auto trace = dir / "trace.csv";
    const auto summary = dir / "summary.json";
    const Result r = call({"run", fixture_path("tiny_config.json"), "--slots", "30", "--out", trace.string(),
                           "--summary", summary.string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("policy=esn seed=7 slots=30", 0) == 0);
    const std::string csv = slurp(trace);
    CHECK(csv.rfind("slot,sbs0,sbs1,total\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);
    CHECK(slurp(summary).find("\"policy\": \"esn\"") != std::string::npos);

    const Result again = call({"run", fixture_path("tiny_config.json"), "--slots", "30", "--out", (dir / "t2.csv").string()});
    CHECK(slurp(dir / "t2.csv") == csv);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep") {
    const Result r = call({"sweep", fixture_path("tiny_config.json"), "--axis", "n_users", "--values", "2,4", "--runs",
                           "2", "--policies", "esn,propfair", "--slots", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("axis_value,policy,run,seed", 0) == 0);
    CHECK(call({"sweep", fixture_path("tiny_config.json"), "--values", "2", "--policies", "magic"}).code == 2);
    CHECK(call({"sweep", fixture_path("tiny_config.json")}).code == 2);
}

TEST_CASE("check-esn") {
    CHECK(call({"check-esn", "--actions", "6,6", "--n-w", "50", "--radix"}).code == 0);
    const Result r = call({"check-esn", "--actions", "6,6", "--n-w", "50"});
    CHECK(r.code == 1);
    CHECK(r.out.find("fails") != std::string::npos);
}
