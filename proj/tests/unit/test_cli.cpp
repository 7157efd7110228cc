#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <cascadenet/error.hpp>
#include <cascadenet/io.hpp>

#include "app/cli.hpp"
#include "app/config.hpp"

using namespace cascadenet;
using namespace cascadenet::app;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "cascadenet_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path fixture() { return fs::path(CASCADENET_TEST_DATA) / "fixture_prices.csv"; }

// Three assets whose log returns are exact multiples of one another, so every
// pairwise correlation is 1 and both networks form a triangle.
fs::path triangle_csv(const fs::path& dir) {
    std::ostringstream csv;
    csv << "date,A,B,C\n";
    for (int t = 0; t < 60; ++t) {
        const double x = 0.01 * std::sin(0.7 * t);
        const auto d = std::chrono::sys_days{std::chrono::year{2023} / 1 / 2} + std::chrono::days{t};
        csv << Date{d}.iso() << ',' << format_full(100.0 * std::exp(x)) << ',' << format_full(100.0 * std::exp(2 * x))
            << ',' << format_full(100.0 * std::exp(3 * x)) << '\n';
    }
    write_text_file(dir / "triangle.csv", csv.str());
    return dir / "triangle.csv";
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_text_file(e.path());
    return files;
}

}  // namespace

TEST_CASE("--dump-config round-trips through --config") {
    const auto dir = scratch("dump");
    auto r = run({"--input", "prices.csv", "--theta", "0.25", "--theta", "0.75", "--seed", "9", "--runs", "33",
                  "--scenario", "single", "--target", "AAPL", "--ref-price", "last", "--start", "2020-01-01",
                  "--end", "2021-01-01", "--transpose-exposures", "--dump-config", (dir / "c.json").string(), "stats"});
    REQUIRE(r.code == 0);
    const RunConfig dumped = load_config(dir / "c.json");
    CHECK(dumped.theta_list == std::vector<double>{0.25, 0.75});
    CHECK(dumped.seed == 9);
    CHECK(dumped.n_runs == 33);
    CHECK(dumped.reference_price_mode == ReferencePriceMode::Last);
    CHECK(dumped.transpose_exposures);
    CHECK(config_from_json(to_json(dumped)) == dumped);

    r = run({"--config", (dir / "c.json").string(), "--dump-config", "-", "stats"});
    REQUIRE(r.code == 0);
    CHECK(config_from_json(r.out) == dumped);

    r = run({"--config", (dir / "c.json").string(), "--seed", "10", "--dump-config", "-", "stats"});
    CHECK(config_from_json(r.out).seed == 10);
}

TEST_CASE("config documents reject unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json(R"({"thetas": [0.3]})"), UsageError);
    CHECK_THROWS_AS(config_from_json(R"({"theta": "x"})"), UsageError);
    CHECK_THROWS_AS(config_from_json("not json"), UsageError);
    RunConfig c = config_from_json(R"({"theta": [0.4], "ref_price": "first"})");
    CHECK(c.theta_list == std::vector<double>{0.4});
    CHECK(c.reference_price_mode == ReferencePriceMode::First);
    CHECK(c.seed == 42);
}

TEST_CASE("CASCADENET_SEED is the seed fallback") {
    ::setenv("CASCADENET_SEED", "1234", 1);
    auto r = run({"--dump-config", "-", "stats"});
    CHECK(config_from_json(r.out).seed == 1234);
    r = run({"--seed", "5", "--dump-config", "-", "stats"});
    CHECK(config_from_json(r.out).seed == 5);
    ::setenv("CASCADENET_SEED", "abc", 1);
    CHECK(run({"--dump-config", "-", "stats"}).code == kExitUsage);
    ::unsetenv("CASCADENET_SEED");
    r = run({"--dump-config", "-", "stats"});
    CHECK(config_from_json(r.out).seed == 42);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    write_text_file(dir / "empty.csv", "");
    const auto empty = run({"--input", (dir / "empty.csv").string(), "--output-dir", dir.string(), "stats"});
    CHECK(empty.code == kExitData);
    CHECK(empty.err.find("empty") != std::string::npos);

    CHECK(run({"--bogus", "stats"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"--theta", "-1", "--input", fixture().string(), "stats"}).code == kExitUsage);
    CHECK(run({"--scenario", "sometimes", "stats"}).code == kExitUsage);
    CHECK(run({"stats"}).code == kExitUsage);
    CHECK(run({"--input", (dir / "missing.csv").string(), "stats"}).code == kExitIo);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("stats writes one row per asset") {
    const auto dir = scratch("stats");
    const auto r = run({"--input", fixture().string(), "--output-dir", dir.string(), "stats"});
    REQUIRE(r.code == 0);
    const std::string csv = read_text_file(dir / "descriptive_stats.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(fs::exists(dir / "normalized_prices.csv"));
}

TEST_CASE("network on an unreachable threshold gives edgeless graphs") {
    const auto dir = scratch("edgeless");
    const auto r = run({"--input", fixture().string(), "--output-dir", dir.string(), "--theta", "1e9", "network"});
    REQUIRE(r.code == 0);
    CHECK(read_text_file(dir / "network/exposure_edges_theta1e+09.csv") == "src,dst,weight\n");
    CHECK(read_text_file(dir / "network/correlation_edges_theta1e+09.csv") == "src,dst,weight\n");
    std::istringstream nodes(read_text_file(dir / "network/exposure_nodes_theta1e+09.csv"));
    std::string line;
    std::getline(nodes, line);
    int rows = 0;
    while (std::getline(nodes, line)) {
        ++rows;
        CHECK(line.find(",0,0,") != std::string::npos);
    }
    CHECK(rows == 6);
}

TEST_CASE("network on a triangle fixture") {
    const auto dir = scratch("triangle");
    const auto csv = triangle_csv(dir);
    const auto r = run({"--input", csv.string(), "--output-dir", (dir / "out").string(), "--theta", "0.3", "network"});
    REQUIRE(r.code == 0);
    CHECK(read_text_file(dir / "out/network/correlation_nodes_theta0.3.csv") ==
          "asset,clustering,degree,market_group\nA,1,2,US\nB,1,2,US\nC,1,2,US\n");
    CHECK(read_text_file(dir / "out/network/correlation_edges_theta0.3.csv") ==
          "src,dst,weight\nA,B,1\nA,C,1\nB,C,1\n");
    const std::string risk = read_text_file(dir / "out/risk_report.csv");
    CHECK(risk.rfind("asset,var95,cvar95,clustering_theta03\n", 0) == 0);
}

TEST_CASE("cascade scenarios on an edgeless network") {
    const auto dir = scratch("cascade");
    const auto r = run({"--input", fixture().string(), "--output-dir", dir.string(), "--theta", "1e9", "--runs",
                        "200", "--scenario", "simultaneous", "--target", "PETR4.SA", "--target", "AAPL", "cascade"});
    REQUIRE(r.code == 0);
    CHECK(read_text_file(dir / "monte_carlo.csv") ==
          "scenario,theta,failure_probability,avg_failed_assets\nSimultaneous Shock (PETR4.SA + AAPL),1e+09,0,2\n");
    const auto j = nlohmann::json::parse(read_text_file(dir / "monte_carlo.json"));
    REQUIRE(j.size() == 1);
    CHECK(j[0]["avg_failed_assets"].get<double>() == 2.0);
    CHECK(j[0]["seed"].get<std::uint64_t>() == 42);

    const auto single = run({"--input", fixture().string(), "--output-dir", dir.string(), "--theta", "0.3",
                             "--runs", "50", "--scenario", "single", "--target", "VALE3.SA", "cascade"});
    REQUIRE(single.code == 0);
    const std::string table = read_text_file(dir / "monte_carlo.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);

    CHECK(run({"--input", fixture().string(), "--output-dir", dir.string(), "--scenario", "single", "--target",
               "NOPE", "cascade"})
              .code == kExitUsage);
    CHECK(run({"--input", fixture().string(), "--output-dir", dir.string(), "--scenario", "simultaneous",
               "--target", "AAPL", "cascade"})
              .code == kExitUsage);
}

TEST_CASE("report reruns are byte-identical") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    const std::vector<std::string> common{"--input", fixture().string(), "--runs", "100", "report"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.begin(), {"--output-dir", a.string()});
    args_b.insert(args_b.begin(), {"--output-dir", b.string()});
    REQUIRE(run(args_a).code == 0);
    REQUIRE(run(args_b).code == 0);
    const auto ta = read_tree(a), tb = read_tree(b);
    CHECK(ta.size() > 20);
    CHECK(ta == tb);
    CHECK(ta.count("tail_report.csv") == 1);
    CHECK(ta.count("monte_carlo.json") == 1);
}
