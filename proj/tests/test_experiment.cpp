#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqs/experiment.hpp"

using namespace aqs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("aqs_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_config(const std::string& task, const fs::path& out) {
    json j;
    j["graph"] = {{"generator", "pendant_chain"}, {"pendants", 2}};
    j["operator"] = {{"kind", "adjacency"}};
    j["task"] = task;
    j["levels"] = {4, 8};
    j["out"] = out.string();
    return j;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AQSPEC_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing and validation") {
    REQUIRE_THROWS_AS(parse_config(json::array()), ConfigError);
    REQUIRE_THROWS_AS(parse_config(json::object()), ConfigError);  // no graph

    json bad_task = base_config("warp", "out");
    REQUIRE_THROWS_AS(parse_config(bad_task), ConfigError);

    json bad_levels = base_config("census", "out");
    bad_levels["levels"] = {8, 4};
    REQUIRE_THROWS_AS(parse_config(bad_levels), ConfigError);

    const ExperimentConfig cfg = parse_config(base_config("census", "out"));
    REQUIRE(cfg.task == "census");
    REQUIRE(cfg.levels == std::vector<int>{4, 8});
    REQUIRE(cfg.config_hash.size() == 16);
}

TEST_CASE("census task writes the pendant frequencies") {
    const fs::path dir = fresh_dir("census");
    json j = base_config("census", dir);
    j["params"] = {{"radius", 1}};
    const RunOutcome outcome = run_experiment(parse_config(j));
    REQUIRE(outcome.exit_code == 0);

    const std::string csv = slurp(dir / "census.csv");
    REQUIRE(csv.find(",17,1/3\n") != std::string::npos);
    REQUIRE(csv.find(",34,2/3\n") != std::string::npos);

    const json summary = json::parse(slurp(dir / "census_summary.json"));
    REQUIRE(summary["library"] == "aqs");
    REQUIRE(summary["version"] == kLibraryVersion);
    REQUIRE(summary["config_hash"].get<std::string>().size() == 16);
    REQUIRE(summary["classes"].size() == 2);
}

TEST_CASE("reports are byte-identical across runs of one config") {
    const fs::path dir = fresh_dir("det");
    json j = base_config("moments", dir);
    j["params"] = {{"k", 4}};
    const ExperimentConfig cfg = parse_config(j);
    run_experiment(cfg);
    const std::string csv1 = slurp(dir / "moments.csv");
    const std::string summary1 = slurp(dir / "moments_summary.json");
    run_experiment(cfg);
    REQUIRE(slurp(dir / "moments.csv") == csv1);
    REQUIRE(slurp(dir / "moments_summary.json") == summary1);

    // A different out directory changes only the hash-bearing header.
    const fs::path other = fresh_dir("det_other");
    json j2 = j;
    j2["out"] = other.string();
    run_experiment(parse_config(j2));
    REQUIRE(slurp(other / "moments.csv") == csv1);
}

TEST_CASE("ids and converge tasks emit staircases") {
    const fs::path dir = fresh_dir("ids");
    json j;
    j["graph"] = {{"generator", "lattice"}, {"dim", 1}};
    j["operator"] = {{"kind", "sum"},
                     {"terms", {json{{"kind", "degree"}},
                                json{{"kind", "scale"}, {"c", "-1"},
                                     {"child", json{{"kind", "adjacency"}}}}}}};
    j["task"] = "converge";
    j["levels"] = {20, 40, 80};
    j["out"] = dir.string();
    const RunOutcome outcome = run_experiment(parse_config(j));
    REQUIRE(outcome.exit_code == 0);
    for (int n : {20, 40, 80})
        REQUIRE(fs::exists(dir / ("staircase_" + std::to_string(n) + ".csv")));
    const json summary = json::parse(slurp(dir / "converge_summary.json"));
    REQUIRE(summary["certificate"].get<double>() <= 0.2);
}

TEST_CASE("logdet task on the identity") {
    const fs::path dir = fresh_dir("logdet");
    json j = base_config("logdet", dir);
    j["operator"] = {{"kind", "identity"}};
    const RunOutcome outcome = run_experiment(parse_config(j));
    REQUIRE(outcome.exit_code == 0);
    const json summary = json::parse(slurp(dir / "logdet_summary.json"));
    for (const auto& lv : summary["levels"]) REQUIRE(lv["det1"] == "1");
}

TEST_CASE("eigenspace task respects lambda") {
    const fs::path dir = fresh_dir("eig");
    json j = base_config("eigenspace", dir);
    j["operator"] = {{"kind", "identity"}};
    j["params"] = {{"lambda", "1"}};
    const RunOutcome outcome = run_experiment(parse_config(j));
    REQUIRE(outcome.exit_code == 0);
    const json summary = json::parse(slurp(dir / "eigenspace_summary.json"));
    REQUIRE(summary["levels"][0]["dim_shifted"] == summary["levels"][0]["window"]);
}

TEST_CASE("edge and section exports") {
    const fs::path dir = fresh_dir("export");
    json j = base_config("census", dir);
    j["levels"] = {2};
    j["export"] = {{"edges", true}, {"sections", true}};
    run_experiment(parse_config(j));
    const std::string edges = slurp(dir / "window_2.edges");
    REQUIRE(edges.find("-1 0\n") != std::string::npos);
    REQUIRE(edges.find("0 0:1\n") != std::string::npos);
    REQUIRE(fs::exists(dir / "section_2.txt"));
}

TEST_CASE("malformed configs carry parse locations") {
    const fs::path dir = fresh_dir("bad");
    const fs::path cfg = dir / "broken.json";
    std::ofstream(cfg) << "{ \"graph\": { ";
    try {
        load_config_file(cfg.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("parse error") != std::string::npos);
    }
}

TEST_CASE("cli exit codes") {
    const fs::path dir = fresh_dir("cli");
    const fs::path cfg = dir / "census.json";
    json j = base_config("census", dir / "out");
    j["params"] = {{"radius", 1}};
    std::ofstream(cfg) << j.dump(2);

    REQUIRE(run_cli("run --config " + cfg.string()) == 0);
    REQUIRE(run_cli("census --config " + cfg.string()) == 0);

    const fs::path broken = dir / "broken.json";
    std::ofstream(broken) << "{ nope";
    REQUIRE(run_cli("run --config " + broken.string()) == 2);
    REQUIRE(run_cli("run --config " + (dir / "missing.json").string()) == 2);
    REQUIRE(run_cli("bogus-subcommand") == 2);
    REQUIRE(run_cli("run") == 2);  // --config required

    // Task subcommand overrides the config's task; levels override applies.
    REQUIRE(run_cli("frequencies --config " + cfg.string() + " --levels 3,6") == 0);
    REQUIRE(fs::exists(dir / "out" / "frequencies.csv"));

    // Seed override reaches the graph descriptor.
    const fs::path dcfg = dir / "decorated.json";
    json dj = base_config("census", dir / "out2");
    dj["graph"] = {{"generator", "decorated_lattice"}, {"p", "1/2"}, {"seed", 1}};
    dj["levels"] = {3};
    std::ofstream(dcfg) << dj.dump(2);
    REQUIRE(run_cli("census --config " + dcfg.string() + " --seed 99") == 0);
    const json summary = json::parse(slurp(dir / "out2" / "census_summary.json"));
    REQUIRE(summary["graph"]["seed"] == 99);
}

TEST_CASE("resource guards surface as check failures") {
    const fs::path dir = fresh_dir("guard");
    const fs::path cfg = dir / "guard.json";
    json j = base_config("ground-state", dir / "out");
    j["exact_limit"] = 3;  // every window exceeds this
    std::ofstream(cfg) << j.dump(2);
    REQUIRE(run_cli("run --config " + cfg.string()) == 1);

    // The same guard via the command-line override.
    const fs::path cfg2 = dir / "guard2.json";
    json j2 = base_config("ground-state", dir / "out");
    std::ofstream(cfg2) << j2.dump(2);
    REQUIRE(run_cli("run --config " + cfg2.string() + " --exact-limit 3") == 1);
    REQUIRE(run_cli("run --config " + cfg2.string() + " --exact-limit 100") == 0);
}

TEST_CASE("ids task writes plot-ready staircase data") {
    const fs::path dir = fresh_dir("plot");
    json j;
    j["graph"] = {{"generator", "lattice"}, {"dim", 1}};
    j["operator"] = {{"kind", "identity"}};
    j["task"] = "ids";
    j["levels"] = {3, 6};
    j["out"] = dir.string();
    REQUIRE(run_experiment(parse_config(j)).exit_code == 0);
    const std::string dat = slurp(dir / "staircase_6.dat");
    REQUIRE(dat.find("1 0\n1 1\n") != std::string::npos);
}
