// aqspec — experiment runner: builds graphs and pattern-invariant operators
// from a JSON config and runs the selected spectral task, or runs the bundled
// verification suite. Exit codes: 0 pass, 1 check failure, 2 usage/config.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aqs/experiment.hpp"
#include "aqs/verify.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string levels;
    std::int64_t seed = -1;
    std::int64_t exact_limit = -1;
    int threads = 0;
};

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

int run_task(const CliOverrides& cli, const std::string& task_override) {
    aqs::ExperimentConfig cfg = aqs::load_config_file(cli.config_path);
    if (!task_override.empty()) cfg.task = task_override;
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (!cli.levels.empty()) cfg.levels = parse_levels(cli.levels);
    if (cli.seed >= 0) cfg.seed_override = static_cast<std::uint64_t>(cli.seed);
    if (cli.exact_limit >= 0) cfg.exact_limit = static_cast<std::size_t>(cli.exact_limit);
    if (cli.threads > 0) cfg.threads = cli.threads;
    const aqs::RunOutcome outcome = aqs::run_experiment(cfg);
    for (const auto& v : outcome.verdicts)
        std::cout << aqs::detail::verdict_line(v) << '\n';
    for (const auto& f : outcome.files) std::cout << "wrote " << f << '\n';
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aqspec — spectral invariants of pattern-invariant operators on aperiodic graphs"};
    app.require_subcommand(1);

    CliOverrides cli;
    bool inject_corruption = false;
    int verify_threads = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", cli.config_path, "experiment config (JSON)");
        if (config_required) opt->required();
        sub->add_option("--out", cli.out_dir, "output directory override");
        sub->add_option("--levels", cli.levels, "comma-separated Følner levels override");
        sub->add_option("--seed", cli.seed, "graph seed override");
        sub->add_option("--exact-limit", cli.exact_limit, "dense exact-path size guard");
        sub->add_option("--threads", cli.threads, "worker threads (0 = hardware)");
    };

    std::vector<std::pair<CLI::App*, std::string>> task_subs;
    add_common(app.add_subcommand("run", "run the task named in the config"), true);
    task_subs.emplace_back(app.get_subcommand("run"), std::string());
    for (const auto& task : aqs::known_tasks()) {
        CLI::App* sub = app.add_subcommand(task, "run the '" + task + "' task");
        add_common(sub, true);
        task_subs.emplace_back(sub, task);
    }
    CLI::App* verify = app.add_subcommand("verify", "run the bundled acceptance configs");
    int level_scale = 1;
    verify->add_option("--threads", verify_threads, "worker threads (0 = hardware)");
    verify->add_option("--level-scale", level_scale,
                       "stress factor: multiply the level-aware criteria's Følner levels");
    verify->add_flag("--inject-corruption", inject_corruption,
                     "negative control: plant an invariance violation and expect FAIL");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) {
            aqs::VerifyOptions vopt;
            vopt.threads = verify_threads;
            vopt.inject_corruption = inject_corruption;
            vopt.level_scale = level_scale;
            const auto results = aqs::verify_all(vopt);
            bool all = true;
            for (const auto& r : results) {
                std::cout << aqs::format_criterion(r) << '\n';
                all = all && r.pass;
            }
            std::cout << (all ? "verify: ALL PASS" : "verify: FAILURES PRESENT") << '\n';
            return all ? 0 : 1;
        }
        for (const auto& [sub, task] : task_subs)
            if (sub->parsed()) return run_task(cli, task);
        return 2;
    } catch (const aqs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
