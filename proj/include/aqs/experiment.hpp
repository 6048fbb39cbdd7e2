// experiment.hpp — experiment configuration, orchestration and file outputs
// behind the command-line runner.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqs/graph.hpp"
#include "aqs/operators.hpp"
#include "aqs/pattern.hpp"
#include "aqs/spectra.hpp"

namespace aqs {

inline constexpr const char* kLibraryVersion = "0.1.0";

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

struct ExperimentConfig {
    json graph_json;
    json operator_json;
    std::string task;
    std::vector<int> levels;
    int k = 2;              // moments
    Rational lambda = 0;    // eigenspace
    int radius = 1;         // census / frequencies
    int grid = 32;
    std::vector<Rational> atom_candidates;
    std::size_t exact_limit = 500;
    int threads = 0;
    std::optional<std::uint64_t> seed_override;
    std::string out_dir = "out";
    bool export_edges = false;
    bool export_sections = false;
    std::string config_hash;

    RunLimits run_limits() const {
        RunLimits lim;
        lim.exact_limit = exact_limit;
        lim.threads = threads;
        return lim;
    }
};

inline const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks = {
        "census",     "frequencies", "moments", "ids",
        "ground-state", "eigenspace", "logdet",  "converge"};
    return tasks;
}

inline ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig cfg;
    if (!j.contains("graph")) throw ConfigError("config: missing 'graph'");
    cfg.graph_json = j["graph"];
    cfg.operator_json = j.value("operator", json{{"kind", "adjacency"}});
    cfg.task = j.value("task", std::string());
    if (!cfg.task.empty()) {
        bool ok = false;
        for (const auto& t : known_tasks()) ok = ok || t == cfg.task;
        if (!ok) throw ConfigError("config: unknown task '" + cfg.task + "'");
    }
    if (j.contains("levels")) {
        for (const auto& v : j["levels"]) cfg.levels.push_back(v.get<int>());
        for (std::size_t i = 1; i < cfg.levels.size(); ++i)
            if (cfg.levels[i] <= cfg.levels[i - 1])
                throw ConfigError("config: levels must be strictly increasing");
    }
    const json params = j.value("params", json::object());
    cfg.k = params.value("k", 2);
    cfg.radius = params.value("radius", 1);
    cfg.grid = params.value("grid", 32);
    if (params.contains("lambda")) cfg.lambda = parse_rational(params["lambda"].get<std::string>());
    if (params.contains("atoms"))
        for (const auto& s : params["atoms"]) cfg.atom_candidates.push_back(parse_rational(s.get<std::string>()));
    cfg.exact_limit = j.value("exact_limit", std::size_t{500});
    cfg.threads = j.value("threads", 0);
    if (j.contains("seed")) cfg.seed_override = j["seed"].get<std::uint64_t>();
    cfg.out_dir = j.value("out", std::string("out"));
    const json exp = j.value("export", json::object());
    cfg.export_edges = exp.value("edges", false);
    cfg.export_sections = exp.value("sections", false);
    cfg.config_hash = hex64(fnv1a64(j.dump()));
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

inline InfiniteGraph config_graph(const ExperimentConfig& cfg) {
    json gj = cfg.graph_json;
    if (cfg.seed_override) gj["seed"] = *cfg.seed_override;
    return InfiniteGraph::from_json(gj);
}

struct Verdict {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<Verdict> verdicts;
    std::vector<std::string> files;
};

namespace detail {

inline json report_header(const ExperimentConfig& cfg, const InfiniteGraph& g,
                          const PatternOperator* op) {
    json j;
    j["library"] = "aqs";
    j["version"] = kLibraryVersion;
    j["config_hash"] = cfg.config_hash;
    j["task"] = cfg.task;
    j["graph"] = g.to_json();
    if (op) j["operator"] = operator_to_json(*op);
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text,
                       RunOutcome& outcome) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    outcome.files.push_back(path.string());
}

inline void append_verdicts(json& summary, const std::vector<Verdict>& verdicts) {
    json arr = json::array();
    for (const auto& v : verdicts)
        arr.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    summary["verdicts"] = std::move(arr);
}

inline std::string verdict_line(const Verdict& v) {
    return v.name + ": " + (v.pass ? "PASS" : "FAIL") + (v.detail.empty() ? "" : " (" + v.detail + ")");
}

}  // namespace detail

// Runs one configured task; writes a JSON summary plus CSV/text data files
// under cfg.out_dir and returns the verdicts. Reports are deterministic
// functions of the config.
inline RunOutcome run_experiment(const ExperimentConfig& cfg) {
    if (cfg.task.empty()) throw ConfigError("config: no task selected");
    if (cfg.levels.empty()) throw ConfigError("config: no levels given");
    RunOutcome outcome;
    const InfiniteGraph g = config_graph(cfg);
    const PatternOperator op = operator_from_json(g, cfg.operator_json);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    FolnerSchedule schedule{cfg.levels};
    const RunLimits lim = cfg.run_limits();

    json summary = detail::report_header(cfg, g, &op);

    if (cfg.export_edges) {
        for (int n : cfg.levels) {
            std::ostringstream os;
            write_edge_list(g, folner_window(g, n), os);
            detail::write_text(dir / ("window_" + std::to_string(n) + ".edges"), os.str(), outcome);
        }
    }
    if (cfg.export_sections) {
        SectionLimits sl;
        sl.dense_limit = cfg.exact_limit;
        sl.threads = cfg.threads;
        for (int n : cfg.levels) {
            std::ostringstream os;
            write_section(finite_section(op, folner_window(g, n), sl), os);
            detail::write_text(dir / ("section_" + std::to_string(n) + ".txt"), os.str(), outcome);
        }
    }

    if (cfg.task == "census") {
        const Window q = folner_window(g, cfg.levels.back());
        const PatternCensus census = pattern_census(g, q, cfg.radius, {}, {}, cfg.threads);
        FrequencyTable table;
        table.radius = cfg.radius;
        table.levels.push_back({cfg.levels.back(), q.size(), census});
        std::ostringstream os;
        write_frequency_csv(table, os);
        detail::write_text(dir / "census.csv", os.str(), outcome);
        json classes = json::array();
        for (const auto& [code, e] : census.classes)
            classes.push_back({{"code", code.hex()},
                               {"count", e.count},
                               {"frequency", to_string(make_rational(
                                                 static_cast<long>(e.count),
                                                 static_cast<long>(q.size())))}});
        summary["classes"] = std::move(classes);
        std::size_t total = 0;
        for (const auto& [code, e] : census.classes) total += e.count;
        outcome.verdicts.push_back({"census counts partition the window", total == q.size(),
                                    std::to_string(census.classes.size()) + " classes over " +
                                        std::to_string(q.size()) + " vertices"});
    } else if (cfg.task == "frequencies") {
        const FrequencyTable table =
            frequency_table(g, cfg.levels, cfg.radius, {}, {}, cfg.threads);
        std::ostringstream os;
        write_frequency_csv(table, os);
        detail::write_text(dir / "frequencies.csv", os.str(), outcome);
        summary["convergence_indicator"] = to_string(table.convergence_indicator);
        outcome.verdicts.push_back(
            {"frequency convergence indicator computed", true,
             "max top-vs-previous drift " + to_string(table.convergence_indicator)});
    } else if (cfg.task == "moments") {
        const MomentReport report = moment_run(op, schedule, cfg.k, lim);
        json levels = json::array();
        bool bounds_ok = true;
        std::ostringstream os;
        os << "k,level,window,section_moment,true_moment,bound\n";
        for (const auto& lv : report.levels) {
            const bool ok = abs(lv.section_moment - lv.true_moment) <= lv.boundary_bound;
            bounds_ok = bounds_ok && ok;
            levels.push_back({{"level", lv.level},
                              {"window", lv.window_size},
                              {"section_moment", to_string(lv.section_moment)},
                              {"true_moment", to_string(lv.true_moment)},
                              {"bound", to_string(lv.boundary_bound)},
                              {"bound_holds", ok}});
            os << report.k << ',' << lv.level << ',' << lv.window_size << ','
               << to_string(lv.section_moment) << ',' << to_string(lv.true_moment) << ','
               << to_string(lv.boundary_bound) << '\n';
        }
        summary["levels"] = std::move(levels);
        summary["extrapolated"] = to_string(report.extrapolated);
        detail::write_text(dir / "moments.csv", os.str(), outcome);
        outcome.verdicts.push_back({"moment boundary bound holds at every level", bounds_ok,
                                    "k=" + std::to_string(report.k) + ", limit " +
                                        to_string(report.extrapolated)});
    } else if (cfg.task == "ids" || cfg.task == "converge") {
        IDSOptions opt;
        opt.atom_candidates = cfg.atom_candidates;
        opt.shubin_grid = cfg.grid;
        const IDSReport report = ids_run(op, schedule, opt, lim);
        for (const auto& lv : report.levels) {
            std::ostringstream os;
            write_staircase_csv(lv.staircase, os);
            detail::write_text(dir / ("staircase_" + std::to_string(lv.level) + ".csv"), os.str(),
                               outcome);
            std::ostringstream plot;
            write_staircase_plot(lv.staircase, plot);
            detail::write_text(dir / ("staircase_" + std::to_string(lv.level) + ".dat"),
                               plot.str(), outcome);
        }
        json levels = json::array();
        for (const auto& lv : report.levels)
            levels.push_back({{"level", lv.level}, {"window", lv.window_size}});
        summary["levels"] = std::move(levels);
        summary["norm_bound"] = report.norm_bound;
        summary["cauchy_sup"] = report.cauchy_sup;
        summary["shubin_max_delta"] = report.shubin_max_delta;
        summary["min_eigenvalue"] = report.min_eigenvalue;
        summary["partial_exact"] = report.partial_exact;
        json atoms = json::array();
        for (const auto& atom : report.atoms) {
            json densities = json::array();
            for (const auto& [level, density] : atom.exact_density)
                densities.push_back({{"level", level}, {"density", to_string(density)}});
            atoms.push_back({{"lambda", to_string(atom.lambda)},
                             {"float_mass", atom.float_mass_top},
                             {"exact_density", std::move(densities)}});
        }
        summary["atoms"] = std::move(atoms);
        if (cfg.task == "converge") {
            std::vector<SpectralStaircase> stairs;
            for (const auto& lv : report.levels) stairs.push_back(lv.staircase);
            const ConvergenceReport conv = uniform_convergence_diag(stairs);
            summary["sup_distances"] = conv.sup_distances;
            summary["certificate"] = conv.certificate;
            summary["flags"] = conv.flags;
            outcome.verdicts.push_back({"pointwise Cauchy hypothesis", conv.pointwise_ok, ""});
            outcome.verdicts.push_back({"jump convergence hypothesis", conv.jumps_ok, ""});
            outcome.verdicts.push_back({"sup distances decreasing", conv.sup_decreasing,
                                        "certificate " + std::to_string(conv.certificate)});
        } else {
            bool cauchy_decreasing = true;
            for (std::size_t i = 1; i < report.cauchy_sup.size(); ++i)
                cauchy_decreasing = cauchy_decreasing &&
                                    report.cauchy_sup[i] <= report.cauchy_sup[i - 1] + 1e-12;
            outcome.verdicts.push_back({"staircase Cauchy distances decreasing",
                                        report.cauchy_sup.size() < 2 || cauchy_decreasing, ""});
            outcome.verdicts.push_back({"sections within certified norm bound",
                                        report.levels.back().staircase.eigs.back() <=
                                            report.norm_bound + 1e-9,
                                        ""});
        }
    } else if (cfg.task == "ground-state") {
        const GroundStateReport report = ground_state_run(op, schedule, lim);
        json levels = json::array();
        for (const auto& lv : report.levels)
            levels.push_back({{"level", lv.level},
                              {"window", lv.window_size},
                              {"kernel_dim", lv.kernel_dimension},
                              {"density", to_string(lv.density)}});
        summary["levels"] = std::move(levels);
        json deltas = json::array();
        for (const auto& d : report.deltas) deltas.push_back(to_string(d));
        summary["deltas"] = std::move(deltas);
        outcome.verdicts.push_back(
            {"ground-state density computed exactly", true,
             "top density " + to_string(report.levels.back().density) +
                 (report.deltas.empty() ? "" : ", final delta " + to_string(report.deltas.back()))});
    } else if (cfg.task == "eigenspace") {
        const EigenspaceReport report = eigenspace_run(op, cfg.lambda, schedule, lim);
        json levels = json::array();
        for (const auto& lv : report.levels)
            levels.push_back({{"level", lv.level},
                              {"window", lv.window_size},
                              {"dim_shifted", lv.dim_shifted},
                              {"dim_squared", lv.dim_squared},
                              {"density_shifted", to_string(lv.density_shifted)},
                              {"density_squared", to_string(lv.density_squared)},
                              {"boundary_2r", lv.boundary_2r},
                              {"bound_ok", lv.bound_ok}});
        summary["levels"] = std::move(levels);
        outcome.verdicts.push_back({"kernel comparison within boundary bound",
                                    report.all_bounds_ok, "lambda " + to_string(report.lambda)});
    } else if (cfg.task == "logdet") {
        const LogdetReport report = logdet_run(op, schedule, lim);
        json levels = json::array();
        bool nonneg = true;
        std::size_t nonneg_count = 0;
        for (const auto& lv : report.levels) {
            nonneg = nonneg && lv.nonneg_exact;
            nonneg_count += lv.nonneg_exact ? 1 : 0;
            levels.push_back({{"level", lv.level},
                              {"window", lv.window_size},
                              {"scale", to_string(lv.scale)},
                              {"det1", to_string(lv.det1_value)},
                              {"rank", lv.rank},
                              {"zero_matrix", lv.zero_matrix},
                              {"logdet_scaled", lv.logdet_scaled},
                              {"logdet_unscaled", lv.logdet_unscaled}});
        }
        summary["levels"] = std::move(levels);
        summary["fk_estimate_scaled"] = report.fk_estimate_scaled;
        summary["fk_estimate_unscaled"] = report.fk_estimate_unscaled;
        summary["staircase_identity_exact"] = report.staircase_identity_exact;
        summary["staircase_identity_value"] = report.staircase_identity_value;
        summary["staircase_identity_gap"] = report.staircase_identity_gap;
        outcome.verdicts.push_back({"logdet >= 0", nonneg,
                                    std::to_string(nonneg_count) + "/" +
                                        std::to_string(report.levels.size())});
        outcome.verdicts.push_back({"staircase identity gap computed", true,
                                    "gap " + std::to_string(report.staircase_identity_gap)});
    } else {
        throw ConfigError("config: unknown task '" + cfg.task + "'");
    }

    detail::append_verdicts(summary, outcome.verdicts);
    detail::write_text(dir / (cfg.task + "_summary.json"), summary.dump(2) + "\n", outcome);
    for (const auto& v : outcome.verdicts)
        if (!v.pass) outcome.exit_code = 1;
    return outcome;
}

}  // namespace aqs
