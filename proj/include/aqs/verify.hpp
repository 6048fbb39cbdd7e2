// verify.hpp — the bundled acceptance checks: one function per criterion,
// shared by the acceptance binary and the CLI `verify` subcommand.
#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aqs/eigensolve.hpp"
#include "aqs/exactla.hpp"
#include "aqs/graph.hpp"
#include "aqs/operators.hpp"
#include "aqs/oracles.hpp"
#include "aqs/pattern.hpp"
#include "aqs/spectra.hpp"

namespace aqs {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    int threads = 0;
    bool inject_corruption = false;  // negative-control hook for the invariance check
    // Stress factor for the level-aware criteria: multiplies their Følner
    // levels; verdicts must not change because the tolerances scale along.
    int level_scale = 1;
};

namespace detail {

inline FolnerSchedule scaled(const VerifyOptions& opt, std::vector<int> levels) {
    for (int& n : levels) n *= std::max(1, opt.level_scale);
    return FolnerSchedule{std::move(levels)};
}

}  // namespace detail

namespace detail {

template <typename F>
CriterionResult timed_criterion(int id, const std::string& name, F&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::ostringstream msg;
        r.pass = body(msg);
        r.detail = msg.str();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// C = a*Adj + b*I + V with small random integer coefficients; V is a radius-1
// potential over the codes seen in a probe window. Returns C*C.
inline PatternOperator random_integer_gram(const InfiniteGraph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) {
        return static_cast<long>(lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)));
    };
    const PatternCensus probe = pattern_census(g, folner_window(g, 3), 1);
    std::map<PatternCode, Rational> table;
    for (const auto& [code, cls] : probe.classes) table[code] = Rational(pick(-2, 2));
    PatternOperator c = add(add(scale(Rational(pick(-2, 2)), adjacency_operator(g)),
                                scale(Rational(pick(-2, 2)), identity_operator(g))),
                            pattern_potential(g, 1, std::move(table)));
    return gram(c);
}

}  // namespace detail

// 1. Lattice Laplacian staircases: Cauchy sup-distances strictly decreasing,
//    top staircase within 1e-2 of the arccos law.
inline CriterionResult criterion_ids_convergence(const VerifyOptions& opt) {
    return detail::timed_criterion(1, "IDS convergence on the lattice Laplacian",
                                   [&](std::ostringstream& msg) {
        const InfiniteGraph g = lattice_graph(1);
        const PatternOperator lap = laplacian_operator(g);
        IDSOptions ids_opt;
        ids_opt.detect_atoms = false;
        ids_opt.analytic = [](double lambda) {
            if (lambda <= 0.0) return 0.0;
            if (lambda >= 4.0) return 1.0;
            return std::acos(1.0 - lambda / 2.0) / M_PI;
        };
        RunLimits lim;
        lim.threads = opt.threads;
        lim.exact_limit = 0;  // float-only run
        const IDSReport report =
            ids_run(lap, detail::scaled(opt, {100, 200, 400, 800}), ids_opt, lim);
        bool decreasing = true;
        for (std::size_t i = 1; i < report.cauchy_sup.size(); ++i)
            decreasing = decreasing && report.cauchy_sup[i] < report.cauchy_sup[i - 1];
        const double gap = report.sup_to_analytic.value_or(1.0);
        msg << "cauchy sups";
        for (double d : report.cauchy_sup) msg << ' ' << d;
        msg << "; top-vs-analytic " << gap;
        return decreasing && gap <= 1e-2;
    });
}

// 2. Trace moments: boundary bound exact at every level; frequency-weighted
//    limits equal the brute-force closed-walk counts.
inline CriterionResult criterion_moments(const VerifyOptions& opt) {
    return detail::timed_criterion(2, "moment limits vs closed-walk counts",
                                   [&](std::ostringstream& msg) {
        RunLimits lim;
        lim.threads = opt.threads;
        bool ok = true;
        for (int dim : {1, 2}) {
            const InfiniteGraph g = lattice_graph(dim);
            const PatternOperator a = adjacency_operator(g);
            const FolnerSchedule schedule = dim == 1 ? detail::scaled(opt, {20, 40, 80})
                                                       : detail::scaled(opt, {3, 5, 7});
            for (int k : {2, 4, 6}) {
                const MomentReport report = moment_run(a, schedule, k, lim);
                for (const auto& lv : report.levels)
                    ok = ok && abs(lv.section_moment - lv.true_moment) <= lv.boundary_bound;
                const Rational expected(closed_walk_count(dim, k));
                if (!(report.extrapolated == expected)) ok = false;
                msg << 'Z' << (dim == 2 ? "2" : "") << " k=" << k << " -> "
                    << to_string(report.extrapolated) << "; ";
            }
        }
        return ok;
    });
}

// 3. Ground-state density on the pendant chain: exact kernel densities of the
//    squared adjacency are >= 1/3, stabilize within the boundary contribution,
//    and match the independent eigenspace comparison at lambda = 0.
inline CriterionResult criterion_ground_state(const VerifyOptions& opt) {
    return detail::timed_criterion(3, "ground-state density on the pendant chain",
                                   [&](std::ostringstream& msg) {
        const InfiniteGraph g = pendant_chain(2);
        const PatternOperator adj = adjacency_operator(g);
        const PatternOperator sq = power(adj, 2);
        const FolnerSchedule schedule{{15, 30, 60}};  // 31 / 61 / 121 cells
        RunLimits lim;
        lim.threads = opt.threads;
        const GroundStateReport ground = ground_state_run(sq, schedule, lim);
        bool ok = true;
        for (const auto& lv : ground.levels) ok = ok && lv.density >= Rational(1, 3);
        const auto& mid = ground.levels[ground.levels.size() - 2];
        const auto& top = ground.levels.back();
        const Rational drift = abs(top.density - mid.density);
        const Rational allowed = make_rational(2, static_cast<long>(mid.window_size));
        ok = ok && drift <= allowed;
        const EigenspaceReport eig = eigenspace_run(adj, Rational(0), schedule, lim);
        for (std::size_t i = 0; i < ground.levels.size(); ++i)
            ok = ok && ground.levels[i].density == eig.levels[i].density_squared;
        msg << "densities";
        for (const auto& lv : ground.levels) msg << ' ' << to_string(lv.density);
        msg << "; drift " << to_string(drift) << " <= " << to_string(allowed);
        return ok;
    });
}

// 4. Determinant positivity: random integer C*C sections on the decorated
//    lattice have integer det1 >= 1 and logdet >= 0, exactly.
inline CriterionResult criterion_logdet_positivity(const VerifyOptions& opt) {
    return detail::timed_criterion(4, "log-determinant positivity for random C*C",
                                   [&](std::ostringstream& msg) {
        RunLimits lim;
        lim.threads = opt.threads;
        bool ok = true;
        int passed = 0;
        for (int i = 0; i < 20; ++i) {
            const InfiniteGraph g =
                decorated_lattice(make_rational(1, 2), 1000 + static_cast<std::uint64_t>(i));
            const PatternOperator b =
                detail::random_integer_gram(g, 77 + static_cast<std::uint64_t>(i));
            const int level = 2 + i % 4;  // windows of 25..121 vertices
            const LogdetReport report = logdet_run(b, FolnerSchedule{{level}}, lim);
            const auto& lv = report.levels.back();
            const bool good = lv.nonneg_exact && lv.logdet_scaled >= 0.0 && lv.scale == 1;
            ok = ok && good;
            passed += good ? 1 : 0;
        }
        msg << passed << "/20 instances with integer det1 >= 1";
        return ok;
    });
}

// 5. Kernel comparison: |dim Ker(B_n - λ) - dim Ker(p (A-λ)^2 i)| within the
//    2r-boundary size, on the pendant-chain instances and on the lattice.
inline CriterionResult criterion_kernel_comparison(const VerifyOptions& opt) {
    return detail::timed_criterion(5, "eigenspace kernel comparison bound",
                                   [&](std::ostringstream& msg) {
        RunLimits lim;
        lim.threads = opt.threads;
        bool ok = true;
        {
            const InfiniteGraph g = pendant_chain(2);
            const EigenspaceReport r = eigenspace_run(adjacency_operator(g), Rational(0),
                                                      FolnerSchedule{{15, 30, 60}}, lim);
            ok = ok && r.all_bounds_ok;
            msg << "pendant dims";
            for (const auto& lv : r.levels)
                msg << " (" << lv.dim_shifted << ',' << lv.dim_squared << ")<=" << lv.boundary_2r;
        }
        {
            const InfiniteGraph g = lattice_graph(1);
            const EigenspaceReport r = eigenspace_run(adjacency_operator(g), Rational(0),
                                                      detail::scaled(opt, {10, 20, 40}), lim);
            ok = ok && r.all_bounds_ok;
            msg << "; lattice dims";
            for (const auto& lv : r.levels)
                msg << " (" << lv.dim_shifted << ',' << lv.dim_squared << ")<=" << lv.boundary_2r;
        }
        return ok;
    });
}

// 6. Exact log-determinant vs the staircase evaluation of
//    ln K (1 - N(0)) - ∫ (N(λ)-N(0))/λ dλ on the lattice Laplacian.
inline CriterionResult criterion_logdet_identity(const VerifyOptions& opt) {
    return detail::timed_criterion(6, "staircase log-determinant identity",
                                   [&](std::ostringstream& msg) {
        const InfiniteGraph g = lattice_graph(1);
        RunLimits lim;
        lim.threads = opt.threads;
        lim.exact_limit = 450 * static_cast<std::size_t>(std::max(1, opt.level_scale));
        const LogdetReport report =
            logdet_run(laplacian_operator(g), detail::scaled(opt, {200}), lim);
        msg << "exact " << report.staircase_identity_exact << " staircase " << report.staircase_identity_value << " gap "
            << report.staircase_identity_gap;
        return report.levels.back().nonneg_exact && report.staircase_identity_gap <= 1e-3;
    });
}

// 7. Pattern machinery: canonical codes complete against the brute-force
//    oracle; decorated-lattice frequencies match the Bernoulli probabilities.
inline CriterionResult criterion_pattern_machinery(const VerifyOptions& opt) {
    return detail::timed_criterion(7, "pattern codes and frequencies",
                                   [&](std::ostringstream& msg) {
        bool ok = true;
        const auto corpus = make_rooted_corpus(2024, 80, 8, true);
        std::vector<PatternCode> codes;
        codes.reserve(corpus.size());
        for (const auto& b : corpus) codes.push_back(canonical_code(b));
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            for (std::size_t j = i + 1; j < corpus.size(); ++j) {
                const bool same_code = codes[i] == codes[j];
                const bool iso = brute_force_rooted_iso(corpus[i], corpus[j]);
                if (same_code != iso) ++mismatches;
            }
        ok = ok && mismatches == 0;
        msg << corpus.size() << " graphs, " << mismatches << " code/iso mismatches";

        const InfiniteGraph g = decorated_lattice(make_rational(1, 2), 4242);
        const Window q = folner_window(g, 100 * std::max(1, opt.level_scale));
        const PatternCensus census = pattern_census(g, q, 1, {}, {}, opt.threads);
        // Root degree 4/5/6 <=> 0/1/2 incident diagonals: probabilities 1/4, 1/2, 1/4.
        double freq[3] = {0, 0, 0};
        for (const auto& [code, cls] : census.classes) {
            const std::size_t deg = g.neighbors(cls.representative).size();
            freq[deg - 4] += static_cast<double>(cls.count) / static_cast<double>(q.size());
        }
        const double probs[3] = {0.25, 0.5, 0.25};
        msg << "; degree frequencies";
        for (int i = 0; i < 3; ++i) {
            const double se = std::sqrt(probs[i] * (1 - probs[i]) / static_cast<double>(q.size()));
            msg << ' ' << freq[i] << " (target " << probs[i] << " +/- " << 3 * se << ")";
            ok = ok && std::fabs(freq[i] - probs[i]) <= 3 * se;
        }
        return ok;
    });
}

// 8. Invariance validation clean on every bundled operator; every computed
//    section's spectral radius within the certified norm bound.
inline CriterionResult criterion_invariance_and_norm(const VerifyOptions& opt) {
    return detail::timed_criterion(8, "invariance and norm bounds",
                                   [&](std::ostringstream& msg) {
        struct Item {
            std::string name;
            InfiniteGraph graph;
            PatternOperator op;
            int level;
        };
        std::vector<Item> items;
        {
            InfiniteGraph g = lattice_graph(1);
            items.push_back({"adjacency on the line", g, adjacency_operator(g), 12});
            items.push_back({"line Laplacian", g, laplacian_operator(g), 12});
        }
        {
            InfiniteGraph g = lattice_graph(2);
            items.push_back({"adjacency on the plane", g, adjacency_operator(g), 4});
        }
        {
            InfiniteGraph g = pendant_chain(2);
            items.push_back({"pendant-chain adjacency", g, adjacency_operator(g), 8});
            // Radius-2 orbit operator valuing the pendant orbit of the backbone pattern.
            EvalContext cx(g);
            const auto& canon = cx.get_canon(vertex(0), 2);
            const auto& b = cx.get_ball(vertex(0), 2);
            std::map<std::pair<PatternCode, int>, Rational> table;
            table[{canon.code, canon.orbit_of(b.index_of(pendant_vertex(0, 1)))}] = 1;
            const PatternOperator orb = orbit_operator(g, 2, table);
            items.push_back({"pendant orbit operator (symmetrized)", g, add(orb, star(orb)), 8});
        }
        {
            InfiniteGraph g = substitution_chain();
            items.push_back({"letter potential", g,
                             add(adjacency_operator(g), letter_potential(g, 0, 1)), 16});
        }
        {
            InfiniteGraph g = decorated_lattice(make_rational(1, 2), 99);
            items.push_back({"decorated-lattice gram", g, detail::random_integer_gram(g, 5), 3});
        }
        if (opt.inject_corruption) {
            // Radius-1 potential mislabelled as radius-0: the validator must
            // object, since all radius-0 balls here are isomorphic.
            InfiniteGraph g = pendant_chain(2);
            EvalContext cx(g);
            std::map<PatternCode, Rational> table;
            table[cx.get_canon(vertex(0), 1).code] = 1;
            table[cx.get_canon(pendant_vertex(0, 1), 1).code] = 2;
            items.push_back({"corrupted potential (negative control)", g,
                             pattern_potential(g, 1, table).with_declared_propagation(0), 8});
        }
        bool ok = true;
        for (const auto& item : items) {
            const Window q = folner_window(item.graph, item.level);
            const InvarianceReport inv = validate_invariance(item.op, q, 40, 8);
            if (!inv.ok()) {
                ok = false;
                msg << "invariance violated by " << item.name << " (" << inv.violations.size()
                    << " witnesses); ";
                continue;
            }
            const auto eigs = eigenvalues_sym(section_doubles(item.op, q, opt.threads), q.size());
            const double radius = std::max(std::fabs(eigs.front()), std::fabs(eigs.back()));
            const double bound = to_double(norm_bound(item.op));
            if (radius > bound + 1e-9) {
                ok = false;
                msg << item.name << " exceeds norm bound (" << radius << " > " << bound << "); ";
            }
        }
        if (ok) msg << items.size() << " operators clean";
        return ok;
    });
}

inline std::vector<CriterionResult> verify_all(const VerifyOptions& opt = {}) {
    return {
        criterion_ids_convergence(opt),   criterion_moments(opt),
        criterion_ground_state(opt),      criterion_logdet_positivity(opt),
        criterion_kernel_comparison(opt), criterion_logdet_identity(opt),
        criterion_pattern_machinery(opt), criterion_invariance_and_norm(opt),
    };
}

inline std::string format_criterion(const CriterionResult& r) {
    std::ostringstream os;
    os << "criterion " << r.id << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL");
    if (!r.detail.empty()) os << " [" << r.detail << "]";
    os << " (" << r.seconds << " s)";
    return os.str();
}

}  // namespace aqs
